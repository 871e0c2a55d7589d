"""Named-tensor weight archive.

On-disk layout, all little-endian:

* 8-byte magic ``FCPEWT01``
* u32 header length
* UTF-8 JSON header: ``{"entries": [{name, dtype, shape, offset}, ...],
  "metadata": {str: str}}`` with offsets relative to the payload start
* concatenated float32 tensor payloads, each 64-byte aligned

Entries are sorted by name and the JSON is emitted canonically, so writing
the same tensors twice produces byte-identical files.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArchiveError, FormatError, TruncatedFileError

MAGIC = b"FCPEWT01"
ALIGN = 64


@dataclass
class TensorArchive:
    """An in-memory map of name -> float32 tensor plus string metadata."""

    entries: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name, arr in list(self.entries.items()):
            self.entries[name] = np.ascontiguousarray(arr, dtype=np.float32)

    def add(self, name: str, tensor: np.ndarray) -> None:
        if name in self.entries:
            raise ArchiveError(f"duplicate tensor name {name!r}")
        self.entries[name] = np.ascontiguousarray(tensor, dtype=np.float32)

    def save(self, path) -> None:
        names = sorted(self.entries)
        table = []
        offset = 0
        for name in names:
            arr = self.entries[name]
            table.append(
                {"name": name, "dtype": "f32", "shape": list(arr.shape), "offset": offset}
            )
            offset += 4 * arr.size
            offset += (-offset) % ALIGN
        header = json.dumps(
            {"entries": table, "metadata": dict(sorted(self.metadata.items()))},
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            pos = 0
            for name in names:
                payload = self.entries[name].astype("<f4").tobytes()
                fh.write(payload)
                pos += len(payload)
                pad = (-pos) % ALIGN
                fh.write(b"\x00" * pad)
                pos += pad

    @classmethod
    def load(cls, path) -> "TensorArchive":
        with open(path, "rb") as fh:
            magic = fh.read(len(MAGIC))
            if len(magic) < len(MAGIC):
                raise TruncatedFileError("file ended inside the archive magic")
            if magic != MAGIC:
                raise FormatError(f"bad archive magic {magic!r}")
            raw_len = fh.read(4)
            if len(raw_len) < 4:
                raise TruncatedFileError("file ended before the header length")
            (header_len,) = struct.unpack("<I", raw_len)
            header_bytes = fh.read(header_len)
            if len(header_bytes) < header_len:
                raise TruncatedFileError("file ended inside the header")
            try:
                header = json.loads(header_bytes.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise FormatError(f"unparseable archive header: {exc}") from None
            payload = fh.read()

        entries: dict[str, np.ndarray] = {}
        for item in header.get("entries", []):
            name, shape, offset = item["name"], tuple(item["shape"]), item["offset"]
            if item.get("dtype", "f32") != "f32":
                raise FormatError(f"tensor {name!r}: unsupported dtype {item['dtype']!r}")
            size = int(np.prod(shape, dtype=np.int64)) if shape else 1
            end = offset + 4 * size
            if end > len(payload):
                raise TruncatedFileError(f"file ended inside tensor {name!r}")
            if name in entries:
                raise FormatError(f"duplicate tensor name {name!r}")
            arr = np.frombuffer(payload[offset:end], dtype="<f4").reshape(shape)
            entries[name] = arr.copy()
        return cls(entries=entries, metadata=dict(header.get("metadata", {})))
