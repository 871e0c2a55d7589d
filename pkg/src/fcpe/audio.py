"""WAV input/output and band-limited resampling.

The reader handles RIFF/WAVE files holding 16-bit PCM or 32-bit IEEE float
samples (mono or stereo; stereo is downmixed by averaging).  Resampling is a
windowed-sinc interpolator with 64 taps per output phase, normalized per
output sample so DC is preserved exactly.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DomainError, FormatError, TruncatedFileError

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

RESAMPLE_TAPS = 64


@dataclass
class AudioBuffer:
    """Mono float samples at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        self.sample_rate = int(self.sample_rate)
        if self.sample_rate <= 0:
            raise DomainError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise DomainError("samples must all be finite")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def rms(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.sqrt(np.mean(self.samples * self.samples)))


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) < n:
        raise TruncatedFileError(f"file ended while reading {what}")
    return data


def load_wav(path) -> AudioBuffer:
    """Read a RIFF/WAVE file into a mono AudioBuffer in [-1, 1].

    16-bit PCM samples are scaled by 1/32768; IEEE float32 samples are taken
    as-is.  Stereo is averaged down to mono.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        riff = _read_exact(fh, 12, "RIFF header")
        if riff[0:4] != b"RIFF" or riff[8:12] != b"WAVE":
            raise FormatError(f"{path.name}: not a RIFF/WAVE file")
        fmt = None
        data = None
        while True:
            head = fh.read(8)
            if len(head) == 0:
                break
            if len(head) < 8:
                raise TruncatedFileError("file ended inside a chunk header")
            cid, size = head[0:4], struct.unpack("<I", head[4:8])[0]
            if cid == b"fmt ":
                fmt = _read_exact(fh, size, "fmt chunk")
            elif cid == b"data":
                data = _read_exact(fh, size, "data chunk")
            else:
                fh.seek(size, 1)
            if size % 2:
                fh.seek(1, 1)
        if fmt is None:
            raise FormatError("missing fmt chunk")
        if data is None:
            raise FormatError("missing data chunk")

    audio_format, channels, rate, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])
    if audio_format == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise TruncatedFileError("file ended inside extensible fmt chunk")
        audio_format = struct.unpack("<H", fmt[24:26])[0]

    if audio_format == WAVE_FORMAT_PCM and bits == 16:
        x = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        x = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise FormatError(
            f"fmt chunk: unsupported codec (format {audio_format}, {bits}-bit); "
            "expected 16-bit PCM or 32-bit IEEE float"
        )
    if channels < 1:
        raise FormatError("fmt chunk: zero channels")
    if channels > 1:
        n = (x.shape[0] // channels) * channels
        x = x[:n].reshape(-1, channels).mean(axis=1)
    return AudioBuffer(samples=x, sample_rate=rate)


def save_wav(path, buf: AudioBuffer, fmt: str = "float32") -> None:
    """Write a mono WAV file, IEEE float32 by default (lossless for mixes
    that exceed full scale) or 16-bit PCM with clipping."""
    if fmt == "float32":
        payload = buf.samples.astype("<f4").tobytes()
        audio_format, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    elif fmt == "pcm16":
        clipped = np.clip(buf.samples, -1.0, 32767.0 / 32768.0)
        payload = (np.round(clipped * 32768.0).astype("<i2")).tobytes()
        audio_format, bits = WAVE_FORMAT_PCM, 16
    else:
        raise DomainError(f"unknown wav format {fmt!r}")
    block = bits // 8
    hdr = struct.pack(
        "<HHIIHH", audio_format, 1, buf.sample_rate, buf.sample_rate * block, block, bits
    )
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 4 + 8 + len(hdr) + 8 + len(payload)))
        fh.write(b"WAVE")
        fh.write(b"fmt " + struct.pack("<I", len(hdr)) + hdr)
        fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        if len(payload) % 2:
            fh.write(b"\x00")


def resample_by_ratio(x: np.ndarray, ratio: float, taps: int = RESAMPLE_TAPS) -> np.ndarray:
    """Resample ``x`` so the output has ``round(len(x) * ratio)`` samples.

    Windowed-sinc (Hann) interpolation with the anti-alias cutoff at the
    lower of the two Nyquist rates; ``taps`` samples contribute per output
    value, counted at the lower rate.  Kernel weights are renormalized per
    output sample, so constant signals pass through exactly; edges are
    handled by clamping (sample-and-hold).
    """
    x = np.asarray(x, dtype=np.float64)
    n_in = x.shape[0]
    n_out = int(round(n_in * ratio))
    if n_in == 0 or n_out == 0:
        return np.zeros(n_out, dtype=np.float64)
    cutoff = min(1.0, ratio)
    half = (taps / 2.0) / cutoff  # kernel half-width in input samples
    support = int(2 * half) + 1
    offs = np.arange(support)

    y = np.empty(n_out, dtype=np.float64)
    block = max(1, (1 << 22) // support)  # bound the gather workspace
    for start in range(0, n_out, block):
        stop = min(start + block, n_out)
        pos = np.arange(start, stop, dtype=np.float64) / ratio
        k0 = np.ceil(pos - half).astype(np.int64)
        idx = k0[:, None] + offs[None, :]
        t = idx - pos[:, None]
        w = np.sinc(cutoff * t)
        w *= 0.5 + 0.5 * np.cos(np.pi * np.clip(t / half, -1.0, 1.0))
        w[np.abs(t) > half] = 0.0
        w /= np.sum(w, axis=1, keepdims=True)
        gathered = x[np.clip(idx, 0, n_in - 1)]
        y[start:stop] = np.sum(gathered * w, axis=1)
    return y


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Band-limited resampling to ``target_rate``; identical rates pass the
    samples through bit-identically."""
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise DomainError(f"target_rate must be > 0, got {target_rate}")
    if target_rate == buf.sample_rate:
        return AudioBuffer(samples=buf.samples.copy(), sample_rate=target_rate)
    y = resample_by_ratio(buf.samples, target_rate / buf.sample_rate)
    return AudioBuffer(samples=y, sample_rate=target_rate)
