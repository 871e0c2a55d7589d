import { readFileSync, writeFileSync } from "node:fs";

import { TensorMap, tensorCount } from "./types.js";

const MAGIC = "FCPEWT01";
const ALIGN = 64;

/**
 * Write the engine's weight archive: 8-byte magic, u32 header length,
 * canonical JSON header (sorted names/keys), then concatenated
 * little-endian float32 payloads, each 64-byte aligned.  Output is
 * deterministic: identical tensors produce identical bytes.
 */
export function writeArchive(
  path: string,
  tensors: TensorMap,
  metadata: Record<string, string>,
): void {
  const names = [...tensors.keys()].sort();
  const entries: { dtype: string; name: string; offset: number; shape: number[] }[] = [];
  let offset = 0;
  for (const name of names) {
    const t = tensors.get(name)!;
    entries.push({ dtype: "f32", name, offset, shape: [...t.shape] });
    offset += 4 * tensorCount(t.shape);
    offset += (ALIGN - (offset % ALIGN)) % ALIGN;
  }
  const sortedMeta: Record<string, string> = {};
  for (const key of Object.keys(metadata).sort()) {
    sortedMeta[key] = metadata[key];
  }
  const header = Buffer.from(JSON.stringify({ entries, metadata: sortedMeta }), "utf-8");

  const payloadSize = offset;
  const out = Buffer.alloc(8 + 4 + header.byteLength + payloadSize);
  out.write(MAGIC, 0, "ascii");
  out.writeUInt32LE(header.byteLength, 8);
  header.copy(out, 12);
  const base = 12 + header.byteLength;
  for (const entry of entries) {
    const t = tensors.get(entry.name)!;
    const bytes = new Uint8Array(t.data.buffer, t.data.byteOffset, t.data.byteLength);
    out.set(bytes, base + entry.offset);
  }
  writeFileSync(path, out);
}

export interface ArchiveFile {
  tensors: TensorMap;
  metadata: Record<string, string>;
}

export function readArchive(path: string): ArchiveFile {
  const raw = readFileSync(path);
  if (raw.subarray(0, 8).toString("ascii") !== MAGIC) {
    throw new Error(`${path}: bad archive magic`);
  }
  const headerLen = raw.readUInt32LE(8);
  const header = JSON.parse(raw.subarray(12, 12 + headerLen).toString("utf-8"));
  const base = 12 + headerLen;
  const tensors: TensorMap = new Map();
  for (const entry of header.entries as {
    name: string;
    shape: number[];
    offset: number;
  }[]) {
    const n = tensorCount(entry.shape);
    const bytes = raw.subarray(base + entry.offset, base + entry.offset + 4 * n);
    if (bytes.byteLength < 4 * n) {
      throw new Error(`${path}: tensor ${entry.name} truncated`);
    }
    const data = new Float32Array(n);
    new Uint8Array(data.buffer).set(bytes);
    tensors.set(entry.name, { shape: [...entry.shape], data });
  }
  return { tensors, metadata: header.metadata ?? {} };
}
