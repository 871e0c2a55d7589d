import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { TensorMap, tensorCount } from "../src/types.js";

export const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function tempDir(prefix = "fcpe-convert-"): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Minimal safetensors writer for synthesizing malformed checkpoints. */
export function writeSafetensors(path: string, tensors: TensorMap): void {
  const header: Record<string, unknown> = {};
  let offset = 0;
  const payloads: Uint8Array[] = [];
  for (const [name, t] of tensors) {
    const bytes = new Uint8Array(t.data.buffer, t.data.byteOffset, 4 * tensorCount(t.shape));
    header[name] = {
      dtype: "F32",
      shape: t.shape,
      data_offsets: [offset, offset + bytes.byteLength],
    };
    payloads.push(bytes);
    offset += bytes.byteLength;
  }
  const blob = Buffer.from(JSON.stringify(header), "utf-8");
  const out = Buffer.alloc(8 + blob.byteLength + offset);
  out.writeBigUInt64LE(BigInt(blob.byteLength), 0);
  blob.copy(out, 8);
  let pos = 8 + blob.byteLength;
  for (const p of payloads) {
    out.set(p, pos);
    pos += p.byteLength;
  }
  writeFileSync(path, out);
}
