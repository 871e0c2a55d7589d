import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readSafetensors, tensorBytes } from "../src/safetensors.js";
import { writeSafetensors, tempDir, FIXTURES } from "./helpers.js";
import { TensorMap } from "../src/types.js";

const TOY = join(FIXTURES, "toy.safetensors");

describe("readSafetensors", () => {
  it("exposes a flat name -> tensor map with shapes", () => {
    const { tensors } = readSafetensors(TOY);
    expect(tensors.get("embed.0.weight")?.shape).toEqual([8, 128, 3]);
    expect(tensors.get("blocks.0.dw.weight")?.shape).toEqual([16, 1, 5]);
    expect(tensors.get("head.weight")?.shape).toEqual([360, 8]);
    expect(tensors.has("ema.head.weight")).toBe(true);
  });

  it("round-trips tensor bytes exactly", () => {
    const dir = tempDir();
    const path = join(dir, "mini.safetensors");
    const data = new Float32Array([1.5, -2.25, 3.125, 0.0, -0.0, 42.0]);
    const tensors: TensorMap = new Map([["a.weight", { shape: [2, 3], data }]]);
    writeSafetensors(path, tensors);
    const back = readSafetensors(path).tensors.get("a.weight")!;
    expect(back.shape).toEqual([2, 3]);
    expect(Buffer.from(tensorBytes(back))).toEqual(
      Buffer.from(new Uint8Array(data.buffer)),
    );
  });

  it("rejects non-F32 dtypes", () => {
    const dir = tempDir();
    const path = join(dir, "bad.safetensors");
    const blob = Buffer.from(
      JSON.stringify({ x: { dtype: "F16", shape: [2], data_offsets: [0, 4] } }),
    );
    const out = Buffer.alloc(8 + blob.byteLength + 4);
    out.writeBigUInt64LE(BigInt(blob.byteLength), 0);
    blob.copy(out, 8);
    writeFileSync(path, out);
    expect(() => readSafetensors(path)).toThrow(/dtype/);
  });

  it("rejects truncated files", () => {
    const dir = tempDir();
    const path = join(dir, "trunc.safetensors");
    writeFileSync(path, Buffer.from([1, 2, 3]));
    expect(() => readSafetensors(path)).toThrow(/truncated/);
  });
});
