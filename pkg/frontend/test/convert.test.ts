import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readArchive } from "../src/archive.js";
import { convert, formatManifest } from "../src/convert.js";
import { readSafetensors, tensorBytes } from "../src/safetensors.js";
import { TensorMap } from "../src/types.js";
import { FIXTURES, tempDir, writeSafetensors } from "./helpers.js";

const TOY = join(FIXTURES, "toy.safetensors");
const EXPECTED = JSON.parse(readFileSync(join(FIXTURES, "expected.json"), "utf-8"));

describe("convert", () => {
  it("infers architecture dims from tensor shapes", () => {
    const dir = tempDir();
    const manifest = convert(TOY, join(dir, "out.fcpewt"));
    expect(manifest.dims.nMels).toBe(EXPECTED.n_mels);
    expect(manifest.dims.dModel).toBe(EXPECTED.d_model);
    expect(manifest.dims.nLayers).toBe(EXPECTED.n_layers);
    expect(manifest.dims.dwKernel).toBe(EXPECTED.dw_kernel);
    expect(manifest.dims.expand).toBe(EXPECTED.expand);
    expect(manifest.dims.nBins).toBe(EXPECTED.n_bins);
    expect(manifest.dims.useHarmonicEmb).toBe(EXPECTED.use_harmonic_emb);
  });

  it("lists extra source tensors as unmapped, never dropping them silently", () => {
    const dir = tempDir();
    const manifest = convert(TOY, join(dir, "out.fcpewt"));
    expect(manifest.unmapped.sort()).toEqual([...EXPECTED.unmapped].sort());
    expect(formatManifest(manifest)).toContain("ema.head.weight");
  });

  it("is byte-lossless for every mapped tensor", () => {
    const dir = tempDir();
    const out = join(dir, "out.fcpewt");
    const manifest = convert(TOY, out);
    const source = readSafetensors(TOY).tensors;
    const archive = readArchive(out);
    for (const { source: src, target } of manifest.mappings) {
      const a = Buffer.from(tensorBytes(source.get(src)!));
      const b = Buffer.from(tensorBytes(archive.tensors.get(target)!));
      expect(b.equals(a), `${src} -> ${target}`).toBe(true);
    }
  });

  it("embeds dims, mel convention, and source hash in metadata", () => {
    const dir = tempDir();
    convert(TOY, join(dir, "out.fcpewt"));
    const { metadata } = readArchive(join(dir, "out.fcpewt"));
    expect(metadata["model.d_model"]).toBe(String(EXPECTED.d_model));
    expect(metadata["model.n_layers"]).toBe(String(EXPECTED.n_layers));
    expect(metadata["mel.sample_rate"]).toBe("16000");
    expect(metadata["mel.n_mels"]).toBe(String(EXPECTED.n_mels));
    expect(metadata["source.sha256"]).toHaveLength(64);
  });

  it("two conversions of the same checkpoint are byte-identical", () => {
    const dir = tempDir();
    const a = join(dir, "a.fcpewt");
    const b = join(dir, "b.fcpewt");
    convert(TOY, a);
    convert(TOY, b);
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });

  it("fails hard on a wrong-shape head tensor, naming the expected 360", () => {
    const dir = tempDir();
    const source = readSafetensors(TOY).tensors;
    const bad: TensorMap = new Map(source);
    bad.set("head.weight", { shape: [180, 8], data: new Float32Array(180 * 8) });
    bad.set("head.bias", { shape: [180], data: new Float32Array(180) });
    const badPath = join(dir, "bad.safetensors");
    writeSafetensors(badPath, bad);
    expect(() => convert(badPath, join(dir, "out.fcpewt"))).toThrow(/360/);
  });

  it("fails hard when a required tensor is missing, listing candidates by shape", () => {
    const dir = tempDir();
    const source = readSafetensors(TOY).tensors;
    const bad: TensorMap = new Map(source);
    const head = bad.get("head.weight")!;
    bad.delete("head.weight");
    bad.set("trunk.final.weight", head); // same payload under an unknown name
    const badPath = join(dir, "missing.safetensors");
    writeSafetensors(badPath, bad);
    expect(() => convert(badPath, join(dir, "out.fcpewt"))).toThrow(
      /head\.weight[\s\S]*trunk\.final\.weight/,
    );
  });

  it("honors rename overrides from a mapping file", () => {
    const dir = tempDir();
    const source = readSafetensors(TOY).tensors;
    const odd: TensorMap = new Map(source);
    const head = odd.get("head.weight")!;
    odd.delete("head.weight");
    odd.set("classifier.weight", head);
    const oddPath = join(dir, "odd.safetensors");
    writeSafetensors(oddPath, odd);
    const mappingPath = join(dir, "mapping.json");
    writeFileSync(
      mappingPath,
      JSON.stringify({ rename: { "classifier.weight": "head.weight" } }),
    );
    const manifest = convert(oddPath, join(dir, "out.fcpewt"), mappingPath);
    expect(manifest.mappings.some((m) => m.source === "classifier.weight")).toBe(true);
  });
});
