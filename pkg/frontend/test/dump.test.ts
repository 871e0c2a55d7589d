import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { dumpActivations } from "../src/dump.js";
import { maxAbsDiff, readMel0 } from "../src/mel0.js";
import { FIXTURES, tempDir } from "./helpers.js";

const TOY = join(FIXTURES, "toy.safetensors");
const TONE = join(FIXTURES, "tone.wav");
const SILENCE = join(FIXTURES, "silence.wav");

describe("dumpActivations", () => {
  it("reproduces the engine's golden mel within 1e-5", () => {
    const dir = tempDir();
    const { melPath } = dumpActivations(TOY, TONE, join(dir, "act"));
    const ours = readMel0(melPath);
    const golden = readMel0(join(FIXTURES, "golden.mel"));
    expect(ours.rows).toBe(golden.rows);
    expect(maxAbsDiff(ours, golden)).toBeLessThan(1e-5);
  });

  it("reproduces the engine's golden probability matrix within 1e-5", () => {
    const dir = tempDir();
    const { yPath, frames } = dumpActivations(TOY, TONE, join(dir, "act"));
    const ours = readMel0(yPath);
    const golden = readMel0(join(FIXTURES, "golden.y"));
    expect(frames).toBe(golden.rows);
    expect(ours.cols).toBe(360);
    const worst = maxAbsDiff(ours, golden);
    expect(worst).toBeLessThan(1e-5);
  });

  it("silence input parses and has (T, 360) output shape", () => {
    const dir = tempDir();
    const { yPath } = dumpActivations(TOY, SILENCE, join(dir, "sil"));
    const y = readMel0(yPath);
    expect(y.rows).toBe(Math.floor(3200 / 160) + 1);
    expect(y.cols).toBe(360);
    for (const v of y.data) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
  });

  it("same WAV twice produces identical bytes", () => {
    const dir = tempDir();
    const a = dumpActivations(TOY, TONE, join(dir, "a"));
    const b = dumpActivations(TOY, TONE, join(dir, "b"));
    expect(readFileSync(a.yPath).equals(readFileSync(b.yPath))).toBe(true);
    expect(readFileSync(a.melPath).equals(readFileSync(b.melPath))).toBe(true);
  });

  it("rejects a sample-rate mismatch with a remediation hint", () => {
    const dir = tempDir();
    // synthesize a 8 kHz wav by patching the fixture's rate field
    const wav = Buffer.from(readFileSync(TONE));
    const fmtOffset = wav.indexOf(Buffer.from("fmt "));
    wav.writeUInt32LE(8000, fmtOffset + 8 + 4);
    const badPath = join(dir, "8k.wav");
    writeFileSync(badPath, wav);
    expect(() => dumpActivations(TOY, badPath, join(dir, "x"))).toThrow(/resample/);
  });
});
