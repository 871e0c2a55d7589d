import { describe, expect, it } from "vitest";

import { fft, hannPeriodic, logMel, melFilterbank, reflectPad } from "../src/dsp.js";
import { DEFAULT_MEL } from "../src/types.js";

/** Naive O(n^2) DFT oracle. */
function dftOracle(x: Float64Array): { re: Float64Array; im: Float64Array } {
  const n = x.length;
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  for (let k = 0; k < n; k++) {
    for (let t = 0; t < n; t++) {
      const ang = (-2 * Math.PI * k * t) / n;
      re[k] += x[t] * Math.cos(ang);
      im[k] += x[t] * Math.sin(ang);
    }
  }
  return { re, im };
}

describe("fft", () => {
  it("matches a naive DFT", () => {
    const n = 64;
    const x = new Float64Array(n);
    for (let i = 0; i < n; i++) x[i] = Math.sin(0.7 * i) + 0.3 * Math.cos(2.1 * i);
    const re = Float64Array.from(x);
    const im = new Float64Array(n);
    fft(re, im);
    const oracle = dftOracle(x);
    for (let k = 0; k < n; k++) {
      expect(re[k]).toBeCloseTo(oracle.re[k], 9);
      expect(im[k]).toBeCloseTo(oracle.im[k], 9);
    }
  });

  it("rejects non-power-of-two lengths", () => {
    expect(() => fft(new Float64Array(48), new Float64Array(48))).toThrow(/power of two/);
  });
});

describe("reflectPad", () => {
  it("mirrors without repeating the edge sample", () => {
    const out = reflectPad(Float64Array.from([1, 2, 3, 4]), 2);
    expect([...out]).toEqual([3, 2, 1, 2, 3, 4, 3, 2]);
  });
});

describe("hannPeriodic", () => {
  it("starts at zero and is symmetric around n/2", () => {
    const w = hannPeriodic(16);
    expect(w[0]).toBe(0);
    expect(w[8]).toBeCloseTo(1, 12);
    expect(w[3]).toBeCloseTo(w[13], 12);
  });
});

describe("melFilterbank", () => {
  it("rows are nonnegative and every filter has support", () => {
    const fb = melFilterbank(DEFAULT_MEL);
    let min = Infinity;
    for (const v of fb.data) min = Math.min(min, v);
    expect(min).toBe(0);
    for (let row = 0; row < fb.rows; row++) {
      let rowSum = 0;
      for (let b = 0; b < fb.cols; b++) rowSum += fb.data[row * fb.cols + b];
      expect(rowSum).toBeGreaterThan(0);
    }
  });
});

describe("logMel", () => {
  it("silence hits the log floor exactly", () => {
    const mel = logMel(new Float64Array(16000), DEFAULT_MEL);
    expect(mel.rows).toBe(101);
    expect(mel.cols).toBe(128);
    const floor = Math.log(DEFAULT_MEL.logFloor);
    for (const v of mel.data) expect(v).toBe(floor);
  });
});
