import { Matrix } from "./mel0.js";
import { MelSettings } from "./types.js";

/** In-place iterative radix-2 complex FFT. Length must be a power of two. */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if ((n & (n - 1)) !== 0) {
    throw new Error(`fft length must be a power of two, got ${n}`);
  }
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const ang = (-2 * Math.PI) / len;
    const wRe = Math.cos(ang);
    const wIm = Math.sin(ang);
    for (let start = 0; start < n; start += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const i = start + k;
        const j = i + len / 2;
        const tRe = re[j] * curRe - im[j] * curIm;
        const tIm = re[j] * curIm + im[j] * curRe;
        re[j] = re[i] - tRe;
        im[j] = im[i] - tIm;
        re[i] += tRe;
        im[i] += tIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

export function hannPeriodic(n: number): Float64Array {
  const w = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    w[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / n);
  }
  return w;
}

function reflectIndex(i: number, n: number): number {
  if (n === 1) return 0;
  const period = 2 * n - 2;
  const j = ((i % period) + period) % period;
  return j < n ? j : period - j;
}

/** Mirror padding without edge duplication ([a,b,c] -> c,b | a,b,c | b,a). */
export function reflectPad(x: Float64Array, pad: number): Float64Array {
  const n = x.length;
  const out = new Float64Array(n + 2 * pad);
  for (let i = 0; i < out.length; i++) {
    out[i] = n ? x[reflectIndex(i - pad, n)] : 0;
  }
  return out;
}

/** Centered-frame magnitude spectrogram: T = floor(len / hop) + 1 rows. */
export function stftMagnitude(x: Float64Array, mel: MelSettings): Matrix {
  const { nFft, hop } = mel;
  const pad = nFft >> 1;
  const padded = reflectPad(x, pad);
  const frames = Math.floor(x.length / hop) + 1;
  const bins = nFft / 2 + 1;
  const window = hannPeriodic(nFft);
  const data = new Float64Array(frames * bins);
  const re = new Float64Array(nFft);
  const im = new Float64Array(nFft);
  for (let t = 0; t < frames; t++) {
    const start = t * hop;
    for (let i = 0; i < nFft; i++) {
      re[i] = padded[start + i] * window[i];
      im[i] = 0;
    }
    fft(re, im);
    for (let b = 0; b < bins; b++) {
      data[t * bins + b] = Math.hypot(re[b], im[b]);
    }
  }
  return { rows: frames, cols: bins, data };
}

export function hzToMel(f: number): number {
  return 2595 * Math.log10(1 + f / 700);
}

export function melToHz(m: number): number {
  return 700 * (Math.pow(10, m / 2595) - 1);
}

/** Triangular filters, linear in HTK mel. Rows: nMels, cols: nFft/2+1. */
export function melFilterbank(mel: MelSettings): Matrix {
  const bins = mel.nFft / 2 + 1;
  const melLo = hzToMel(mel.fMin);
  const melHi = hzToMel(mel.fMax);
  const pts = new Float64Array(mel.nMels + 2);
  for (let i = 0; i < pts.length; i++) {
    pts[i] = melLo + ((melHi - melLo) * i) / (mel.nMels + 1);
  }
  const data = new Float64Array(mel.nMels * bins);
  for (let b = 0; b < bins; b++) {
    const m = hzToMel((b * mel.sampleRate) / mel.nFft);
    for (let row = 0; row < mel.nMels; row++) {
      const up = (m - pts[row]) / (pts[row + 1] - pts[row]);
      const down = (pts[row + 2] - m) / (pts[row + 2] - pts[row + 1]);
      data[row * bins + b] = Math.max(0, Math.min(up, down));
    }
  }
  return { rows: mel.nMels, cols: bins, data };
}

/** Log-mel matrix matching the engine's frontend convention:
 *  magnitude spectrum x HTK filterbank, natural log with a floor. */
export function logMel(x: Float64Array, mel: MelSettings): Matrix {
  const mag = stftMagnitude(x, mel);
  const fb = melFilterbank(mel);
  const out = new Float64Array(mag.rows * mel.nMels);
  for (let t = 0; t < mag.rows; t++) {
    for (let row = 0; row < mel.nMels; row++) {
      let acc = 0;
      for (let b = 0; b < mag.cols; b++) {
        acc += mag.data[t * mag.cols + b] * fb.data[row * mag.cols + b];
      }
      out[t * mel.nMels + row] = Math.log(Math.max(acc, mel.logFloor));
    }
  }
  return { rows: mag.rows, cols: mel.nMels, data: out };
}
