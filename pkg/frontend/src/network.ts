import { Matrix } from "./mel0.js";
import { ModelDims, TensorMap } from "./types.js";

const LN_EPS = 1e-5;
const EMBED_KERNEL = 3;

function silu(x: number): number {
  return x / (1 + Math.exp(-x));
}

function sigmoid(x: number): number {
  if (x >= 0) return 1 / (1 + Math.exp(-x));
  const e = Math.exp(x);
  return e / (1 + e);
}

/** Full conv along time with zero same-padding.
 *  x: (T, cIn) row-major, w: (cOut, cIn, k), b: (cOut). */
function conv1dSame(
  x: Float64Array, T: number, cIn: number,
  w: Float32Array, b: Float32Array, cOut: number, k: number,
): Float64Array {
  const pad = k >> 1;
  const out = new Float64Array(T * cOut);
  for (let t = 0; t < T; t++) {
    for (let o = 0; o < cOut; o++) {
      let acc = b[o];
      for (let j = 0; j < k; j++) {
        const ti = t + j - pad;
        if (ti < 0 || ti >= T) continue;
        const wBase = o * cIn * k + j;
        const xBase = ti * cIn;
        for (let c = 0; c < cIn; c++) {
          acc += x[xBase + c] * w[wBase + c * k];
        }
      }
      out[t * cOut + o] = acc;
    }
  }
  return out;
}

/** Per-channel conv along time: x (T, C), w (C, k), b (C). */
function depthwiseSame(
  x: Float64Array, T: number, C: number,
  w: Float32Array, b: Float32Array, k: number,
): Float64Array {
  const pad = k >> 1;
  const out = new Float64Array(T * C);
  for (let t = 0; t < T; t++) {
    for (let c = 0; c < C; c++) {
      let acc = b[c];
      for (let j = 0; j < k; j++) {
        const ti = t + j - pad;
        if (ti < 0 || ti >= T) continue;
        acc += x[ti * C + c] * w[c * k + j];
      }
      out[t * C + c] = acc;
    }
  }
  return out;
}

/** x (T, cIn) times w (cOut, cIn) transposed, plus bias. */
function linear(
  x: Float64Array, T: number, cIn: number,
  w: Float32Array, b: Float32Array, cOut: number,
): Float64Array {
  const out = new Float64Array(T * cOut);
  for (let t = 0; t < T; t++) {
    for (let o = 0; o < cOut; o++) {
      let acc = b[o];
      const wBase = o * cIn;
      const xBase = t * cIn;
      for (let c = 0; c < cIn; c++) {
        acc += x[xBase + c] * w[wBase + c];
      }
      out[t * cOut + o] = acc;
    }
  }
  return out;
}

function layerNorm(
  x: Float64Array, T: number, C: number,
  gamma: Float32Array, beta: Float32Array,
): Float64Array {
  const out = new Float64Array(T * C);
  for (let t = 0; t < T; t++) {
    let mean = 0;
    for (let c = 0; c < C; c++) mean += x[t * C + c];
    mean /= C;
    let variance = 0;
    for (let c = 0; c < C; c++) {
      const d = x[t * C + c] - mean;
      variance += d * d;
    }
    variance /= C;
    const inv = 1 / Math.sqrt(variance + LN_EPS);
    for (let c = 0; c < C; c++) {
      out[t * C + c] = (x[t * C + c] - mean) * inv * gamma[c] + beta[c];
    }
  }
  return out;
}

function need(tensors: TensorMap, name: string): Float32Array {
  const t = tensors.get(name);
  if (!t) throw new Error(`missing tensor ${name}`);
  return t.data;
}

/**
 * Reference forward pass over archive-named tensors: embedding convs,
 * residual depthwise-separable blocks, sigmoid linear head.  Matches the
 * engine's architecture; pure float64 so runs are bit-reproducible.
 */
export function forward(dims: ModelDims, tensors: TensorMap, mel: Matrix): Matrix {
  if (mel.cols !== dims.nMels) {
    throw new Error(`input has ${mel.cols} mel bins, model expects ${dims.nMels}`);
  }
  const T = mel.rows;
  const d = dims.dModel;
  const e = dims.expand * d;

  let h = conv1dSame(
    mel.data, T, dims.nMels,
    need(tensors, "embed.conv1.weight"), need(tensors, "embed.conv1.bias"),
    d, EMBED_KERNEL,
  );
  for (let i = 0; i < h.length; i++) h[i] = silu(h[i]);
  h = conv1dSame(
    h, T, d,
    need(tensors, "embed.conv2.weight"), need(tensors, "embed.conv2.bias"),
    d, EMBED_KERNEL,
  );
  if (dims.useHarmonicEmb) {
    const emb = need(tensors, "harmonic.embed");
    for (let t = 0; t < T; t++) {
      for (let c = 0; c < d; c++) h[t * d + c] += emb[c];
    }
  }

  for (let layer = 0; layer < dims.nLayers; layer++) {
    const p = `blocks.${layer}.`;
    let y = layerNorm(h, T, d, need(tensors, p + "norm.gamma"), need(tensors, p + "norm.beta"));
    y = linear(y, T, d, need(tensors, p + "pw1.weight"), need(tensors, p + "pw1.bias"), e);
    for (let i = 0; i < y.length; i++) y[i] = silu(y[i]);
    y = depthwiseSame(y, T, e, need(tensors, p + "dw.weight"), need(tensors, p + "dw.bias"), dims.dwKernel);
    for (let i = 0; i < y.length; i++) y[i] = silu(y[i]);
    y = linear(y, T, e, need(tensors, p + "pw2.weight"), need(tensors, p + "pw2.bias"), d);
    for (let i = 0; i < h.length; i++) h[i] += y[i];
  }

  const logits = linear(h, T, d, need(tensors, "head.weight"), need(tensors, "head.bias"), dims.nBins);
  for (let i = 0; i < logits.length; i++) logits[i] = sigmoid(logits[i]);
  return { rows: T, cols: dims.nBins, data: logits };
}
