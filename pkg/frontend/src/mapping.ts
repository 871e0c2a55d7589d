import { ModelDims, NameMapping, TensorEntry, TensorMap, tensorCount } from "./types.js";

/** Optional user-supplied overrides loaded from --mapping JSON. */
export interface MappingFile {
  rename?: Record<string, string>;
  metadata?: Record<string, string>;
  expectBins?: number;
}

interface Rule {
  pattern: RegExp;
  target: (m: RegExpMatchArray) => string;
  /** squeeze axes of size one at these positions (after matching) */
  squeeze?: number[];
}

// Default rules translate torch-style state-dict names (Sequential embed,
// conv weights with trailing singleton dims) to archive names.
const RULES: Rule[] = [
  { pattern: /^embed\.0\.(weight|bias)$/, target: (m) => `embed.conv1.${m[1]}` },
  { pattern: /^embed\.2\.(weight|bias)$/, target: (m) => `embed.conv2.${m[1]}` },
  { pattern: /^harmonic_emb\.weight$/, target: () => "harmonic.embed", squeeze: [0] },
  { pattern: /^blocks\.(\d+)\.norm\.weight$/, target: (m) => `blocks.${m[1]}.norm.gamma` },
  { pattern: /^blocks\.(\d+)\.norm\.bias$/, target: (m) => `blocks.${m[1]}.norm.beta` },
  { pattern: /^blocks\.(\d+)\.pw1\.weight$/, target: (m) => `blocks.${m[1]}.pw1.weight`, squeeze: [2] },
  { pattern: /^blocks\.(\d+)\.pw1\.bias$/, target: (m) => `blocks.${m[1]}.pw1.bias` },
  { pattern: /^blocks\.(\d+)\.dw\.weight$/, target: (m) => `blocks.${m[1]}.dw.weight`, squeeze: [1] },
  { pattern: /^blocks\.(\d+)\.dw\.bias$/, target: (m) => `blocks.${m[1]}.dw.bias` },
  { pattern: /^blocks\.(\d+)\.pw2\.weight$/, target: (m) => `blocks.${m[1]}.pw2.weight`, squeeze: [2] },
  { pattern: /^blocks\.(\d+)\.pw2\.bias$/, target: (m) => `blocks.${m[1]}.pw2.bias` },
  { pattern: /^head\.(weight|bias)$/, target: (m) => `head.${m[1]}` },
  // already archive-named checkpoints pass straight through
  { pattern: /^embed\.conv[12]\.(weight|bias)$/, target: (m) => m[0] },
  { pattern: /^harmonic\.embed$/, target: (m) => m[0] },
  { pattern: /^blocks\.\d+\.(norm\.(gamma|beta)|pw[12]\.(weight|bias)|dw\.(weight|bias))$/, target: (m) => m[0] },
];

function squeezeShape(entry: TensorEntry, axes: number[]): TensorEntry {
  const shape = [...entry.shape];
  for (const axis of [...axes].sort((a, b) => b - a)) {
    if (axis >= shape.length || shape[axis] !== 1) {
      throw new Error(
        `cannot squeeze axis ${axis} of shape [${entry.shape.join(", ")}]`,
      );
    }
    shape.splice(axis, 1);
  }
  return { shape, data: entry.data };
}

export interface MappedCheckpoint {
  tensors: TensorMap;
  mappings: NameMapping[];
  unmapped: string[];
}

/** Apply rename overrides, then the default rules; payload bytes are
 *  untouched (conversion is lossless for every mapped tensor). */
export function mapTensorNames(source: TensorMap, overrides?: Record<string, string>): MappedCheckpoint {
  const tensors: TensorMap = new Map();
  const mappings: NameMapping[] = [];
  const unmapped: string[] = [];
  for (const [name, entry] of source) {
    let target: string | null = null;
    let mapped = entry;
    if (overrides && name in overrides) {
      target = overrides[name];
    } else {
      for (const rule of RULES) {
        const m = name.match(rule.pattern);
        if (m) {
          target = rule.target(m);
          if (rule.squeeze) mapped = squeezeShape(entry, rule.squeeze);
          break;
        }
      }
    }
    if (target === null || target === "") {
      unmapped.push(name);
      continue;
    }
    if (tensors.has(target)) {
      throw new Error(`both ${name} and an earlier tensor map to ${target}`);
    }
    tensors.set(target, mapped);
    mappings.push({ source: name, target, shape: [...mapped.shape] });
  }
  return { tensors, mappings, unmapped };
}

function describeUnmapped(mapped: MappedCheckpoint | undefined, source: TensorMap | undefined): string {
  if (!mapped || !source || mapped.unmapped.length === 0) return "";
  const listing = mapped.unmapped
    .map((u) => `${u} [${source.get(u)!.shape.join(", ")}]`)
    .join(", ");
  return `; unmapped source tensors: ${listing}`;
}

function shapeOf(
  tensors: TensorMap,
  name: string,
  mapped?: MappedCheckpoint,
  source?: TensorMap,
): number[] {
  const t = tensors.get(name);
  if (!t) {
    throw new Error(
      `checkpoint is missing required tensor ${name}${describeUnmapped(mapped, source)}`,
    );
  }
  return t.shape;
}

/** Derive architecture dims purely from mapped tensor shapes. */
export function inferDims(tensors: TensorMap, mapped?: MappedCheckpoint, source?: TensorMap): ModelDims {
  const embed1 = shapeOf(tensors, "embed.conv1.weight", mapped, source);
  if (embed1.length !== 3) {
    throw new Error(
      `embed.conv1.weight must be rank 3 (out, in, k), got [${embed1.join(", ")}]`,
    );
  }
  const dModel = embed1[0];
  const nMels = embed1[1];
  let nLayers = 0;
  while (tensors.has(`blocks.${nLayers}.dw.weight`)) nLayers++;
  if (nLayers === 0) {
    throw new Error("checkpoint has no blocks.* tensors; cannot infer layer count");
  }
  const dw = shapeOf(tensors, "blocks.0.dw.weight", mapped, source);
  const pw1 = shapeOf(tensors, "blocks.0.pw1.weight", mapped, source);
  const head = shapeOf(tensors, "head.weight", mapped, source);
  const expand = pw1[0] / dModel;
  if (!Number.isInteger(expand) || expand < 1) {
    throw new Error(
      `pw1 output width ${pw1[0]} is not an integer multiple of d_model ${dModel}`,
    );
  }
  return {
    nMels,
    dModel,
    nLayers,
    dwKernel: dw[dw.length - 1],
    expand,
    nBins: head[0],
    useHarmonicEmb: tensors.has("harmonic.embed"),
  };
}

/** Tensor names and shapes the engine requires for these dims. */
export function requiredShapes(dims: ModelDims): Map<string, number[]> {
  const { dModel: d, expand, dwKernel: k } = dims;
  const e = expand * d;
  const shapes = new Map<string, number[]>([
    ["embed.conv1.weight", [d, dims.nMels, 3]],
    ["embed.conv1.bias", [d]],
    ["embed.conv2.weight", [d, d, 3]],
    ["embed.conv2.bias", [d]],
    ["head.weight", [dims.nBins, d]],
    ["head.bias", [dims.nBins]],
  ]);
  if (dims.useHarmonicEmb) shapes.set("harmonic.embed", [d]);
  for (let i = 0; i < dims.nLayers; i++) {
    const p = `blocks.${i}.`;
    shapes.set(p + "norm.gamma", [d]);
    shapes.set(p + "norm.beta", [d]);
    shapes.set(p + "pw1.weight", [e, d]);
    shapes.set(p + "pw1.bias", [e]);
    shapes.set(p + "dw.weight", [e, k]);
    shapes.set(p + "dw.bias", [e]);
    shapes.set(p + "pw2.weight", [d, e]);
    shapes.set(p + "pw2.bias", [d]);
  }
  return shapes;
}

/** Hard failure if any required tensor is absent or mis-shaped; candidates
 *  among unmapped source tensors are listed by matching element count. */
export function validateComplete(
  mapped: MappedCheckpoint,
  dims: ModelDims,
  source: TensorMap,
): void {
  const problems: string[] = [];
  for (const [name, shape] of requiredShapes(dims)) {
    const have = mapped.tensors.get(name);
    if (!have) {
      const want = tensorCount(shape);
      const candidates = mapped.unmapped.filter(
        (u) => tensorCount(source.get(u)!.shape) === want,
      );
      problems.push(
        `missing ${name} (shape [${shape.join(", ")}])` +
          (candidates.length ? `; unmapped candidates by size: ${candidates.join(", ")}` : ""),
      );
      continue;
    }
    if (have.shape.length !== shape.length || have.shape.some((v, i) => v !== shape[i])) {
      problems.push(
        `${name}: expected shape [${shape.join(", ")}], found [${have.shape.join(", ")}]`,
      );
    }
  }
  if (problems.length) {
    throw new Error(`conversion failed:\n  ${problems.join("\n  ")}`);
  }
}
