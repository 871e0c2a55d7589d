export interface TensorEntry {
  shape: number[];
  data: Float32Array;
}

export type TensorMap = Map<string, TensorEntry>;

/** Architecture dimensions, inferred from tensor shapes. */
export interface ModelDims {
  nMels: number;
  dModel: number;
  nLayers: number;
  dwKernel: number;
  expand: number;
  nBins: number;
  useHarmonicEmb: boolean;
}

export interface NameMapping {
  source: string;
  target: string;
  shape: number[];
}

export interface ConversionManifest {
  mappings: NameMapping[];
  dims: ModelDims;
  sourceSha256: string;
  unmapped: string[];
}

/** Mel frontend settings carried in archive metadata. */
export interface MelSettings {
  sampleRate: number;
  nFft: number;
  hop: number;
  nMels: number;
  fMin: number;
  fMax: number;
  logFloor: number;
}

export const DEFAULT_MEL: MelSettings = {
  sampleRate: 16000,
  nFft: 1024,
  hop: 160,
  nMels: 128,
  fMin: 0.0,
  fMax: 8000.0,
  logFloor: 1e-5,
};

export function tensorCount(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}
