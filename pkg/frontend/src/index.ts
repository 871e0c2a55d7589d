export { readSafetensors, tensorBytes } from "./safetensors.js";
export { readArchive, writeArchive } from "./archive.js";
export { maxAbsDiff, readMel0, writeMel0 } from "./mel0.js";
export type { Matrix } from "./mel0.js";
export { readWav } from "./wav.js";
export { fft, hannPeriodic, hzToMel, logMel, melFilterbank, melToHz, reflectPad, stftMagnitude } from "./dsp.js";
export { forward } from "./network.js";
export {
  inferDims,
  mapTensorNames,
  requiredShapes,
  validateComplete,
} from "./mapping.js";
export type { MappedCheckpoint, MappingFile } from "./mapping.js";
export { EXPECTED_BINS, convert, formatManifest, loadMappingFile } from "./convert.js";
export { dumpActivations } from "./dump.js";
export type { DumpResult } from "./dump.js";
export * from "./types.js";
