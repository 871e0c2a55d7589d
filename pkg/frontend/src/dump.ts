import { loadMappingFile } from "./convert.js";
import { logMel } from "./dsp.js";
import { inferDims, mapTensorNames, validateComplete } from "./mapping.js";
import { writeMel0 } from "./mel0.js";
import { forward } from "./network.js";
import { readSafetensors } from "./safetensors.js";
import { DEFAULT_MEL, MelSettings } from "./types.js";
import { readWav } from "./wav.js";

export interface DumpResult {
  melPath: string;
  yPath: string;
  frames: number;
}

/**
 * Run the bundled reference model on a WAV and write both the mel input
 * (``<out>.mel``, T x n_mels) and the probability output (``<out>.y``,
 * T x n_bins) in the raw-matrix debug format, for cross-validation against
 * the engine.  Pure float64 math: same WAV in, same bytes out.
 */
export function dumpActivations(
  checkpointPath: string,
  wavPath: string,
  outBase: string,
  mappingPath?: string,
): DumpResult {
  const mappingFile = loadMappingFile(mappingPath);
  const { tensors: source } = readSafetensors(checkpointPath);
  const mapped = mapTensorNames(source, mappingFile.rename);
  const dims = inferDims(mapped.tensors, mapped, source);
  validateComplete(mapped, dims, source);

  const audio = readWav(wavPath);
  const mel: MelSettings = { ...DEFAULT_MEL, nMels: dims.nMels };
  if (audio.sampleRate !== mel.sampleRate) {
    throw new Error(
      `${wavPath} is ${audio.sampleRate} Hz but the model expects ${mel.sampleRate} Hz; ` +
        `resample the file first (e.g. with the engine's frontend)`,
    );
  }
  const melMatrix = logMel(audio.samples, mel);
  const probs = forward(dims, mapped.tensors, melMatrix);

  const melPath = `${outBase}.mel`;
  const yPath = `${outBase}.y`;
  writeMel0(melPath, melMatrix);
  writeMel0(yPath, probs);
  return { melPath, yPath, frames: probs.rows };
}
