import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

import { writeArchive } from "./archive.js";
import { MappingFile, inferDims, mapTensorNames, validateComplete } from "./mapping.js";
import { readSafetensors } from "./safetensors.js";
import { ConversionManifest, DEFAULT_MEL, MelSettings, ModelDims } from "./types.js";

export const EXPECTED_BINS = 360;

export function loadMappingFile(path?: string): MappingFile {
  if (!path) return {};
  return JSON.parse(readFileSync(path, "utf-8")) as MappingFile;
}

export function dimsMetadata(dims: ModelDims): Record<string, string> {
  return {
    "model.n_mels": String(dims.nMels),
    "model.d_model": String(dims.dModel),
    "model.n_layers": String(dims.nLayers),
    "model.dw_kernel": String(dims.dwKernel),
    "model.expand": String(dims.expand),
    "model.use_harmonic_emb": dims.useHarmonicEmb ? "1" : "0",
    "model.n_bins": String(dims.nBins),
  };
}

export function melMetadata(mel: MelSettings): Record<string, string> {
  return {
    "mel.sample_rate": String(mel.sampleRate),
    "mel.n_fft": String(mel.nFft),
    "mel.hop": String(mel.hop),
    "mel.n_mels": String(mel.nMels),
    "mel.f_min": mel.fMin.toFixed(1),
    "mel.f_max": mel.fMax.toFixed(1),
    "mel.log_floor": "1e-05",
    "mel.spectrum": "magnitude",
    "mel.scale": "htk",
    "mel.log": "natural",
  };
}

/**
 * Convert a flat safetensors checkpoint into the engine's weight archive.
 *
 * Tensor payloads are copied byte-for-byte; architecture dims are inferred
 * from shapes and embedded as metadata together with the mel convention
 * (defaults unless the mapping file overrides them) and the source hash.
 * Unmapped source tensors are reported in the manifest, never dropped
 * silently.
 */
export function convert(
  checkpointPath: string,
  outArchivePath: string,
  mappingPath?: string,
): ConversionManifest {
  const mappingFile = loadMappingFile(mappingPath);
  const { tensors: source } = readSafetensors(checkpointPath);
  const mapped = mapTensorNames(source, mappingFile.rename);
  const dims = inferDims(mapped.tensors, mapped, source);

  const expectBins = mappingFile.expectBins ?? EXPECTED_BINS;
  if (dims.nBins !== expectBins) {
    throw new Error(
      `head tensor is sized for ${dims.nBins} pitch bins, expected ${expectBins}`,
    );
  }
  validateComplete(mapped, dims, source);

  const sourceSha256 = createHash("sha256").update(readFileSync(checkpointPath)).digest("hex");
  const mel: MelSettings = { ...DEFAULT_MEL, nMels: dims.nMels };
  const metadata: Record<string, string> = {
    ...melMetadata(mel),
    ...dimsMetadata(dims),
    "source.sha256": sourceSha256,
    "source.format": "safetensors",
    ...(mappingFile.metadata ?? {}),
  };
  writeArchive(outArchivePath, mapped.tensors, metadata);
  return { mappings: mapped.mappings, dims, sourceSha256, unmapped: mapped.unmapped };
}

export function formatManifest(manifest: ConversionManifest): string {
  const lines = [
    `source sha256: ${manifest.sourceSha256}`,
    `dims: d_model=${manifest.dims.dModel} n_layers=${manifest.dims.nLayers} ` +
      `dw_kernel=${manifest.dims.dwKernel} expand=${manifest.dims.expand} ` +
      `n_mels=${manifest.dims.nMels} n_bins=${manifest.dims.nBins} ` +
      `harmonic_emb=${manifest.dims.useHarmonicEmb}`,
    `mapped tensors: ${manifest.mappings.length}`,
  ];
  for (const m of manifest.mappings) {
    lines.push(`  ${m.source} -> ${m.target} [${m.shape.join(", ")}]`);
  }
  if (manifest.unmapped.length) {
    lines.push(`unmapped source tensors (${manifest.unmapped.length}):`);
    for (const u of manifest.unmapped) lines.push(`  ${u}`);
  } else {
    lines.push("unmapped source tensors: none");
  }
  return lines.join("\n");
}
