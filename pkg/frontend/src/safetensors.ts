import { readFileSync } from "node:fs";

import { TensorEntry, TensorMap, tensorCount } from "./types.js";

export interface SafetensorsFile {
  tensors: TensorMap;
  metadata: Record<string, string>;
}

interface HeaderEntry {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

/**
 * Read a safetensors checkpoint into a flat name -> tensor map.
 * Only F32 tensors are supported; anything else is a hard error.
 */
export function readSafetensors(path: string): SafetensorsFile {
  const raw = readFileSync(path);
  if (raw.byteLength < 8) {
    throw new Error(`${path}: truncated safetensors file`);
  }
  const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
  const headerLen = Number(view.getBigUint64(0, true));
  if (8 + headerLen > raw.byteLength) {
    throw new Error(`${path}: header length ${headerLen} exceeds file size`);
  }
  const headerText = raw.subarray(8, 8 + headerLen).toString("utf-8");
  let header: Record<string, HeaderEntry | Record<string, string>>;
  try {
    header = JSON.parse(headerText);
  } catch (err) {
    throw new Error(`${path}: unparseable safetensors header: ${err}`);
  }
  const dataStart = 8 + headerLen;
  const tensors: TensorMap = new Map();
  let metadata: Record<string, string> = {};
  for (const [name, entry] of Object.entries(header)) {
    if (name === "__metadata__") {
      metadata = entry as Record<string, string>;
      continue;
    }
    const { dtype, shape, data_offsets } = entry as HeaderEntry;
    if (dtype !== "F32") {
      throw new Error(`${path}: tensor ${name} has unsupported dtype ${dtype}`);
    }
    const [begin, end] = data_offsets;
    const expected = 4 * tensorCount(shape);
    if (end - begin !== expected) {
      throw new Error(
        `${path}: tensor ${name} payload is ${end - begin} bytes, expected ${expected}`,
      );
    }
    if (dataStart + end > raw.byteLength) {
      throw new Error(`${path}: tensor ${name} extends past end of file`);
    }
    // copy so the data is aligned and detached from the file buffer
    const bytes = raw.subarray(dataStart + begin, dataStart + end);
    const data = new Float32Array(expected / 4);
    new Uint8Array(data.buffer).set(bytes);
    tensors.set(name, { shape: [...shape], data });
  }
  return { tensors, metadata };
}

export function tensorBytes(entry: TensorEntry): Uint8Array {
  return new Uint8Array(entry.data.buffer, entry.data.byteOffset, entry.data.byteLength);
}
