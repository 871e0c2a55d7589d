import { readFileSync } from "node:fs";

export interface AudioData {
  samples: Float64Array;
  sampleRate: number;
}

/**
 * Minimal RIFF/WAVE reader: 16-bit PCM or 32-bit IEEE float, mono or
 * stereo (stereo is averaged down).
 */
export function readWav(path: string): AudioData {
  const raw = readFileSync(path);
  if (
    raw.byteLength < 12 ||
    raw.subarray(0, 4).toString("ascii") !== "RIFF" ||
    raw.subarray(8, 12).toString("ascii") !== "WAVE"
  ) {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }
  let pos = 12;
  let fmt: Buffer | null = null;
  let data: Buffer | null = null;
  while (pos + 8 <= raw.byteLength) {
    const id = raw.subarray(pos, pos + 4).toString("ascii");
    const size = raw.readUInt32LE(pos + 4);
    const body = raw.subarray(pos + 8, pos + 8 + size);
    if (body.byteLength < size) {
      throw new Error(`${path}: file ended inside ${id} chunk`);
    }
    if (id === "fmt ") fmt = body;
    if (id === "data") data = body;
    pos += 8 + size + (size % 2);
  }
  if (!fmt || !data) {
    throw new Error(`${path}: missing fmt or data chunk`);
  }
  let format = fmt.readUInt16LE(0);
  const channels = fmt.readUInt16LE(2);
  const sampleRate = fmt.readUInt32LE(4);
  const bits = fmt.readUInt16LE(14);
  if (format === 0xfffe && fmt.byteLength >= 26) {
    format = fmt.readUInt16LE(24);
  }

  let interleaved: Float64Array;
  if (format === 1 && bits === 16) {
    const n = Math.floor(data.byteLength / 2);
    interleaved = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      interleaved[i] = data.readInt16LE(2 * i) / 32768;
    }
  } else if (format === 3 && bits === 32) {
    const n = Math.floor(data.byteLength / 4);
    interleaved = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      interleaved[i] = data.readFloatLE(4 * i);
    }
  } else {
    throw new Error(
      `${path}: fmt chunk declares unsupported codec (format ${format}, ${bits}-bit)`,
    );
  }
  if (channels <= 1) {
    return { samples: interleaved, sampleRate };
  }
  const frames = Math.floor(interleaved.length / channels);
  const mono = new Float64Array(frames);
  for (let i = 0; i < frames; i++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) acc += interleaved[i * channels + c];
    mono[i] = acc / channels;
  }
  return { samples: mono, sampleRate };
}
