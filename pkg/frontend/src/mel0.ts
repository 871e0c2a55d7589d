import { readFileSync, writeFileSync } from "node:fs";

const MAGIC = "MEL0";

export interface Matrix {
  rows: number;
  cols: number;
  data: Float64Array; // row-major
}

/** Raw-matrix debug format: 16-byte header (magic, u32 rows, u32 cols,
 *  u32 reserved) followed by row-major little-endian float32 data. */
export function writeMel0(path: string, m: Matrix): void {
  const out = Buffer.alloc(16 + 4 * m.rows * m.cols);
  out.write(MAGIC, 0, "ascii");
  out.writeUInt32LE(m.rows, 4);
  out.writeUInt32LE(m.cols, 8);
  out.writeUInt32LE(0, 12);
  for (let i = 0; i < m.rows * m.cols; i++) {
    out.writeFloatLE(Math.fround(m.data[i]), 16 + 4 * i);
  }
  writeFileSync(path, out);
}

export function readMel0(path: string): Matrix {
  const raw = readFileSync(path);
  if (raw.byteLength < 16 || raw.subarray(0, 4).toString("ascii") !== MAGIC) {
    throw new Error(`${path}: not a raw-matrix dump`);
  }
  const rows = raw.readUInt32LE(4);
  const cols = raw.readUInt32LE(8);
  if (raw.byteLength < 16 + 4 * rows * cols) {
    throw new Error(`${path}: truncated raw-matrix payload`);
  }
  const data = new Float64Array(rows * cols);
  for (let i = 0; i < rows * cols; i++) {
    data[i] = raw.readFloatLE(16 + 4 * i);
  }
  return { rows, cols, data };
}

export function maxAbsDiff(a: Matrix, b: Matrix): number {
  if (a.rows !== b.rows || a.cols !== b.cols) {
    throw new Error(
      `matrix shapes differ: ${a.rows}x${a.cols} vs ${b.rows}x${b.cols}`,
    );
  }
  let worst = 0;
  for (let i = 0; i < a.data.length; i++) {
    const d = Math.abs(a.data[i] - b.data[i]);
    if (d > worst) worst = d;
  }
  return worst;
}
