/**
 * DFV1 sidecar writer/reader. Layout, all little-endian: magic "DFV1",
 * u32 row count, u32 dimension, then count*dim float32 values row-major.
 */

export class SidecarFormatError extends Error {}

const MAGIC = 'DFV1';
const HEADER_BYTES = 12;

export function encodeDfv(rows: Float32Array[], dim: number): Buffer {
  const out = Buffer.alloc(HEADER_BYTES + 4 * rows.length * dim);
  out.write(MAGIC, 0, 'ascii');
  out.writeUInt32LE(rows.length, 4);
  out.writeUInt32LE(dim, 8);
  let pos = HEADER_BYTES;
  for (const row of rows) {
    if (row.length !== dim) {
      throw new SidecarFormatError(`row has ${row.length} values, expected ${dim}`);
    }
    for (let i = 0; i < dim; i++) {
      out.writeFloatLE(row[i], pos);
      pos += 4;
    }
  }
  return out;
}

export function decodeDfv(data: Buffer): { count: number; dim: number; rows: Float32Array[] } {
  if (data.length < HEADER_BYTES) throw new SidecarFormatError('too short for a header');
  if (data.subarray(0, 4).toString('ascii') !== MAGIC) {
    throw new SidecarFormatError(`bad magic ${JSON.stringify(data.subarray(0, 4).toString('ascii'))}`);
  }
  const count = data.readUInt32LE(4);
  const dim = data.readUInt32LE(8);
  if (data.length !== HEADER_BYTES + 4 * count * dim) {
    throw new SidecarFormatError(`size ${data.length} disagrees with ${count}x${dim}`);
  }
  const rows: Float32Array[] = [];
  for (let r = 0; r < count; r++) {
    const row = new Float32Array(dim);
    for (let i = 0; i < dim; i++) {
      row[i] = data.readFloatLE(HEADER_BYTES + 4 * (r * dim + i));
    }
    rows.push(row);
  }
  return { count, dim, rows };
}
