/** Deterministic synthetic Y4M clips for the test suite. */

export interface ClipSpec {
  width: number;
  height: number;
  frames: number;
  fpsNum: number;
  fpsDen: number;
}

/** Small linear congruential generator so fixtures never change. */
function* lcg(seed: number): Generator<number> {
  let state = seed >>> 0;
  while (true) {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    yield state >>> 24;
  }
}

export function makeY4m(spec: ClipSpec, seed = 7): Buffer {
  const { width, height, frames, fpsNum, fpsDen } = spec;
  const header = Buffer.from(
    `YUV4MPEG2 W${width} H${height} F${fpsNum}:${fpsDen} C420\n`, 'ascii');
  const lumaBytes = width * height;
  const chromaBytes = (width / 2) * (height / 2);
  const frameBytes = lumaBytes + 2 * chromaBytes;
  const rng = lcg(seed);
  const parts: Buffer[] = [header];
  for (let f = 0; f < frames; f++) {
    parts.push(Buffer.from('FRAME\n', 'ascii'));
    const payload = Buffer.alloc(frameBytes);
    for (let i = 0; i < frameBytes; i++) {
      payload[i] = rng.next().value as number;
    }
    parts.push(payload);
  }
  return Buffer.concat(parts);
}

export const SHARED_CLIP: ClipSpec = {
  width: 64,
  height: 64,
  frames: 50,
  fpsNum: 25,
  fpsDen: 1,
};

/** Chunk count for SHARED_CLIP under the one-second chunking rule. */
export const SHARED_CLIP_CHUNKS = 2;
