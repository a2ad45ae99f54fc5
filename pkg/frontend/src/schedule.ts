/**
 * Frame sampling schedule mirroring the feature extractor's chunking rule:
 * one chunk per whole second (length round(fps), ties to even); a chunk is
 * kept only if its 8-consecutive-frame temporal group fits in the stream;
 * the deep-feature stream takes the chunk-start frame.
 */

export class TooShortError extends Error {}

export interface VideoTiming {
  frameCount: number;
  fpsNum: number;
  fpsDen: number;
}

const TEMPORAL_GROUP = 8;

/** round() with ties to even, matching the extractor's chunk-length rule. */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  return x - floor === 0.5 ? (floor % 2 === 0 ? floor : floor + 1) : Math.round(x);
}

export function chunkStartFrames(timing: VideoTiming): number[] {
  const { frameCount, fpsNum, fpsDen } = timing;
  if (frameCount < TEMPORAL_GROUP) {
    throw new TooShortError(`need at least ${TEMPORAL_GROUP} frames, have ${frameCount}`);
  }
  if (frameCount * fpsDen < fpsNum) {
    throw new TooShortError('need at least one second of video');
  }
  const n = Math.max(1, roundHalfEven(fpsNum / fpsDen));
  const starts: number[] = [];
  for (let c = 0; c < Math.floor(frameCount / n); c++) {
    const s = c * n;
    if (s + TEMPORAL_GROUP > frameCount) break;
    starts.push(s);
  }
  if (starts.length === 0) {
    throw new TooShortError('no complete one-second chunk with an 8-frame group fits');
  }
  return starts;
}
