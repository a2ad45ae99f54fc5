import { describe, expect, it } from 'vitest';

import { makeY4m, SHARED_CLIP } from './fixtures.js';
import {
  decodeFrame,
  parseY4m,
  TruncatedStreamError,
  UnsupportedFormatError,
  Y4mParseError,
} from '../src/y4m.js';

describe('parseY4m', () => {
  it('decodes header and counts frames', () => {
    const video = parseY4m(makeY4m(SHARED_CLIP));
    expect(video.width).toBe(64);
    expect(video.height).toBe(64);
    expect(video.fpsNum).toBe(25);
    expect(video.fpsDen).toBe(1);
    expect(video.colorspace).toBe('yuv420');
    expect(video.frameCount).toBe(50);
  });

  it('rejects a bad magic with its byte offset', () => {
    expect(() => parseY4m(Buffer.from('JUNKMPEG2 W64 H64 F25:1\n')))
      .toThrowError(Y4mParseError);
  });

  it('rejects unsupported chroma subsampling', () => {
    expect(() => parseY4m(Buffer.from('YUV4MPEG2 W64 H64 F25:1 C422\nFRAME\n')))
      .toThrowError(UnsupportedFormatError);
  });

  it('reports truncation with the frame index', () => {
    const whole = makeY4m({ ...SHARED_CLIP, frames: 3 });
    try {
      parseY4m(whole.subarray(0, whole.length - 10));
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(TruncatedStreamError);
      expect((err as TruncatedStreamError).frameIndex).toBe(2);
    }
  });

  it('decodes plane geometry for 4:2:0', () => {
    const video = parseY4m(makeY4m(SHARED_CLIP));
    const frame = decodeFrame(video, 1);
    expect(frame.y.length).toBe(64 * 64);
    expect(frame.u.length).toBe(32 * 32);
    expect(frame.v.length).toBe(32 * 32);
  });

  it('decodes frames independently of read order', () => {
    const video = parseY4m(makeY4m(SHARED_CLIP));
    const early = decodeFrame(video, 0);
    const late = decodeFrame(video, 25);
    expect(Buffer.compare(Buffer.from(early.y), Buffer.from(late.y))).not.toBe(0);
    const again = decodeFrame(video, 0);
    expect(Buffer.compare(Buffer.from(early.y), Buffer.from(again.y))).toBe(0);
  });
});
