/**
 * Minimal YUV4MPEG2 reader: header tokens W/H/F/C plus FRAME-delimited
 * planar payloads. Only the frames the schedule asks for are decoded.
 */

export class Y4mParseError extends Error {
  constructor(message: string, readonly offset: number) {
    super(`${message} (byte offset ${offset})`);
  }
}

export class UnsupportedFormatError extends Error {}

export class TruncatedStreamError extends Error {
  constructor(message: string, readonly frameIndex: number) {
    super(`${message} (frame ${frameIndex})`);
  }
}

export type Colorspace = 'yuv420' | 'yuv444';

export interface Y4mVideo {
  width: number;
  height: number;
  fpsNum: number;
  fpsDen: number;
  colorspace: Colorspace;
  frameCount: number;
  frameOffsets: number[];
  data: Buffer;
}

export interface YuvFrame {
  index: number;
  y: Uint8Array;
  u: Uint8Array;
  v: Uint8Array;
}

const MAGIC = 'YUV4MPEG2';

const COLORSPACES: Record<string, Colorspace> = {
  '420': 'yuv420',
  '420jpeg': 'yuv420',
  '420mpeg2': 'yuv420',
  '420paldv': 'yuv420',
  '444': 'yuv444',
};

export function frameByteSize(width: number, height: number, cs: Colorspace): number {
  const luma = width * height;
  return cs === 'yuv420' ? luma + 2 * ((width / 2) * (height / 2)) : 3 * luma;
}

export function parseY4m(data: Buffer): Y4mVideo {
  const headerEnd = data.indexOf(0x0a);
  if (headerEnd < 0) throw new Y4mParseError('unterminated stream header', 0);
  const tokens = data.subarray(0, headerEnd).toString('ascii').split(' ');
  if (tokens[0] !== MAGIC) {
    throw new Y4mParseError(`bad magic ${JSON.stringify(tokens[0])}`, 0);
  }
  let width = 0;
  let height = 0;
  let fpsNum = 0;
  let fpsDen = 0;
  let cs = '420';
  for (const token of tokens.slice(1)) {
    if (!token) continue;
    const value = token.slice(1);
    switch (token[0]) {
      case 'W': width = Number(value); break;
      case 'H': height = Number(value); break;
      case 'F': {
        const [n, d] = value.split(':').map(Number);
        fpsNum = n;
        fpsDen = d;
        break;
      }
      case 'C': cs = value; break;
    }
  }
  if (!width || !height || !fpsNum || !fpsDen) {
    throw new Y4mParseError('header missing W, H or F token', 0);
  }
  const colorspace = COLORSPACES[cs];
  if (!colorspace) throw new UnsupportedFormatError(`unsupported Y4M colorspace C${cs}`);

  const payload = frameByteSize(width, height, colorspace);
  const offsets: number[] = [];
  let pos = headerEnd + 1;
  while (pos < data.length) {
    const lineEnd = data.indexOf(0x0a, pos);
    if (lineEnd < 0 || data.subarray(pos, pos + 5).toString('ascii') !== 'FRAME') {
      throw new Y4mParseError('expected FRAME marker', pos);
    }
    const start = lineEnd + 1;
    if (start + payload > data.length) {
      throw new TruncatedStreamError('frame payload truncated', offsets.length);
    }
    offsets.push(start);
    pos = start + payload;
  }
  if (offsets.length === 0) throw new TruncatedStreamError('stream has no frames', 0);
  return {
    width,
    height,
    fpsNum,
    fpsDen,
    colorspace,
    frameCount: offsets.length,
    frameOffsets: offsets,
    data,
  };
}

export function decodeFrame(video: Y4mVideo, index: number): YuvFrame {
  const { width, height, colorspace } = video;
  const start = video.frameOffsets[index];
  const luma = width * height;
  const chroma = colorspace === 'yuv420' ? (width / 2) * (height / 2) : luma;
  const y = video.data.subarray(start, start + luma);
  const u = video.data.subarray(start + luma, start + luma + chroma);
  const v = video.data.subarray(start + luma + chroma, start + luma + 2 * chroma);
  return { index, y, u, v };
}
