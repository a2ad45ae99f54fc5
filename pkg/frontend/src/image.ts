/**
 * Frame preparation for the backbone: BT.601 full-range YUV -> RGB, then a
 * non-aspect-preserving bilinear resize to the model's 224x224 input, then
 * channel normalization.
 */

import type { YuvFrame, Colorspace } from './y4m.js';

export const MODEL_SIZE = 224;

export type PreprocessMode = 'imagenet-torch' | 'imagenet-caffe' | 'unit' | 'raw';

export const IMAGENET_MEAN = [0.485, 0.456, 0.406];
export const IMAGENET_STD = [0.229, 0.224, 0.225];
const CAFFE_BGR_MEAN = [103.939, 116.779, 123.68];

const KR = 0.299;
const KG = 0.587;
const KB = 0.114;

function clamp255(x: number): number {
  return x < 0 ? 0 : x > 255 ? 255 : x;
}

/** Planar YUV frame to interleaved RGB float [0,255] at source resolution. */
export function yuvToRgb(frame: YuvFrame, width: number, height: number,
                         colorspace: Colorspace): Float32Array {
  const out = new Float32Array(width * height * 3);
  const half = colorspace === 'yuv420';
  const cw = half ? width / 2 : width;
  for (let row = 0; row < height; row++) {
    const crow = half ? row >> 1 : row;
    for (let col = 0; col < width; col++) {
      const ccol = half ? col >> 1 : col;
      const y = frame.y[row * width + col];
      const cb = frame.u[crow * cw + ccol] - 128;
      const cr = frame.v[crow * cw + ccol] - 128;
      const i = (row * width + col) * 3;
      out[i] = clamp255(y + 2 * (1 - KR) * cr);
      out[i + 1] = clamp255(y - (2 * KR * (1 - KR) / KG) * cr - (2 * KB * (1 - KB) / KG) * cb);
      out[i + 2] = clamp255(y + 2 * (1 - KB) * cb);
    }
  }
  return out;
}

/** Bilinear stretch to size x size, ignoring aspect ratio. */
export function resizeBilinear(rgb: Float32Array, width: number, height: number,
                               size: number = MODEL_SIZE): Float32Array {
  const out = new Float32Array(size * size * 3);
  const sx = width / size;
  const sy = height / size;
  for (let row = 0; row < size; row++) {
    let fy = (row + 0.5) * sy - 0.5;
    fy = fy < 0 ? 0 : fy > height - 1 ? height - 1 : fy;
    const y0 = Math.floor(fy);
    const y1 = Math.min(y0 + 1, height - 1);
    const wy = fy - y0;
    for (let col = 0; col < size; col++) {
      let fx = (col + 0.5) * sx - 0.5;
      fx = fx < 0 ? 0 : fx > width - 1 ? width - 1 : fx;
      const x0 = Math.floor(fx);
      const x1 = Math.min(x0 + 1, width - 1);
      const wx = fx - x0;
      for (let ch = 0; ch < 3; ch++) {
        const p00 = rgb[(y0 * width + x0) * 3 + ch];
        const p01 = rgb[(y0 * width + x1) * 3 + ch];
        const p10 = rgb[(y1 * width + x0) * 3 + ch];
        const p11 = rgb[(y1 * width + x1) * 3 + ch];
        const top = p00 + (p01 - p00) * wx;
        const bottom = p10 + (p11 - p10) * wx;
        out[(row * size + col) * 3 + ch] = top + (bottom - top) * wy;
      }
    }
  }
  return out;
}

/** In-place channel normalization for the chosen preprocessing convention. */
export function normalize(pixels: Float32Array, mode: PreprocessMode): Float32Array {
  switch (mode) {
    case 'raw':
      return pixels;
    case 'unit':
      for (let i = 0; i < pixels.length; i++) pixels[i] /= 255;
      return pixels;
    case 'imagenet-torch':
      for (let i = 0; i < pixels.length; i += 3) {
        for (let ch = 0; ch < 3; ch++) {
          pixels[i + ch] = (pixels[i + ch] / 255 - IMAGENET_MEAN[ch]) / IMAGENET_STD[ch];
        }
      }
      return pixels;
    case 'imagenet-caffe':
      for (let i = 0; i < pixels.length; i += 3) {
        const r = pixels[i];
        const g = pixels[i + 1];
        const b = pixels[i + 2];
        pixels[i] = b - CAFFE_BGR_MEAN[0];
        pixels[i + 1] = g - CAFFE_BGR_MEAN[1];
        pixels[i + 2] = r - CAFFE_BGR_MEAN[2];
      }
      return pixels;
  }
}
