/**
 * Offline sidecar extraction: decode the chunk-start frame of every
 * scheduled one-second chunk, resize to the backbone input, run inference,
 * and write one DFV1 row per chunk plus a JSON manifest describing exactly
 * how the rows were produced.
 */

import { promises as fs } from 'node:fs';
import * as tf from '@tensorflow/tfjs';

import { Backbone, loadBackbone } from './backbone.js';
import { encodeDfv } from './dfv.js';
import {
  IMAGENET_MEAN,
  IMAGENET_STD,
  MODEL_SIZE,
  PreprocessMode,
  normalize,
  resizeBilinear,
  yuvToRgb,
} from './image.js';
import { chunkStartFrames } from './schedule.js';
import { decodeFrame, parseY4m } from './y4m.js';

export interface ExtractOptions {
  input: string;
  output: string;
  /** Already-loaded backbone; takes precedence over modelPath. */
  backbone?: Backbone;
  /** model.json path or URL; used when no backbone instance is given. */
  modelPath?: string;
  preprocess?: PreprocessMode;
  batchSize?: number;
  deterministic?: boolean;
  fpsPolicy?: 'chunk-start';
}

export interface ExtractionManifest {
  video_path: string;
  frame_indices: number[];
  resize: { width: number; height: number; mode: string };
  backbone: string;
  preprocess: string;
  normalization: { mean: number[]; std: number[] } | null;
  output_path: string;
  rows: number;
  dim: number;
  backend: string;
  deterministic: boolean;
  fps_policy: string;
}

export async function extract(options: ExtractOptions): Promise<ExtractionManifest> {
  const fpsPolicy = options.fpsPolicy ?? 'chunk-start';
  if (fpsPolicy !== 'chunk-start') {
    throw new Error(`unsupported fps policy ${fpsPolicy}`);
  }
  const preprocess = options.preprocess ?? 'unit';
  const deterministic = options.deterministic ?? true;
  if (deterministic) {
    await tf.setBackend('cpu');
  }
  await tf.ready();

  const video = parseY4m(await fs.readFile(options.input));
  const indices = chunkStartFrames(video);

  let backbone = options.backbone;
  let ownsBackbone = false;
  if (!backbone) {
    if (!options.modelPath) throw new Error('no backbone model given');
    backbone = await loadBackbone(options.modelPath);
    ownsBackbone = true;
  }

  const batchSize = options.batchSize ?? 8;
  const rows: Float32Array[] = [];
  let dim = 0;
  try {
    for (let at = 0; at < indices.length; at += batchSize) {
      const slice = indices.slice(at, at + batchSize);
      const pixels = slice.map((idx) => {
        const frame = decodeFrame(video, idx);
        const rgb = yuvToRgb(frame, video.width, video.height, video.colorspace);
        return normalize(resizeBilinear(rgb, video.width, video.height), preprocess);
      });
      const batch = tf.tensor4d(
        concat(pixels), [slice.length, MODEL_SIZE, MODEL_SIZE, 3]);
      const features = backbone.run(batch);
      const data = await features.data();
      dim = features.shape[1];
      for (let r = 0; r < slice.length; r++) {
        rows.push(new Float32Array(data.subarray(r * dim, (r + 1) * dim)));
      }
      batch.dispose();
      features.dispose();
    }
  } finally {
    if (ownsBackbone) backbone.dispose();
  }

  await fs.writeFile(options.output, encodeDfv(rows, dim));
  const manifest: ExtractionManifest = {
    video_path: options.input,
    frame_indices: indices,
    resize: { width: MODEL_SIZE, height: MODEL_SIZE, mode: 'bilinear-stretch' },
    backbone: backbone.name,
    preprocess,
    normalization: preprocess === 'imagenet-torch'
      ? { mean: IMAGENET_MEAN, std: IMAGENET_STD }
      : null,
    output_path: options.output,
    rows: rows.length,
    dim,
    backend: tf.getBackend(),
    deterministic,
    fps_policy: fpsPolicy,
  };
  await fs.writeFile(`${options.output}.manifest.json`, JSON.stringify(manifest, null, 2) + '\n');
  return manifest;
}

function concat(parts: Float32Array[]): Float32Array {
  const out = new Float32Array(parts.reduce((n, p) => n + p.length, 0));
  let pos = 0;
  for (const part of parts) {
    out.set(part, pos);
    pos += part.length;
  }
  return out;
}
