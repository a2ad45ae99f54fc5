/**
 * Backbone loading and batched inference. Any TF.js graph or layers model
 * works as long as it maps [n, 224, 224, 3] to a feature row per input;
 * spatial outputs are global-average-pooled down to the per-frame vector.
 */

import * as tf from '@tensorflow/tfjs';
import { fileSystemIO } from './model_io.js';

/** Conventional 2048-wide ImageNet feature extractor; offline deployments
 *  pass a local model.json path instead. */
export const DEFAULT_MODEL_URL =
  'https://tfhub.dev/google/tfjs-model/imagenet/resnet_v2_50/feature_vector/3/default/1';

export type AnyModel = tf.LayersModel | tf.GraphModel;

export interface Backbone {
  name: string;
  run(batch: tf.Tensor4D): tf.Tensor2D;
  dispose(): void;
}

export async function loadBackbone(spec: string): Promise<Backbone> {
  let model: AnyModel;
  if (/^https?:\/\//.test(spec)) {
    model = await tf.loadGraphModel(spec, { fromTFHub: spec.includes('tfhub.dev') });
  } else {
    const handler = fileSystemIO(spec);
    try {
      model = await tf.loadGraphModel(handler);
    } catch {
      model = await tf.loadLayersModel(handler);
    }
  }
  return wrapModel(model, spec);
}

export function wrapModel(model: AnyModel, name: string): Backbone {
  return {
    name,
    run(batch: tf.Tensor4D): tf.Tensor2D {
      return tf.tidy(() => {
        let out = model.predict(batch) as tf.Tensor;
        if (Array.isArray(out)) out = out[0];
        if (out.rank === 4) out = tf.mean(out, [1, 2]);
        if (out.rank !== 2) {
          throw new Error(`backbone produced rank-${out.rank} output`);
        }
        return out as tf.Tensor2D;
      });
    },
    dispose() {
      model.dispose();
    },
  };
}
