/**
 * Filesystem IO handler so the pure-JS TensorFlow.js runtime can load and
 * save models in Node without the native binding: model.json plus a single
 * binary weight shard next to it.
 */

import { promises as fs } from 'node:fs';
import * as path from 'node:path';
import type * as tfTypes from '@tensorflow/tfjs';

type IOHandler = tfTypes.io.IOHandler;
type ModelArtifacts = tfTypes.io.ModelArtifacts;

const WEIGHTS_FILE = 'weights.bin';

export function fileSystemIO(modelJsonPath: string): IOHandler {
  const dir = path.dirname(modelJsonPath);
  return {
    async load(): Promise<ModelArtifacts> {
      const doc = JSON.parse(await fs.readFile(modelJsonPath, 'utf-8'));
      const manifest = doc.weightsManifest ?? [];
      const specs = manifest.flatMap((group: any) => group.weights);
      const shards: Buffer[] = [];
      for (const group of manifest) {
        for (const rel of group.paths) {
          shards.push(await fs.readFile(path.join(dir, rel)));
        }
      }
      const weights = Buffer.concat(shards);
      return {
        modelTopology: doc.modelTopology,
        format: doc.format,
        generatedBy: doc.generatedBy,
        convertedBy: doc.convertedBy,
        weightSpecs: specs,
        weightData: weights.buffer.slice(
          weights.byteOffset, weights.byteOffset + weights.byteLength),
      };
    },
    async save(artifacts: ModelArtifacts) {
      await fs.mkdir(dir, { recursive: true });
      const weightData = artifacts.weightData as ArrayBuffer;
      await fs.writeFile(path.join(dir, WEIGHTS_FILE), Buffer.from(weightData));
      const doc = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        convertedBy: artifacts.convertedBy,
        weightsManifest: [{ paths: [WEIGHTS_FILE], weights: artifacts.weightSpecs }],
      };
      await fs.writeFile(modelJsonPath, JSON.stringify(doc));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON' as const,
        },
      };
    },
  };
}
