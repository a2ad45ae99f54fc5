#!/usr/bin/env node
/**
 * CLI for the deep-feature sidecar extractor.
 *
 * Exit codes: 0 success; 2 usage; 3 malformed/unsupported input;
 * 4 video too short; 1 anything else.
 */

import { parseArgs } from 'node:util';

import { DEFAULT_MODEL_URL } from './backbone.js';
import { extract } from './extract.js';
import type { PreprocessMode } from './image.js';
import { TooShortError } from './schedule.js';
import { TruncatedStreamError, UnsupportedFormatError, Y4mParseError } from './y4m.js';

const USAGE = `usage: vqkit-deep-extract --input <video.y4m> --output <features.dfv>
         [--model <model.json path or URL>] [--preprocess unit|imagenet-torch|imagenet-caffe|raw]
         [--fps-policy chunk-start] [--batch-size N] [--no-deterministic]`;

async function main(argv: string[]): Promise<number> {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        input: { type: 'string' },
        output: { type: 'string' },
        model: { type: 'string', default: DEFAULT_MODEL_URL },
        preprocess: { type: 'string', default: 'unit' },
        'fps-policy': { type: 'string', default: 'chunk-start' },
        'batch-size': { type: 'string', default: '8' },
        deterministic: { type: 'boolean', default: true },
        'no-deterministic': { type: 'boolean', default: false },
        help: { type: 'boolean', default: false },
      },
    });
  } catch (err) {
    console.error(`error class=UsageError msg=${JSON.stringify(String(err))}`);
    console.error(USAGE);
    return 2;
  }
  const values = args.values;
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (!values.input || !values.output) {
    console.error('error class=UsageError msg="--input and --output are required"');
    console.error(USAGE);
    return 2;
  }
  if (values['fps-policy'] !== 'chunk-start') {
    console.error(`error class=UsageError msg="unsupported --fps-policy ${values['fps-policy']}"`);
    return 2;
  }
  try {
    const manifest = await extract({
      input: values.input,
      output: values.output,
      modelPath: values.model,
      preprocess: values.preprocess as PreprocessMode,
      batchSize: Number(values['batch-size']),
      deterministic: !values['no-deterministic'],
    });
    console.log(`wrote ${manifest.output_path} (${manifest.rows} rows x ${manifest.dim})`);
    return 0;
  } catch (err) {
    const name = err instanceof Error ? err.constructor.name : 'Error';
    console.error(`error class=${name} msg=${JSON.stringify(String(err))}`);
    if (err instanceof Y4mParseError || err instanceof UnsupportedFormatError
        || err instanceof TruncatedStreamError) {
      return 3;
    }
    if (err instanceof TooShortError) return 4;
    return 1;
  }
}

main(process.argv.slice(2)).then((code) => {
  process.exitCode = code;
});
