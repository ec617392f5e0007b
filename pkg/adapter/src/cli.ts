#!/usr/bin/env node
/**
 * iolens-export [export] --video FILE.y4m --out DIR [--stride N]
 *
 * Runs the perception models over the video and writes masks.jsonl,
 * detections.jsonl, and phase.csv into DIR.
 */

import { exportStreams } from './adapter.js';

function parseArgs(argv: string[]): { video: string; out: string; stride: number } {
  const args = argv[0] === 'export' ? argv.slice(1) : argv;
  let video = '';
  let out = '';
  let stride = 1;
  for (let i = 0; i < args.length; i++) {
    switch (args[i]) {
      case '--video':
        video = args[++i] ?? '';
        break;
      case '--out':
        out = args[++i] ?? '';
        break;
      case '--stride':
        stride = parseInt(args[++i] ?? '', 10);
        break;
      default:
        throw new Error(`unknown argument ${args[i]}`);
    }
  }
  if (!video || !out) throw new Error('usage: iolens-export --video FILE.y4m --out DIR [--stride N]');
  return { video, out, stride };
}

async function main(): Promise<number> {
  let opts;
  try {
    opts = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const result = await exportStreams({
      videoPath: opts.video,
      outDir: opts.out,
      stride: opts.stride,
    });
    console.log(JSON.stringify(result, null, 1));
    return 0;
  } catch (err) {
    console.error(`export failed: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
