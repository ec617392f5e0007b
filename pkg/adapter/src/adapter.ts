/**
 * Stream exporter: runs the three perception models over a video and emits
 * the interchange files the analysis pipeline consumes.
 *
 * Output files are written atomically (temp name, then rename, only after
 * every stream rendered successfully), so a failed run leaves nothing
 * behind.
 */

import { promises as fs } from 'node:fs';
import * as path from 'node:path';

import { defaultModels, Frame, ModelBundle } from './models.js';
import { encodeRle } from './rle.js';
import { detectionLine, maskLine, phaseHeader, phaseLine } from './writer.js';
import { parseY4m } from './y4m.js';

export interface AdapterConfig {
  videoPath: string;
  outDir: string;
  /** Emit every stride-th frame (>= 1). Phase rows follow the same stride. */
  stride?: number;
  models?: ModelBundle;
}

export interface ExportResult {
  masksPath: string;
  detectionsPath: string;
  phasePath: string;
  frameCount: number;
  emittedFrames: number;
  width: number;
  height: number;
}

export async function exportStreams(config: AdapterConfig): Promise<ExportResult> {
  const stride = config.stride ?? 1;
  if (!Number.isInteger(stride) || stride < 1) {
    throw new Error(`stride must be a positive integer, got ${stride}`);
  }
  const models = config.models ?? defaultModels();
  const data = await fs.readFile(config.videoPath);
  const video = parseY4m(data);

  const masks: string[] = [];
  const detections: string[] = [];
  const phase: string[] = [phaseHeader()];
  let emitted = 0;
  for (let index = 0; index < video.frames.length; index += stride) {
    const frame: Frame = {
      luma: video.frames[index],
      width: video.width,
      height: video.height,
    };
    phase.push(phaseLine(index, models.phase.probability(frame)));
    const { lens, pupil } = models.segmentation.masks(frame);
    masks.push(
      maskLine({
        frame: index,
        classLabel: 'lens',
        width: video.width,
        height: video.height,
        rle: encodeRle(lens),
      }),
    );
    masks.push(
      maskLine({
        frame: index,
        classLabel: 'pupil',
        width: video.width,
        height: video.height,
        rle: encodeRle(pupil),
      }),
    );
    for (const det of models.detection.detections(frame)) {
      detections.push(detectionLine(index, det));
    }
    emitted++;
  }

  await fs.mkdir(config.outDir, { recursive: true });
  const targets = {
    masksPath: path.join(config.outDir, 'masks.jsonl'),
    detectionsPath: path.join(config.outDir, 'detections.jsonl'),
    phasePath: path.join(config.outDir, 'phase.csv'),
  };
  await writeAtomically([
    [targets.masksPath, masks.join('')],
    [targets.detectionsPath, detections.join('')],
    [targets.phasePath, phase.join('')],
  ]);
  return {
    ...targets,
    frameCount: video.frames.length,
    emittedFrames: emitted,
    width: video.width,
    height: video.height,
  };
}

async function writeAtomically(files: [string, string][]): Promise<void> {
  const temps: string[] = [];
  try {
    for (const [target, content] of files) {
      const tmp = `${target}.tmp-${process.pid}`;
      await fs.writeFile(tmp, content);
      temps.push(tmp);
    }
    for (let i = 0; i < files.length; i++) {
      await fs.rename(temps[i], files[i][0]);
    }
  } catch (err) {
    await Promise.allSettled(temps.map((t) => fs.unlink(t)));
    throw err;
  }
}
