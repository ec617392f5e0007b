/**
 * Canonical serialization of the interchange streams.
 *
 * The byte format matches the analysis core's serializers exactly: compact
 * JSON with fixed key order, floats always carrying a decimal point, CSV
 * with the `frame,prob` header.
 */

import { Detection } from './models.js';

export interface MaskRecord {
  frame: number;
  classLabel: 'lens' | 'pupil';
  width: number;
  height: number;
  rle: number[];
}

export function maskLine(record: MaskRecord): string {
  const rle = record.rle.join(',');
  return (
    `{"frame":${record.frame},"class":"${record.classLabel}",` +
    `"w":${record.width},"h":${record.height},"rle":[${rle}]}\n`
  );
}

export function detectionLine(frame: number, det: Detection): string {
  const bbox = det.bbox.map(fmtFloat).join(',');
  return (
    `{"frame":${frame},"class":"${det.classLabel}",` +
    `"bbox":[${bbox}],"conf":${fmtFloat(det.confidence)}}\n`
  );
}

export function phaseHeader(): string {
  return 'frame,prob\n';
}

export function phaseLine(frame: number, prob: number): string {
  return `${frame},${fmtFloat(prob)}\n`;
}

/** Render a number the way Python's repr() renders the equivalent float. */
export function fmtFloat(v: number): string {
  if (Number.isInteger(v)) return `${v}.0`;
  return String(v);
}
