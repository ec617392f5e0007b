/**
 * Perception model interfaces and the built-in heuristic implementations.
 *
 * Real deployments plug trained networks in behind these three interfaces.
 * The heuristics operate on luma alone (band thresholds plus connected
 * components), which is enough to drive the analysis pipeline on synthetic
 * or well-staged footage and to contract-test the export path where no
 * trained weights are available.
 */

export interface Frame {
  luma: Uint8Array;
  width: number;
  height: number;
}

export interface PhaseModel {
  /** Probability that the frame belongs to the implantation phase. */
  probability(frame: Frame): number;
}

export interface SegmentationModel {
  /** Binary masks for the lens and the pupil, row-major, same size as luma. */
  masks(frame: Frame): { lens: Uint8Array; pupil: Uint8Array };
}

export interface Detection {
  classLabel: 'lens' | 'hook';
  bbox: [number, number, number, number];
  confidence: number;
}

export interface DetectionModel {
  detections(frame: Frame): Detection[];
}

export interface ModelBundle {
  phase: PhaseModel;
  segmentation: SegmentationModel;
  detection: DetectionModel;
}

/** Luma bands used by the heuristic models and the staged test footage. */
export const BANDS = {
  pupilMin: 100,
  lensMin: 195,
  lensMax: 240,
  hookMin: 245,
  markerRows: 5,
  markerMin: 180,
} as const;

export class MarkerPhaseModel implements PhaseModel {
  probability(frame: Frame): number {
    const { luma, width } = frame;
    const rows = Math.min(BANDS.markerRows, frame.height);
    let sum = 0;
    for (let i = 0; i < rows * width; i++) sum += luma[i];
    const mean = sum / (rows * width);
    return mean >= BANDS.markerMin ? 0.95 : 0.05;
  }
}

export class BandSegmentationModel implements SegmentationModel {
  masks(frame: Frame): { lens: Uint8Array; pupil: Uint8Array } {
    const { luma, width } = frame;
    const lens = new Uint8Array(luma.length);
    const pupil = new Uint8Array(luma.length);
    const markerEnd = BANDS.markerRows * width;
    for (let i = 0; i < luma.length; i++) {
      if (i < markerEnd) continue; // marker strip is not anatomy
      const v = luma[i];
      if (v >= BANDS.lensMin && v < BANDS.lensMax) lens[i] = 1;
      if (v >= BANDS.pupilMin) pupil[i] = 1;
    }
    return { lens, pupil };
  }
}

export class ComponentDetectionModel implements DetectionModel {
  detections(frame: Frame): Detection[] {
    const { luma, width, height } = frame;
    const markerEnd = BANDS.markerRows * width;
    const out: Detection[] = [];

    const lensMask = new Uint8Array(luma.length);
    const hookMask = new Uint8Array(luma.length);
    for (let i = markerEnd; i < luma.length; i++) {
      const v = luma[i];
      if (v >= BANDS.lensMin && v < BANDS.lensMax) lensMask[i] = 1;
      if (v >= BANDS.hookMin) hookMask[i] = 1;
    }
    const lensBox = boundingBox(lensMask, width, height);
    if (lensBox) out.push({ classLabel: 'lens', bbox: lensBox, confidence: 0.9 });
    for (const box of connectedComponentBoxes(hookMask, width, height, 4)) {
      out.push({ classLabel: 'hook', bbox: box, confidence: 0.85 });
    }
    return out;
  }
}

export function defaultModels(): ModelBundle {
  return {
    phase: new MarkerPhaseModel(),
    segmentation: new BandSegmentationModel(),
    detection: new ComponentDetectionModel(),
  };
}

function boundingBox(
  mask: Uint8Array,
  width: number,
  height: number,
): [number, number, number, number] | null {
  let minX = width;
  let minY = height;
  let maxX = -1;
  let maxY = -1;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if (mask[y * width + x]) {
        if (x < minX) minX = x;
        if (x > maxX) maxX = x;
        if (y < minY) minY = y;
        if (y > maxY) maxY = y;
      }
    }
  }
  if (maxX < 0) return null;
  return [minX, minY, maxX - minX + 1, maxY - minY + 1];
}

export function connectedComponentBoxes(
  mask: Uint8Array,
  width: number,
  height: number,
  minPixels: number,
): [number, number, number, number][] {
  const seen = new Uint8Array(mask.length);
  const boxes: [number, number, number, number][] = [];
  const stack: number[] = [];
  for (let start = 0; start < mask.length; start++) {
    if (!mask[start] || seen[start]) continue;
    let minX = width;
    let minY = height;
    let maxX = -1;
    let maxY = -1;
    let count = 0;
    stack.push(start);
    seen[start] = 1;
    while (stack.length) {
      const idx = stack.pop()!;
      const x = idx % width;
      const y = (idx - x) / width;
      count++;
      if (x < minX) minX = x;
      if (x > maxX) maxX = x;
      if (y < minY) minY = y;
      if (y > maxY) maxY = y;
      for (const [dx, dy] of [[1, 0], [-1, 0], [0, 1], [0, -1]] as const) {
        const nx = x + dx;
        const ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const nIdx = ny * width + nx;
        if (mask[nIdx] && !seen[nIdx]) {
          seen[nIdx] = 1;
          stack.push(nIdx);
        }
      }
    }
    if (count >= minPixels) boxes.push([minX, minY, maxX - minX + 1, maxY - minY + 1]);
  }
  boxes.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  return boxes;
}
