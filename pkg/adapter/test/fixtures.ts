/**
 * Staged surgery footage for the adapter tests: a dark background, a
 * brightness marker strip during the implantation phase, and afterwards a
 * pupil disk with a rotated lens ellipse and two hook squares on its axis.
 * Luma levels line up with the heuristic models' bands.
 */

import { Y4mVideo } from '../src/y4m.js';

export const STAGE = {
  width: 96,
  height: 72,
  background: 20,
  marker: 230,
  pupil: 120,
  lens: 210,
  hook: 250,
  pupilCenter: [48, 40] as const,
  pupilRadius: 24,
  lensAxes: [14, 10] as const,
  lensAngleDeg: 30,
  hookOffset: 4,
  implantationFrames: [75, 150] as const, // [start, end)
  postFrames: 80,
};

export function stagedSurgeryVideo(): Y4mVideo {
  const { width, height } = STAGE;
  const nFrames = STAGE.implantationFrames[1] + STAGE.postFrames;
  const frames: Uint8Array[] = [];
  for (let t = 0; t < nFrames; t++) {
    const luma = new Uint8Array(width * height).fill(STAGE.background);
    drawDisk(luma, STAGE.pupilCenter[0], STAGE.pupilCenter[1], STAGE.pupilRadius, STAGE.pupil);
    if (t >= STAGE.implantationFrames[0] && t < STAGE.implantationFrames[1]) {
      luma.fill(STAGE.marker, 0, 5 * width);
    }
    if (t >= STAGE.implantationFrames[1]) {
      drawLensWithHooks(luma);
    }
    frames.push(luma);
  }
  return { width, height, fpsNum: 25, fpsDen: 1, frames };
}

function drawDisk(luma: Uint8Array, cx: number, cy: number, r: number, value: number): void {
  const { width, height } = STAGE;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) luma[y * width + x] = value;
    }
  }
}

function drawLensWithHooks(luma: Uint8Array): void {
  const { width, height } = STAGE;
  const [cx, cy] = STAGE.pupilCenter;
  const [a, b] = STAGE.lensAxes;
  const theta = (STAGE.lensAngleDeg * Math.PI) / 180;
  const cos = Math.cos(theta);
  const sin = Math.sin(theta);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const dx = x - cx;
      const dy = y - cy;
      const u = (dx * cos + dy * sin) / a;
      const v = (-dx * sin + dy * cos) / b;
      if (u * u + v * v <= 1) luma[y * width + x] = STAGE.lens;
    }
  }
  const radius = a + STAGE.hookOffset;
  for (const sign of [1, -1]) {
    const hx = Math.round(cx + sign * radius * cos);
    const hy = Math.round(cy + sign * radius * sin);
    for (let y = hy - 1; y <= hy + 1; y++) {
      for (let x = hx - 1; x <= hx + 1; x++) {
        if (x >= 0 && y >= 0 && x < width && y < height) luma[y * width + x] = STAGE.hook;
      }
    }
  }
}
