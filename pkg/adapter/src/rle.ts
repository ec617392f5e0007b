/**
 * Row-major background-first run-length encoding, matching the analysis
 * core's mask format: runs alternate background/foreground, only the first
 * run may be zero, and the runs sum to width * height.
 */

export function encodeRle(mask: Uint8Array): number[] {
  if (mask.length === 0) throw new Error('rle: empty bitmap');
  const runs: number[] = [];
  let current = mask[0] !== 0;
  let length = 1;
  for (let i = 1; i < mask.length; i++) {
    const value = mask[i] !== 0;
    if (value === current) {
      length++;
    } else {
      runs.push(length);
      current = value;
      length = 1;
    }
  }
  runs.push(length);
  if (mask[0] !== 0) runs.unshift(0);
  return runs;
}

export function decodeRle(runs: number[], size: number): Uint8Array {
  const out = new Uint8Array(size);
  let pos = 0;
  let value = 0;
  for (const run of runs) {
    if (run < 0) throw new Error('rle: negative run');
    if (value) out.fill(1, pos, pos + run);
    pos += run;
    value = 1 - value;
  }
  if (pos !== size) throw new Error(`rle: runs sum to ${pos}, expected ${size}`);
  return out;
}
