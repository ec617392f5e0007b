/**
 * Minimal YUV4MPEG2 (.y4m) reader.
 *
 * Only what the adapter needs: the stream header (width, height, frame
 * rate, color space) and per-frame luma planes. C420 family and C444 are
 * supported; chroma planes are skipped.
 */

export interface Y4mVideo {
  width: number;
  height: number;
  fpsNum: number;
  fpsDen: number;
  frames: Uint8Array[]; // luma plane per frame, row-major
}

const MAGIC = 'YUV4MPEG2';

export function parseY4m(data: Buffer): Y4mVideo {
  const headerEnd = data.indexOf(0x0a);
  if (headerEnd < 0) throw new Error('y4m: missing stream header terminator');
  const header = data.subarray(0, headerEnd).toString('ascii');
  if (!header.startsWith(MAGIC)) throw new Error('y4m: bad magic');

  let width = 0;
  let height = 0;
  let fpsNum = 25;
  let fpsDen = 1;
  let colorspace = 'C420';
  for (const token of header.slice(MAGIC.length).trim().split(/\s+/)) {
    if (!token) continue;
    const tag = token[0];
    const value = token.slice(1);
    if (tag === 'W') width = parseInt(value, 10);
    else if (tag === 'H') height = parseInt(value, 10);
    else if (tag === 'F') {
      const [n, d] = value.split(':');
      fpsNum = parseInt(n, 10);
      fpsDen = parseInt(d, 10);
    } else if (tag === 'C') colorspace = 'C' + value;
  }
  if (width <= 0 || height <= 0) throw new Error('y4m: missing W/H in header');

  const lumaSize = width * height;
  let chromaSize: number;
  if (colorspace.startsWith('C420')) chromaSize = 2 * ((width >> 1) * (height >> 1));
  else if (colorspace.startsWith('C444')) chromaSize = 2 * lumaSize;
  else if (colorspace.startsWith('C422')) chromaSize = 2 * ((width >> 1) * height);
  else throw new Error(`y4m: unsupported colorspace ${colorspace}`);

  const frames: Uint8Array[] = [];
  let pos = headerEnd + 1;
  while (pos < data.length) {
    const lineEnd = data.indexOf(0x0a, pos);
    if (lineEnd < 0) break;
    const frameHeader = data.subarray(pos, lineEnd).toString('ascii');
    if (!frameHeader.startsWith('FRAME')) {
      throw new Error(`y4m: expected FRAME marker at byte ${pos}`);
    }
    const start = lineEnd + 1;
    const end = start + lumaSize + chromaSize;
    if (end > data.length) throw new Error('y4m: truncated frame payload');
    frames.push(new Uint8Array(data.subarray(start, start + lumaSize)));
    pos = end;
  }
  return { width, height, fpsNum, fpsDen, frames };
}

export function serializeY4m(video: Y4mVideo): Buffer {
  const { width, height, fpsNum, fpsDen, frames } = video;
  const header = `${MAGIC} W${width} H${height} F${fpsNum}:${fpsDen} Ip A1:1 C420jpeg\n`;
  const chroma = Buffer.alloc(2 * ((width >> 1) * (height >> 1)), 128);
  const parts: Buffer[] = [Buffer.from(header, 'ascii')];
  for (const luma of frames) {
    if (luma.length !== width * height) throw new Error('y4m: luma plane size mismatch');
    parts.push(Buffer.from('FRAME\n', 'ascii'), Buffer.from(luma), chroma);
  }
  return Buffer.concat(parts);
}
