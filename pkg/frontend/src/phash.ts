/** Perceptual hash used by the figure regression tests: independent
 * average-hashes of the red and blue channels, 16 x 16 blocks each, so
 * differently colored maps with similar luminance stay distinguishable. */

import { Canvas } from "./raster";

function channelHash(canvas: Canvas, channel: number): string {
  const side = 16;
  const acc = new Float64Array(side * side);
  const cnt = new Float64Array(side * side);
  for (let y = 0; y < canvas.height; y++) {
    for (let x = 0; x < canvas.width; x++) {
      const v = canvas.data[3 * (y * canvas.width + x) + channel];
      const bx = Math.min(side - 1, Math.floor((x * side) / canvas.width));
      const by = Math.min(side - 1, Math.floor((y * side) / canvas.height));
      acc[by * side + bx] += v;
      cnt[by * side + bx] += 1;
    }
  }
  let avg = 0;
  for (let i = 0; i < acc.length; i++) {
    acc[i] /= cnt[i];
    avg += acc[i];
  }
  avg /= acc.length;
  let hex = "";
  for (let i = 0; i < acc.length; i += 4) {
    let nibble = 0;
    for (let b = 0; b < 4; b++) {
      nibble = (nibble << 1) | (acc[i + b] > avg - 1e-9 ? 1 : 0);
    }
    hex += nibble.toString(16);
  }
  return hex;
}

export function perceptualHash(canvas: Canvas): string {
  return channelHash(canvas, 0) + channelHash(canvas, 2);
}

export function hammingHex(a: string, b: string): number {
  let d = 0;
  for (let i = 0; i < Math.max(a.length, b.length); i++) {
    let x = parseInt(a[i] ?? "0", 16) ^ parseInt(b[i] ?? "0", 16);
    while (x) {
      d += x & 1;
      x >>= 1;
    }
  }
  return d;
}
