/** Closed-form colormaps, fixed so renders are byte-stable. */

import { Color } from "./raster";

function clamp01(t: number): number {
  return t < 0 ? 0 : t > 1 ? 1 : t;
}

/** Blue-white-red diverging map on t in [-1, 1] (Wigner sign structure). */
export function diverging(t: number): Color {
  const u = clamp01(Math.abs(t));
  if (t >= 0) {
    return [255, Math.round(255 * (1 - u * 0.85)), Math.round(255 * (1 - u))];
  }
  return [Math.round(255 * (1 - u)), Math.round(255 * (1 - u * 0.7)), 255];
}

/** White-to-dark-violet sequential map on t in [0, 1] (difference maps). */
export function sequential(t: number): Color {
  const u = clamp01(t);
  return [
    Math.round(255 * (1 - 0.75 * u)),
    Math.round(255 * (1 - 0.95 * u)),
    Math.round(255 * (1 - 0.55 * u)),
  ];
}

export const BAND_FILL: Color = [200, 218, 240];
export const MEAN_LINE: Color = [24, 60, 160];
export const TRUTH_LINE: Color = [20, 20, 20];
export const FRAME: Color = [90, 90, 90];
