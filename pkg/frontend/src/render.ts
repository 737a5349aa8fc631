/** Figure assembly.  Every rendered number comes straight from the parsed
 * CSVs; this module only performs coordinate transforms and color scaling
 * (min/max normalization), never statistics over the data. */

import { BAND_FILL, FRAME, MEAN_LINE, TRUTH_LINE, diverging,
         sequential } from "./colormap";
import { MarginalRow, SchemaError, WignerData } from "./csv";
import { Canvas } from "./raster";

const CELL = 4;        // pixels per grid cell in phase-space maps
const MARGIN = 12;
const PANEL_W = 300;
const PANEL_H = 220;

function extent(values: ArrayLike<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < values.length; i++) {
    const v = values[i];
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function drawGridMap(values: Float64Array, nx: number, nw: number,
                     scale: (v: number) => [number, number, number]): Canvas {
  const canvas = new Canvas(nx * CELL + 2 * MARGIN, nw * CELL + 2 * MARGIN);
  for (let i = 0; i < nx; i++) {
    for (let j = 0; j < nw; j++) {
      const color = scale(values[i * nw + j]);
      const px = MARGIN + i * CELL;
      // omega increases upward
      const py = MARGIN + (nw - 1 - j) * CELL;
      canvas.fillRect(px, py, px + CELL - 1, py + CELL - 1, color);
    }
  }
  canvas.fillRect(MARGIN - 1, MARGIN - 1, canvas.width - MARGIN, MARGIN - 1, FRAME);
  canvas.fillRect(MARGIN - 1, canvas.height - MARGIN, canvas.width - MARGIN,
                  canvas.height - MARGIN, FRAME);
  canvas.fillRect(MARGIN - 1, MARGIN - 1, MARGIN - 1, canvas.height - MARGIN, FRAME);
  canvas.fillRect(canvas.width - MARGIN, MARGIN - 1, canvas.width - MARGIN,
                  canvas.height - MARGIN, FRAME);
  return canvas;
}

export function renderHeatmap(data: WignerData): Canvas {
  const [lo, hi] = extent(data.values);
  const span = Math.max(Math.abs(lo), Math.abs(hi), 1e-300);
  return drawGridMap(data.values, data.xs.length, data.omegas.length,
                     (v) => diverging(v / span));
}

export function renderDiffmap(mean: WignerData, truth: WignerData): Canvas {
  if (mean.xs.length !== truth.xs.length
      || mean.omegas.length !== truth.omegas.length) {
    throw new SchemaError("diffmap: estimate and truth grids differ");
  }
  const diff = new Float64Array(mean.values.length);
  for (let k = 0; k < diff.length; k++) {
    diff[k] = Math.abs(mean.values[k] - truth.values[k]);
  }
  const [, hi] = extent(diff);
  const span = Math.max(hi, 1e-300);
  return drawGridMap(diff, mean.xs.length, mean.omegas.length,
                     (v) => sequential(v / span));
}

export function renderMarginals(rows: MarginalRow[],
                                warn: (msg: string) => void = console.warn): Canvas {
  const thetas = [...new Set(rows.map((r) => r.theta))].sort((a, b) => a - b);
  if (thetas.length === 0) throw new SchemaError("marginals: no rows");
  const canvas = new Canvas(thetas.length * (PANEL_W + MARGIN) + MARGIN,
                            PANEL_H + 2 * MARGIN);
  thetas.forEach((theta, panel) => {
    const sub = rows.filter((r) => r.theta === theta)
      .sort((a, b) => a.x - b.x);
    const left = MARGIN + panel * (PANEL_W + MARGIN);
    const top = MARGIN;
    const [xLo, xHi] = extent(sub.map((r) => r.x));
    let yHi = -Infinity;
    for (const r of sub) {
      const candidates = [r.upper, r.mean, r.truth ?? -Infinity];
      for (const c of candidates) if (c > yHi) yHi = c;
    }
    const ySpan = Math.max(yHi, 1e-300) * 1.05;
    const toPx = (x: number) =>
      Math.round(left + ((x - xLo) / (xHi - xLo)) * (PANEL_W - 1));
    const toPy = (y: number) =>
      Math.round(top + (1 - y / ySpan) * (PANEL_H - 1));
    // credible band as filled columns
    for (let i = 1; i < sub.length; i++) {
      const x0 = toPx(sub[i - 1].x);
      const x1 = toPx(sub[i].x);
      for (let px = x0; px <= x1; px++) {
        const f = x1 === x0 ? 0 : (px - x0) / (x1 - x0);
        const lowVal = sub[i - 1].lower + f * (sub[i].lower - sub[i - 1].lower);
        const upVal = sub[i - 1].upper + f * (sub[i].upper - sub[i - 1].upper);
        canvas.fillRect(px, toPy(upVal), px, toPy(lowVal), BAND_FILL);
      }
    }
    const meanPts = sub.map((r) => [toPx(r.x), toPy(r.mean)] as [number, number]);
    canvas.polyline(meanPts, MEAN_LINE);
    const hasTruth = sub.every((r) => r.truth !== null);
    if (hasTruth) {
      const truthPts = sub.map(
        (r) => [toPx(r.x), toPy(r.truth as number)] as [number, number]);
      canvas.polyline(truthPts, TRUTH_LINE, 4);
    } else {
      warn(`marginals: truth column absent for theta=${theta}; `
           + "plotting without the dashed reference");
    }
    canvas.fillRect(left, top + PANEL_H, left + PANEL_W - 1, top + PANEL_H, FRAME);
    canvas.fillRect(left, top, left, top + PANEL_H, FRAME);
  });
  return canvas;
}
