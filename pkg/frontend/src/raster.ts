/** Fixed-size RGB pixel canvas with the few primitives the figures need. */

export type Color = [number, number, number];

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = [255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.data[3 * i] = background[0];
      this.data[3 * i + 1] = background[1];
      this.data[3 * i + 2] = background[2];
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const k = 3 * (y * this.width + x);
    this.data[k] = color[0];
    this.data[k + 1] = color[1];
    this.data[k + 2] = color[2];
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    for (let y = Math.max(0, y0); y <= Math.min(this.height - 1, y1); y++) {
      for (let x = Math.max(0, x0); x <= Math.min(this.width - 1, x1); x++) {
        this.set(x, y, color);
      }
    }
  }

  /** Bresenham segment; dash/gap lengths in pixels (0 = solid). */
  line(x0: number, y0: number, x1: number, y1: number, color: Color,
       dash = 0): void {
    let x = x0;
    let y = y0;
    const dx = Math.abs(x1 - x0);
    const dy = -Math.abs(y1 - y0);
    const sx = x0 < x1 ? 1 : -1;
    const sy = y0 < y1 ? 1 : -1;
    let err = dx + dy;
    let step = 0;
    for (;;) {
      if (dash === 0 || Math.floor(step / dash) % 2 === 0) {
        this.set(x, y, color);
      }
      if (x === x1 && y === y1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      step++;
    }
  }

  /** Thick polyline through pixel coordinates. */
  polyline(pts: Array<[number, number]>, color: Color, dash = 0): void {
    for (let i = 1; i < pts.length; i++) {
      this.line(pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], color,
                dash);
      this.line(pts[i - 1][0], pts[i - 1][1] + 1, pts[i][0], pts[i][1] + 1,
                color, dash);
    }
  }
}
