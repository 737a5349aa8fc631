import { readFileSync, existsSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it, vi } from "vitest";

import { parseMarginalsCsv, parseWignerCsv, SchemaError } from "../src/csv";
import { hammingHex, perceptualHash } from "../src/phash";
import { encodePng } from "../src/png";
import { Canvas } from "../src/raster";
import { renderDiffmap, renderHeatmap, renderMarginals } from "../src/render";
import { run } from "../src/cli";

const FIXTURES = join(__dirname, "..", "fixtures");
const GOLDENS = join(__dirname, "..", "goldens", "hashes.json");

function vacuumWignerCsv(n = 33, half = 4): string {
  const lines = ["x,omega,w"];
  for (let i = 0; i < n; i++) {
    const x = -half + (2 * half * i) / (n - 1);
    for (let j = 0; j < n; j++) {
      const om = -half + (2 * half * j) / (n - 1);
      const w = 2 * Math.exp(-2 * Math.PI * (x * x + om * om));
      lines.push(`${x},${om},${w}`);
    }
  }
  return lines.join("\n") + "\n";
}

describe("csv parsing", () => {
  it("rejects a missing value column by name", () => {
    expect(() => parseWignerCsv("x,omega,value\n0,0,1\n"))
      .toThrowError(/missing column 'w'/);
    expect(() => parseMarginalsCsv("theta,x,mean,lo,hi\n0,0,1,0,2\n"))
      .toThrowError(/missing column 'lower'/);
  });

  it("round-trips the wigner grid layout", () => {
    const data = parseWignerCsv(vacuumWignerCsv(9));
    expect(data.xs).toHaveLength(9);
    expect(data.omegas).toHaveLength(9);
    const center = data.values[4 * 9 + 4];
    expect(center).toBeCloseTo(2.0, 6);
  });

  it("parses optional truth as null when empty", () => {
    const rows = parseMarginalsCsv(
      "theta,x,mean,lower,upper,truth\n0,0,1,0.5,1.5,\n0,1,1,0.5,1.5,0.9\n");
    expect(rows[0].truth).toBeNull();
    expect(rows[1].truth).toBeCloseTo(0.9);
  });
});

describe("heatmap", () => {
  it("vacuum analytic grid is radially symmetric with a central argmax", () => {
    const canvas = renderHeatmap(parseWignerCsv(vacuumWignerCsv(33)));
    // reddest (warm) pixel should sit at the canvas center
    let best = -1;
    let bx = 0;
    let by = 0;
    for (let y = 0; y < canvas.height; y++) {
      for (let x = 0; x < canvas.width; x++) {
        const k = 3 * (y * canvas.width + x);
        const warm = canvas.data[k] - canvas.data[k + 2];
        if (warm > best) {
          best = warm;
          bx = x;
          by = y;
        }
      }
    }
    expect(Math.abs(bx - canvas.width / 2)).toBeLessThan(4);
    expect(Math.abs(by - canvas.height / 2)).toBeLessThan(4);
  });
});

describe("shipped example fit", () => {
  const catDir = join(FIXTURES, "cat");
  const fockDir = join(FIXTURES, "fock2");

  it("cat posterior mean shows two lobes near x = +-2", () => {
    const data = parseWignerCsv(readFileSync(join(catDir, "wigner_mean.csv"),
                                             "utf8"));
    const nw = data.omegas.length;
    for (const side of [1, -1]) {
      let best = -Infinity;
      let bestX = 0;
      let bestOm = 0;
      data.xs.forEach((x, i) => {
        if (side * x <= 0.5) return;
        data.omegas.forEach((om, j) => {
          const v = data.values[i * nw + j];
          if (v > best) {
            best = v;
            bestX = x;
            bestOm = om;
          }
        });
      });
      expect(Math.abs(bestX - 2 * side)).toBeLessThan(0.3);
      expect(Math.abs(bestOm)).toBeLessThan(0.3);
    }
  });

  it("credible bands visually contain the truth on >= 95% of grid points", () => {
    // "visually contains": inclusion up to one rendered pixel of the
    // panel's y-range, so that 1e-15-vs-1e-12 tail discrepancies do not
    // count as misses
    const panelPx = 220;
    for (const dir of [catDir, fockDir]) {
      const rows = parseMarginalsCsv(
        readFileSync(join(dir, "marginals.csv"), "utf8"));
      const thetas = [...new Set(rows.map((r) => r.theta))];
      let total = 0;
      let covered = 0;
      for (const theta of thetas) {
        const sub = rows.filter((r) => r.theta === theta);
        let yMax = 0;
        for (const r of sub) {
          yMax = Math.max(yMax, r.upper, r.mean, r.truth ?? 0);
        }
        const tol = (1.05 * yMax) / panelPx;
        for (const r of sub) {
          total += 1;
          if (r.truth !== null && r.lower - tol <= r.truth
              && r.truth <= r.upper + tol) {
            covered += 1;
          }
        }
      }
      expect(covered / total, dir).toBeGreaterThanOrEqual(0.95);
    }
  });

  it("figure perceptual hashes match the committed goldens", () => {
    const goldens = JSON.parse(readFileSync(GOLDENS, "utf8"));
    const meanCsv = parseWignerCsv(
      readFileSync(join(catDir, "wigner_mean.csv"), "utf8"));
    const trueCsv = parseWignerCsv(
      readFileSync(join(catDir, "wigner_true.csv"), "utf8"));
    const marg = parseMarginalsCsv(
      readFileSync(join(catDir, "marginals.csv"), "utf8"));
    const rendered: Record<string, string> = {
      cat_heatmap: perceptualHash(renderHeatmap(meanCsv)),
      cat_diffmap: perceptualHash(renderDiffmap(meanCsv, trueCsv)),
      cat_marginals: perceptualHash(renderMarginals(marg)),
      fock2_marginals: perceptualHash(renderMarginals(parseMarginalsCsv(
        readFileSync(join(fockDir, "marginals.csv"), "utf8")))),
    };
    for (const [name, hash] of Object.entries(rendered)) {
      expect(goldens[name], name).toBeDefined();
      expect(hammingHex(hash, goldens[name]), name).toBeLessThanOrEqual(4);
    }
  });
});

describe("marginals edge cases", () => {
  it("degenerate bands collapse onto the mean without error", () => {
    const rows = parseMarginalsCsv(
      "theta,x,mean,lower,upper,truth\n"
      + "0,0,1,1,1,1\n0,1,2,2,2,2\n0,2,1,1,1,1\n");
    const canvas = renderMarginals(rows);
    expect(canvas.width).toBeGreaterThan(0);
  });

  it("missing truth warns and still renders", () => {
    const warn = vi.fn();
    const rows = parseMarginalsCsv(
      "theta,x,mean,lower,upper,truth\n0,0,1,0.5,1.5,\n0,1,1.2,0.6,1.6,\n");
    renderMarginals(rows, warn);
    expect(warn).toHaveBeenCalledOnce();
  });
});

describe("renderer purity", () => {
  it("the plot modules never recompute statistics", () => {
    const banned = /\b(mean|sum|average|variance|median|quantile|std)\s*\(/;
    for (const file of ["render.ts", "raster.ts", "colormap.ts", "png.ts"]) {
      const source = readFileSync(join(__dirname, "..", "src", file), "utf8");
      expect(banned.test(source), file).toBe(false);
    }
  });
});

describe("png writer", () => {
  it("emits a decodable header with the right dimensions", () => {
    const canvas = new Canvas(7, 5);
    const png = encodePng(canvas.width, canvas.height, canvas.data);
    expect([...png.subarray(0, 8)]).toEqual(
      [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    expect(png.readUInt32BE(16)).toBe(7);
    expect(png.readUInt32BE(20)).toBe(5);
  });
});

describe("cli", () => {
  it("maps failure modes to exit codes", () => {
    const errSpy = vi.spyOn(console, "error").mockImplementation(() => {});
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    expect(run(["--kind", "nope", "--in", "a", "--out", "b"])).toBe(2);
    expect(run(["--kind", "heatmap", "--in", join(dir, "missing.csv"),
                "--out", join(dir, "o.png")])).toBe(3);
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "x,omega,value\n0,0,1\n");
    expect(run(["--kind", "heatmap", "--in", bad,
                "--out", join(dir, "o.png")])).toBe(4);
    expect(errSpy.mock.calls.some(
      (c) => String(c[0]).includes("'w'"))).toBe(true);
    const good = join(dir, "good.csv");
    writeFileSync(good, vacuumWignerCsv(17));
    const out = join(dir, "o.png");
    expect(run(["--kind", "heatmap", "--in", good, "--out", out])).toBe(0);
    expect(existsSync(out)).toBe(true);
    errSpy.mockRestore();
  });
});
