#!/usr/bin/env node
/** Regenerates goldens/hashes.json from the shipped fixtures.
 *  Run `npm run build` first, then `node scripts/make-goldens.js`. */

const { readFileSync, writeFileSync } = require("node:fs");
const { join } = require("node:path");

const root = join(__dirname, "..");
const { parseMarginalsCsv, parseWignerCsv } = require(join(root, "dist/csv"));
const { renderDiffmap, renderHeatmap, renderMarginals } =
  require(join(root, "dist/render"));
const { perceptualHash } = require(join(root, "dist/phash"));

const cat = join(root, "fixtures", "cat");
const fock = join(root, "fixtures", "fock2");
const meanCsv = parseWignerCsv(readFileSync(join(cat, "wigner_mean.csv"), "utf8"));
const trueCsv = parseWignerCsv(readFileSync(join(cat, "wigner_true.csv"), "utf8"));
const goldens = {
  cat_heatmap: perceptualHash(renderHeatmap(meanCsv)),
  cat_diffmap: perceptualHash(renderDiffmap(meanCsv, trueCsv)),
  cat_marginals: perceptualHash(renderMarginals(
    parseMarginalsCsv(readFileSync(join(cat, "marginals.csv"), "utf8")))),
  fock2_marginals: perceptualHash(renderMarginals(
    parseMarginalsCsv(readFileSync(join(fock, "marginals.csv"), "utf8")))),
};
writeFileSync(join(root, "goldens", "hashes.json"),
              JSON.stringify(goldens, null, 2) + "\n");
console.log(goldens);
