#!/usr/bin/env node
/** plots --kind {heatmap|diffmap|marginals} --in <csv> [--truth <csv>]
 *  --out <png>
 *
 * Exit codes: 0 ok, 2 usage error, 3 missing input, 4 schema mismatch.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { SchemaError, parseMarginalsCsv, parseWignerCsv } from "./csv";
import { encodePng } from "./png";
import { renderDiffmap, renderHeatmap, renderMarginals } from "./render";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${argv[i]}'`);
    }
    out.set(argv[i].slice(2), argv[i + 1]);
  }
  return out;
}

export function run(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const kind = args.get("kind");
  const input = args.get("in");
  const output = args.get("out");
  if (!kind || !input || !output
      || !["heatmap", "diffmap", "marginals"].includes(kind)) {
    console.error("usage: plots --kind {heatmap|diffmap|marginals} "
                  + "--in <csv> [--truth <csv>] --out <png>");
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch {
    console.error(`cannot read ${input}`);
    return 3;
  }
  try {
    let canvas;
    if (kind === "heatmap") {
      canvas = renderHeatmap(parseWignerCsv(text));
    } else if (kind === "diffmap") {
      const truthPath = args.get("truth");
      if (!truthPath) {
        console.error("diffmap needs --truth <csv>");
        return 2;
      }
      let truthText: string;
      try {
        truthText = readFileSync(truthPath, "utf8");
      } catch {
        console.error(`cannot read ${truthPath}`);
        return 3;
      }
      canvas = renderDiffmap(parseWignerCsv(text), parseWignerCsv(truthText));
    } else {
      canvas = renderMarginals(parseMarginalsCsv(text));
    }
    writeFileSync(output, encodePng(canvas.width, canvas.height, canvas.data));
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(String(err.message));
      return 4;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
