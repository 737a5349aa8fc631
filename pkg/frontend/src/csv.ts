/** Parsers for the documented qhtomo CSV schemas. */

export class SchemaError extends Error {}

export interface WignerData {
  xs: number[];
  omegas: number[];
  /** row-major values[i * omegas.length + j] at (xs[i], omegas[j]) */
  values: Float64Array;
}

export interface MarginalRow {
  theta: number;
  x: number;
  mean: number;
  lower: number;
  upper: number;
  truth: number | null;
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function checkHeader(found: string[], required: string[], kind: string): void {
  for (const column of required) {
    if (!found.includes(column)) {
      throw new SchemaError(`${kind}: missing column '${column}'`);
    }
  }
}

export function parseWignerCsv(text: string): WignerData {
  const lines = splitLines(text);
  if (lines.length < 2) throw new SchemaError("wigner csv: no data rows");
  const header = lines[0].split(",").map((s) => s.trim());
  checkHeader(header, ["x", "omega", "w"], "wigner csv");
  const ix = header.indexOf("x");
  const io = header.indexOf("omega");
  const iw = header.indexOf("w");
  const xsSet: number[] = [];
  const omSet: number[] = [];
  const triples: Array<[number, number, number]> = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    const x = Number(parts[ix]);
    const om = Number(parts[io]);
    const w = Number(parts[iw]);
    if (!isFinite(x) || !isFinite(om) || !isFinite(w)) {
      throw new SchemaError(`wigner csv: bad row '${line}'`);
    }
    if (xsSet.length === 0 || x !== xsSet[xsSet.length - 1]) {
      if (!xsSet.includes(x)) xsSet.push(x);
    }
    if (!omSet.includes(om) && xsSet.length === 1) omSet.push(om);
    triples.push([x, om, w]);
  }
  const xs = xsSet;
  const omegas = omSet;
  if (xs.length * omegas.length !== triples.length) {
    throw new SchemaError("wigner csv: rows do not form a full grid");
  }
  const values = new Float64Array(triples.length);
  triples.forEach(([, , w], k) => {
    values[k] = w; // file is written row-major in (x, omega)
  });
  return { xs, omegas, values };
}

export function parseMarginalsCsv(text: string): MarginalRow[] {
  const lines = splitLines(text);
  if (lines.length < 2) throw new SchemaError("marginals csv: no data rows");
  const header = lines[0].split(",").map((s) => s.trim());
  checkHeader(header, ["theta", "x", "mean", "lower", "upper"], "marginals csv");
  const idx = (name: string) => header.indexOf(name);
  const hasTruth = header.includes("truth");
  return lines.slice(1).map((line) => {
    const parts = line.split(",");
    const read = (name: string) => Number(parts[idx(name)]);
    const truthRaw = hasTruth ? parts[idx("truth")] : "";
    return {
      theta: read("theta"),
      x: read("x"),
      mean: read("mean"),
      lower: read("lower"),
      upper: read("upper"),
      truth: truthRaw !== undefined && truthRaw !== "" ? Number(truthRaw) : null,
    };
  });
}
