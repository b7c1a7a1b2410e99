/**
 * schemas.ts — parsers for the fpplab CLI output formats.
 *
 * Supported inputs:
 *   path CSV       header `x,y`                 (geodesic subcommand)
 *   boundary CSV   header `theta,radius,stderr` (shape subcommand)
 *   decay CSV      header `D,probability,stderr`
 *   report JSON    {"format": "fpp-report/1", ...}
 *
 * Every parser fails loudly on a header or schema-version mismatch; silent
 * misreads of simulation output are worse than a crash.
 */

export const REPORT_FORMAT = "fpp-report/1";

export interface LatticePoint {
  x: number;
  y: number;
}

export interface BoundaryRow {
  theta: number;
  radius: number;
  stderr: number;
}

export interface DecayPoint {
  scale: number; // D or |y|
  probability: number;
  stderr: number;
}

export interface Report {
  format: string;
  kind: string;
  config: Record<string, unknown>;
  aggregates: Record<string, number>;
}

export class SchemaError extends Error {}

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((ln) => ln.length > 0)
    .map((ln) => ln.split(","));
}

function expectHeader(rows: string[][], header: string, what: string): string[][] {
  if (rows.length === 0) throw new SchemaError(`${what}: empty file`);
  if (rows[0]!.join(",") !== header) {
    throw new SchemaError(`${what}: expected header '${header}', got '${rows[0]!.join(",")}'`);
  }
  return rows.slice(1);
}

function num(tok: string, what: string): number {
  const v = Number(tok);
  if (!Number.isFinite(v)) throw new SchemaError(`${what}: bad number '${tok}'`);
  return v;
}

/** Lattice path from the geodesic subcommand's `x,y` CSV. */
export function parsePathCsv(text: string): LatticePoint[] {
  const rows = expectHeader(splitCsv(text), "x,y", "path CSV");
  if (rows.length === 0) throw new SchemaError("path CSV: no vertices");
  return rows.map((r) => {
    if (r.length !== 2) throw new SchemaError(`path CSV: bad row '${r.join(",")}'`);
    return { x: num(r[0]!, "path CSV"), y: num(r[1]!, "path CSV") };
  });
}

/** Angular boundary profile from the shape subcommand. */
export function parseBoundaryCsv(text: string): BoundaryRow[] {
  const rows = expectHeader(splitCsv(text), "theta,radius,stderr", "boundary CSV");
  return rows.map((r) => ({
    theta: num(r[0]!, "boundary CSV"),
    radius: Number(r[1]), // may be NaN for unpopulated bins
    stderr: Number(r[2]),
  }));
}

/** Decay points, either from a `D,probability,stderr` CSV... */
export function parseDecayCsv(text: string): DecayPoint[] {
  const rows = expectHeader(splitCsv(text), "D,probability,stderr", "decay CSV");
  return rows.map((r) => ({
    scale: num(r[0]!, "decay CSV"),
    probability: num(r[1]!, "decay CSV"),
    stderr: num(r[2]!, "decay CSV"),
  }));
}

/** ...or extracted from a schema-versioned experiment report. */
export function parseReport(text: string): Report {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new SchemaError(`report JSON: ${String(e)}`);
  }
  const rep = doc as Report;
  if (rep.format !== REPORT_FORMAT) {
    throw new SchemaError(
      `report JSON: schema version mismatch (want ${REPORT_FORMAT}, got ${String(rep.format)})`,
    );
  }
  return rep;
}

/** One decay point from a midpoint or coalescence report. */
export function decayPointFromReport(rep: Report): DecayPoint {
  const derived = (rep.config["derived"] ?? {}) as Record<string, number>;
  if (rep.kind === "midpoint") {
    return {
      scale: derived["D"]!,
      probability: rep.aggregates["direct_probability"]!,
      stderr: rep.aggregates["direct_stderr"]!,
    };
  }
  if (rep.kind === "coalesce") {
    const p = rep.aggregates["exceedance_frequency"]!;
    return {
      scale: derived["norm_y"]!,
      probability: p,
      stderr: (rep.aggregates["exceedance_wilson_hi"]! - rep.aggregates["exceedance_wilson_lo"]!) / 4,
    };
  }
  throw new SchemaError(`report kind '${rep.kind}' carries no decay point`);
}
