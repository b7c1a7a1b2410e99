import { mkdtempSync, writeFileSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { plot } from "../src/figure.js";
import {
  SchemaError,
  decayPointFromReport,
  parseBoundaryCsv,
  parseDecayCsv,
  parsePathCsv,
  parseReport,
} from "../src/schemas.js";
import { shapeFigure } from "../src/shapefig.js";

describe("schema parsing", () => {
  it("parses a path CSV", () => {
    const pts = parsePathCsv("x,y\n0,0\n0,1\n-1,1\n");
    expect(pts).toEqual([
      { x: 0, y: 0 },
      { x: 0, y: 1 },
      { x: -1, y: 1 },
    ]);
  });

  it("fails loudly on header mismatch", () => {
    expect(() => parsePathCsv("a,b\n0,0\n")).toThrow(SchemaError);
    expect(() => parseBoundaryCsv("theta,r\n0,1\n")).toThrow(SchemaError);
    expect(() => parseDecayCsv("D,prob\n1,0.5\n")).toThrow(SchemaError);
    expect(() => parsePathCsv("")).toThrow(SchemaError);
  });

  it("fails loudly on report schema-version mismatch", () => {
    expect(() => parseReport('{"format": "fpp-report/2", "kind": "midpoint"}')).toThrow(
      /schema version mismatch/,
    );
    expect(() => parseReport("not json")).toThrow(SchemaError);
  });

  it("extracts decay points from midpoint reports", () => {
    const rep = parseReport(
      JSON.stringify({
        format: "fpp-report/1",
        kind: "midpoint",
        config: { derived: { D: 16 } },
        aggregates: { direct_probability: 0.25, direct_stderr: 0.01 },
      }),
    );
    expect(decayPointFromReport(rep)).toEqual({ scale: 16, probability: 0.25, stderr: 0.01 });
    const bad = parseReport(
      JSON.stringify({ format: "fpp-report/1", kind: "tails", config: {}, aggregates: {} }),
    );
    expect(() => decayPointFromReport(bad)).toThrow(SchemaError);
  });

  it("boundary CSV tolerates NaN bins and shape figure skips them", () => {
    const rows = parseBoundaryCsv("theta,radius,stderr\n0,1,0.1\n1,nan,nan\n2,0.9,0.1\n3,0.8,0.1\n");
    expect(rows.length).toBe(4);
    const svg = shapeFigure(rows);
    expect(svg).toContain("polyline");
    expect(svg).toContain("symmetry check");
  });
});

describe("figure dispatch", () => {
  it("plots from files and reports warnings", () => {
    const dir = mkdtempSync(join(tmpdir(), "viz-"));
    const decay = join(dir, "decay.csv");
    writeFileSync(decay, "D,probability,stderr\n16,0.3,0.02\n");
    const out = join(dir, "fig.svg");
    const res = plot({ kind: "decay", inputs: [decay], output: out });
    expect(res.warnings.length).toBe(1);
    expect(readFileSync(out, "utf8")).toContain("slope -1/16 (reference)");
  });

  it("rejects unknown kinds and empty inputs", () => {
    expect(() => plot({ kind: "sparkline" as never, inputs: ["x"], output: "y" })).toThrow();
    expect(() => plot({ kind: "decay", inputs: [], output: "y" })).toThrow(SchemaError);
  });
});
