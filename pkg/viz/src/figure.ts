/**
 * figure.ts — FigureSpec dispatch: input files in, one SVG out.
 */

import { readFileSync, writeFileSync } from "fs";

import { decayFigure } from "./decay.js";
import { overlayFigure } from "./overlay.js";
import {
  decayPointFromReport,
  parseBoundaryCsv,
  parseDecayCsv,
  parsePathCsv,
  parseReport,
  SchemaError,
} from "./schemas.js";
import { shapeFigure } from "./shapefig.js";

export type FigureKind = "overlay" | "shape" | "decay";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  options?: Record<string, unknown>;
}

export interface PlotResult {
  output: string;
  warnings: string[];
}

/** Render the figure described by `spec`; returns warnings (degenerate fits etc.). */
export function plot(spec: FigureSpec): PlotResult {
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new SchemaError("figure spec lists no inputs");
  }
  const texts = spec.inputs.map((p) => readFileSync(p, "utf8"));
  let svg: string;
  const warnings: string[] = [];
  switch (spec.kind) {
    case "overlay": {
      svg = overlayFigure(texts.map(parsePathCsv), spec.options ?? {});
      break;
    }
    case "shape": {
      if (texts.length !== 1) throw new SchemaError("shape figure takes exactly one boundary CSV");
      svg = shapeFigure(parseBoundaryCsv(texts[0]!), spec.options ?? {});
      break;
    }
    case "decay": {
      const pts = texts.flatMap((t, i) =>
        spec.inputs[i]!.endsWith(".json")
          ? [decayPointFromReport(parseReport(t))]
          : parseDecayCsv(t),
      );
      const res = decayFigure(pts, spec.options ?? {});
      svg = res.svg;
      warnings.push(...res.warnings);
      break;
    }
    default:
      throw new SchemaError(`unknown figure kind '${String(spec.kind)}'`);
  }
  writeFileSync(spec.output, svg);
  return { output: spec.output, warnings };
}
