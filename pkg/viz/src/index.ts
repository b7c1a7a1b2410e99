/**
 * index.ts — batch entry point.
 *
 * Usage:
 *   node dist/index.js spec.json [more-specs...]
 *   node dist/index.js --kind overlay --out fig.svg path1.csv path2.csv
 *
 * A spec JSON file holds a FigureSpec: {"kind", "inputs", "output", "options"?}.
 */

import { readFileSync } from "fs";

import { FigureKind, FigureSpec, plot } from "./figure.js";

export { plot } from "./figure.js";
export type { FigureSpec, FigureKind, PlotResult } from "./figure.js";
export { overlayFigure } from "./overlay.js";
export { shapeFigure } from "./shapefig.js";
export { decayFigure } from "./decay.js";
export * from "./schemas.js";

function parseArgs(argv: string[]): FigureSpec[] {
  if (argv.length === 0) {
    throw new Error("usage: index.js spec.json... | --kind KIND --out FILE inputs...");
  }
  if (argv[0] !== "--kind") {
    return argv.map((p) => JSON.parse(readFileSync(p, "utf8")) as FigureSpec);
  }
  let kind: FigureKind | undefined;
  let output: string | undefined;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--kind") kind = argv[++i] as FigureKind;
    else if (argv[i] === "--out") output = argv[++i];
    else inputs.push(argv[i]!);
  }
  if (!kind || !output) throw new Error("--kind and --out are required");
  return [{ kind, inputs, output }];
}

export function main(argv: string[]): number {
  let specs: FigureSpec[];
  try {
    specs = parseArgs(argv);
  } catch (e) {
    console.error(String(e));
    return 2;
  }
  for (const spec of specs) {
    try {
      const res = plot(spec);
      for (const w of res.warnings) console.warn(`warning: ${w}`);
      console.log(`wrote ${res.output}`);
    } catch (e) {
      console.error(`error: ${e instanceof Error ? e.message : String(e)}`);
      return 1;
    }
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
