/**
 * decay.ts — probability-vs-scale decay curves on log-log axes.
 *
 * Data points get error bars and a least-squares slope annotation; the
 * power-law guides at slopes -1/16 and -2/3 are drawn as labeled reference
 * lines only — they are visual context from the theory, never a claim that
 * the data attains them.  A single data point yields no fit, only a warning.
 */

import { DecayPoint } from "./schemas.js";
import { Svg, fmt, leastSquares } from "./svg.js";

export interface DecayOptions {
  width?: number;
  height?: number;
  point?: string;
  fit?: string;
  references?: Array<{ slope: number; label: string }>;
}

const DEFAULTS: Required<DecayOptions> = {
  width: 360,
  height: 260,
  point: "#1f4fd8",
  fit: "#d82121",
  references: [
    { slope: -1 / 16, label: "slope -1/16 (reference)" },
    { slope: -2 / 3, label: "slope -2/3 (reference)" },
  ],
};

export interface DecayResult {
  svg: string;
  slope: number | null;
  warnings: string[];
}

export function decayFigure(points: DecayPoint[], options: DecayOptions = {}): DecayResult {
  const opt = { ...DEFAULTS, ...options };
  const usable = points.filter((p) => p.scale > 0 && p.probability > 0);
  const warnings: string[] = [];
  if (usable.length === 0) throw new Error("decay figure needs at least one positive point");
  if (usable.length < points.length) {
    warnings.push(`${points.length - usable.length} nonpositive point(s) dropped from log-log axes`);
  }

  const lx = usable.map((p) => Math.log10(p.scale));
  const ly = usable.map((p) => Math.log10(p.probability));
  const padX = 0.35;
  const padY = 0.5;
  const x0 = Math.min(...lx) - padX;
  const x1 = Math.max(...lx) + padX;
  const y0 = Math.min(...ly) - padY;
  const y1 = Math.max(...ly) + padY;

  const W = opt.width;
  const H = opt.height;
  const toX = (v: number) => ((v - x0) / (x1 - x0)) * (W - 70) + 50;
  const toY = (v: number) => H - 30 - ((v - y0) / (y1 - y0)) * (H - 60);

  const svg = new Svg({ x: 0, y: 0, w: W, h: H });
  svg.line(50, H - 30, W - 20, H - 30, "#333", 1);
  svg.line(50, 30, 50, H - 30, "#333", 1);
  svg.text(W / 2, H - 10, "log10 scale", 10, "#333", "middle");
  svg.text(12, H / 2, "log10 P", 10, "#333", "middle");

  // reference power-law guides through the first data point
  const anchorX = lx[0]!;
  const anchorY = ly[0]!;
  for (const ref of opt.references) {
    const ya = anchorY + ref.slope * (x0 + 0.1 - anchorX);
    const yb = anchorY + ref.slope * (x1 - 0.1 - anchorX);
    svg.line(toX(x0 + 0.1), toY(ya), toX(x1 - 0.1), toY(yb), "#999999", 0.8, "4,3");
    svg.text(toX(x1 - 0.1) - 2, toY(yb) - 4, ref.label, 8, "#666", "end");
  }

  // error bars and points
  for (const p of usable) {
    const cx = toX(Math.log10(p.scale));
    const cy = toY(Math.log10(p.probability));
    if (p.stderr > 0) {
      const hi = Math.log10(p.probability + p.stderr);
      const lo = p.probability - p.stderr > 0 ? Math.log10(p.probability - p.stderr) : y0;
      svg.line(cx, toY(lo), cx, toY(hi), opt.point, 0.8);
    }
    svg.circle(cx, cy, 2.4, opt.point);
  }

  let slope: number | null = null;
  if (usable.length >= 2) {
    try {
      const f = leastSquares(lx, ly);
      slope = f.slope;
      const ya = f.intercept + f.slope * (x0 + 0.05);
      const yb = f.intercept + f.slope * (x1 - 0.05);
      svg.line(toX(x0 + 0.05), toY(ya), toX(x1 - 0.05), toY(yb), opt.fit, 1.0);
      svg.text(54, 40, `least-squares slope ${fmt(slope)}`, 9, opt.fit);
    } catch {
      warnings.push("fit skipped: degenerate x values");
    }
  } else {
    warnings.push("single data point: slope annotation omitted");
  }
  return { svg: svg.render(), slope, warnings };
}
