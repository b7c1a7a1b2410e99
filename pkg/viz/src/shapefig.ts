/**
 * shapefig.ts — limit-shape boundary polygon with a symmetry mirror.
 *
 * Draws the estimated angular profile B(t)/t as a closed polygon, plus a
 * dashed overlay of the same profile reflected through the x-axis: lattice
 * symmetry says the two should coincide up to Monte-Carlo noise, so any gap
 * is visible at a glance.  Unpopulated bins (NaN radius) are skipped.
 */

import { BoundaryRow } from "./schemas.js";
import { Svg, fmt } from "./svg.js";

export interface ShapeOptions {
  stroke?: string;
  mirror?: string;
  axis?: string;
  size?: number;
}

const DEFAULTS: Required<ShapeOptions> = {
  stroke: "#1f4fd8",
  mirror: "#d82121",
  axis: "#999999",
  size: 240,
};

function polygonOf(rows: BoundaryRow[], flip: boolean, scale: number): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  for (const r of rows) {
    if (!Number.isFinite(r.radius)) continue;
    const th = flip ? -r.theta : r.theta;
    pts.push([scale * r.radius * Math.cos(th), -scale * r.radius * Math.sin(th)]);
  }
  if (pts.length >= 2) pts.push(pts[0]!); // close the polygon
  return pts;
}

export function shapeFigure(rows: BoundaryRow[], options: ShapeOptions = {}): string {
  const opt = { ...DEFAULTS, ...options };
  const usable = rows.filter((r) => Number.isFinite(r.radius));
  if (usable.length < 3) throw new Error("shape figure needs at least 3 populated bins");
  const rMax = Math.max(...usable.map((r) => r.radius));
  const scale = opt.size / (2.2 * rMax);
  const half = opt.size / 2;
  const svg = new Svg({ x: -half, y: -half, w: opt.size, h: opt.size });
  svg.line(-half, 0, half, 0, opt.axis, 0.5);
  svg.line(0, -half, 0, half, opt.axis, 0.5);
  svg.polyline(polygonOf(rows, false, scale), opt.stroke, 1.2);
  svg.polyline(polygonOf(rows, true, scale), opt.mirror, 0.8, "3,2");
  svg.text(-half + 4, -half + 12, `max radius ${fmt(rMax)}`, 9);
  svg.text(-half + 4, -half + 24, "dashed: x-axis mirror (symmetry check)", 8, "#666");
  return svg.render();
}
