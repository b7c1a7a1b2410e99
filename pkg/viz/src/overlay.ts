/**
 * overlay.ts — Figure-1 style geodesic overlay.
 *
 * Each path keeps its own stroke; lattice edges shared by two or more paths
 * are re-drawn in the overlap color, so a coalescing pair reads as two
 * distinct heads joined by a shared trunk (the blue/red/purple convention).
 */

import { LatticePoint } from "./schemas.js";
import { Svg } from "./svg.js";

export interface OverlayOptions {
  colors?: string[];
  overlap?: string;
  strokeWidth?: number;
  pad?: number;
}

const DEFAULTS: Required<OverlayOptions> = {
  colors: ["#1f4fd8", "#d82121", "#1f9d3a", "#d88f1f"],
  overlap: "#8d1fd8",
  strokeWidth: 0.4,
  pad: 2,
};

type EdgeName = string;

/** Canonical undirected edge name between adjacent lattice points. */
function edgeName(a: LatticePoint, b: LatticePoint): EdgeName {
  if (a.x < b.x || (a.x === b.x && a.y < b.y)) return `${a.x},${a.y}:${b.x},${b.y}`;
  return `${b.x},${b.y}:${a.x},${a.y}`;
}

export function overlayFigure(paths: LatticePoint[][], options: OverlayOptions = {}): string {
  if (paths.length === 0) throw new Error("overlay needs at least one path");
  const opt = { ...DEFAULTS, ...options };
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const p of paths) {
    for (const v of p) {
      minX = Math.min(minX, v.x);
      maxX = Math.max(maxX, v.x);
      minY = Math.min(minY, -v.y); // screen y grows downward
      maxY = Math.max(maxY, -v.y);
    }
  }
  const svg = new Svg({
    x: minX - opt.pad,
    y: minY - opt.pad,
    w: maxX - minX + 2 * opt.pad,
    h: maxY - minY + 2 * opt.pad,
  });
  paths.forEach((p, i) => {
    svg.polyline(
      p.map((v) => [v.x, -v.y] as [number, number]),
      opt.colors[i % opt.colors.length]!,
      opt.strokeWidth,
    );
  });
  if (paths.length > 1) {
    const count = new Map<EdgeName, number>();
    for (const p of paths) {
      for (let i = 0; i + 1 < p.length; i++) {
        const name = edgeName(p[i]!, p[i + 1]!);
        count.set(name, (count.get(name) ?? 0) + 1);
      }
    }
    const shared = [...count.entries()]
      .filter(([, k]) => k > 1)
      .map(([name]) => name)
      .sort();
    for (const name of shared) {
      const [a, b] = name.split(":");
      const [ax, ay] = a!.split(",").map(Number);
      const [bx, by] = b!.split(",").map(Number);
      svg.line(ax!, -ay!, bx!, -by!, opt.overlap, opt.strokeWidth);
    }
  }
  return svg.render();
}
