/**
 * svg.ts — deterministic string-built SVG primitives.
 *
 * No rendering backend, no floating toolchain: the same inputs produce the
 * same bytes on every run, which is what makes golden-figure tests exact.
 * Numbers are emitted with up to 6 decimals, trailing zeros trimmed.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`cannot format ${v}`);
  const s = v.toFixed(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export interface ViewBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly vb: ViewBox, background = "white") {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" version="1.1" ` +
        `viewBox="${fmt(vb.x)} ${fmt(vb.y)} ${fmt(vb.w)} ${fmt(vb.h)}">`,
    );
    this.rect(vb.x, vb.y, vb.w, vb.h, background);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width: number, dash?: string): void {
    const pts = points.map(([a, b]) => `${fmt(a)},${fmt(b)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"${d}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width: number, dash?: string): void {
    this.polyline(
      [
        [x1, y1],
        [x2, y2],
      ],
      stroke,
      width,
      dash,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, size: number, fill = "#333", anchor = "start"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${fmt(size)}" ` +
        `font-family="sans-serif" fill="${fill}" text-anchor="${anchor}">${escapeXml(content)}</text>`,
    );
  }

  raw(tag: string): void {
    this.parts.push(tag);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Least-squares slope/intercept of y against x. */
export function leastSquares(xs: number[], ys: number[]): { slope: number; intercept: number } {
  const n = xs.length;
  if (n < 2) throw new Error("need at least two points for a fit");
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i]! - mx) ** 2;
    sxy += (xs[i]! - mx) * (ys[i]! - my);
  }
  if (sxx === 0) throw new Error("degenerate fit: zero x variance");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}
