/** SVG assembly: deterministic coordinate formatting, axes with tick labels,
 *  linear and log scales, polylines, embedded rasters. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate ${x}`);
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  toPixel(v: number): number;
  domain: [number, number];
  log: boolean;
}

export function linearScale(d0: number, d1: number, p0: number, p1: number): Scale {
  const span = d1 - d0 || 1;
  return {
    toPixel: (v) => p0 + ((v - d0) / span) * (p1 - p0),
    domain: [d0, d1],
    log: false,
  };
}

export function logScale(d0: number, d1: number, p0: number, p1: number): Scale {
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return {
    toPixel: (v) => p0 + ((Math.log10(v) - l0) / span) * (p1 - p0),
    domain: [d0, d1],
    log: true,
  };
}

export function niceTicks(d0: number, d1: number, target = 6): number[] {
  const span = d1 - d0;
  if (span <= 0) return [d0];
  const step0 = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (step0 <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function logTicks(d0: number, d1: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(d0) - 1e-9); Math.pow(10, e) <= d1 * (1 + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  return out.length ? out : [d0];
}

export function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
}

export class SvgDoc {
  private parts: string[] = [];
  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#000", dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="1"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string; rotate?: boolean } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "middle";
    const fill = opts.fill ?? "#000";
    const tr = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    const esc = s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}"${tr}>${esc}</text>`,
    );
  }

  image(x: number, y: number, w: number, h: number, pngBase64: string): void {
    this.parts.push(
      `<image x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `preserveAspectRatio="none" style="image-rendering:pixelated" ` +
        `href="data:image/png;base64,${pngBase64}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  axes(px0: number, px1: number, py0: number, py1: number, xs: Scale, ys: Scale,
       xlabel: string, ylabel: string): void {
    this.line(px0, py0, px1, py0);
    this.line(px0, py0, px0, py1);
    const xticks = xs.log ? logTicks(xs.domain[0], xs.domain[1]) : niceTicks(xs.domain[0], xs.domain[1]);
    for (const v of xticks) {
      const px = xs.toPixel(v);
      this.line(px, py0, px, py0 + 4);
      this.text(px, py0 + 16, tickLabel(v, xs.log), { size: 10 });
    }
    const yticks = ys.log ? logTicks(ys.domain[0], ys.domain[1]) : niceTicks(ys.domain[0], ys.domain[1]);
    for (const v of yticks) {
      const py = ys.toPixel(v);
      this.line(px0 - 4, py, px0, py);
      this.text(px0 - 7, py + 3, tickLabel(v, ys.log), { size: 10, anchor: "end" });
    }
    this.text((px0 + px1) / 2, py0 + 32, xlabel, { size: 12 });
    this.text(px0 - 44, (py0 + py1) / 2, ylabel, { size: 12, rotate: true });
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
