/** Minimal deterministic SVG plotting primitives: scales, axes, marks. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
  log: boolean;
}

function makeScale(domain: [number, number], range: [number, number], log: boolean): Scale {
  const [d0, d1] = log ? [Math.log10(domain[0]), Math.log10(domain[1])] : domain;
  const span = d1 - d0 || 1;
  const fn = ((value: number) => {
    const v = log ? Math.log10(value) : value;
    return range[0] + ((v - d0) / span) * (range[1] - range[0]);
  }) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.log = log;
  return fn;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale(domain, range, false);
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale(domain, range, true);
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) return [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

export function positiveExtent(values: number[]): [number, number] {
  const positive = values.filter((v) => Number.isFinite(v) && v > 0);
  if (positive.length === 0) return [0.1, 10];
  const lo = Math.min(...positive);
  const hi = Math.max(...positive);
  return [lo / 1.5, hi * 1.5];
}

const fmt = (v: number) => {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
};

export class Svg {
  parts: string[] = [];

  constructor(
    public width: number,
    public height: number,
  ) {}

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1, dash = ""): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) pts.push(`${r(xs[i])},${r(ys[i])}`);
    }
    if (pts.length < 2) return;
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    if (!Number.isFinite(x) || !Number.isFinite(y)) return;
    this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.parts.push(
      `<rect x="${r(x)}" y="${r(y)}" width="${r(Math.max(w, 0))}" height="${r(Math.max(h, 0))}" fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  text(x: number, y: number, content: string, size = 11, anchor = "start", rotate = 0): void {
    const transform = rotate ? ` transform="rotate(${rotate} ${r(x)} ${r(y)})"` : "";
    this.parts.push(
      `<text x="${r(x)}" y="${r(y)}" font-size="${size}" font-family="sans-serif" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>` +
      this.parts.join("") +
      `</svg>`
    );
  }
}

function r(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Panel {
  x0: number;
  y0: number;
  w: number;
  h: number;
  xScale: Scale;
  yScale: Scale;
}

function logTicks(domain: [number, number]): number[] {
  const ticks: number[] = [];
  const lo = Math.ceil(Math.log10(domain[0]));
  const hi = Math.floor(Math.log10(domain[1]));
  const step = Math.max(1, Math.ceil((hi - lo) / 6));
  for (let e = lo; e <= hi; e += step) ticks.push(10 ** e);
  return ticks.length >= 2 ? ticks : [domain[0], domain[1]];
}

function linearTicks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const ticks: number[] = [];
  for (let i = 0; i <= count; i++) ticks.push(lo + ((hi - lo) * i) / count);
  return ticks;
}

/** Draw a framed panel with tick marks, labels and an optional title. */
export function panel(
  svg: Svg,
  x0: number,
  y0: number,
  w: number,
  h: number,
  xDomain: [number, number],
  yDomain: [number, number],
  options: { xLog?: boolean; yLog?: boolean; xLabel?: string; yLabel?: string; title?: string } = {},
): Panel {
  const xScale = options.xLog
    ? logScale(xDomain, [x0, x0 + w])
    : linearScale(xDomain, [x0, x0 + w]);
  const yScale = options.yLog
    ? logScale(yDomain, [y0 + h, y0])
    : linearScale(yDomain, [y0 + h, y0]);
  svg.rect(x0, y0, w, h, "none", "#444");
  const xTicks = options.xLog ? logTicks(xDomain) : linearTicks(xDomain);
  for (const t of xTicks) {
    const px = xScale(t);
    svg.line(px, y0 + h, px, y0 + h + 4, "#444");
    svg.text(px, y0 + h + 15, fmt(t), 9, "middle");
  }
  const yTicks = options.yLog ? logTicks(yDomain) : linearTicks(yDomain);
  for (const t of yTicks) {
    const py = yScale(t);
    svg.line(x0 - 4, py, x0, py, "#444");
    svg.text(x0 - 6, py + 3, fmt(t), 9, "end");
  }
  if (options.xLabel) svg.text(x0 + w / 2, y0 + h + 30, options.xLabel, 11, "middle");
  if (options.yLabel) svg.text(x0 - 42, y0 + h / 2, options.yLabel, 11, "middle", -90);
  if (options.title) svg.text(x0 + w / 2, y0 - 6, options.title, 12, "middle");
  return { x0, y0, w, h, xScale, yScale };
}

export const SOLVER_COLORS: Record<string, string> = {
  cholesky: "#444444",
  svd: "#888888",
  lu: "#bbbbbb",
};

export function solverColor(solver: string): string {
  return SOLVER_COLORS[solver] ?? "#d62728";
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

export function quantile(values: number[], q: number): number {
  const sorted = [...values].sort((a, b) => a - b);
  const pos = (sorted.length - 1) * q;
  const base = Math.floor(pos);
  const rest = pos - base;
  return base + 1 < sorted.length
    ? sorted[base] + rest * (sorted[base + 1] - sorted[base])
    : sorted[base];
}

/** Draw a box-and-whisker glyph for the given sample. */
export function boxplot(svg: Svg, p: Panel, xCenter: number, sample: number[], width: number, color: string): void {
  if (sample.length === 0) return;
  const q25 = p.yScale(quantile(sample, 0.25));
  const q75 = p.yScale(quantile(sample, 0.75));
  const med = p.yScale(median(sample));
  const lo = p.yScale(Math.min(...sample));
  const hi = p.yScale(Math.max(...sample));
  svg.line(xCenter, lo, xCenter, q25, color);
  svg.line(xCenter, q75, xCenter, hi, color);
  svg.rect(xCenter - width / 2, q75, width, q25 - q75, "none", color);
  svg.line(xCenter - width / 2, med, xCenter + width / 2, med, color, 2);
}

/** Blue colormap used for bounded-fraction encodings (0 -> light, 1 -> dark). */
export function blueColormap(fraction: number): string {
  const f = Math.max(0, Math.min(1, fraction));
  const channel = Math.round(230 - 160 * f);
  return `rgb(${channel},${channel},255)`;
}
