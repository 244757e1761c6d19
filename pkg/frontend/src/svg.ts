/**
 * Minimal deterministic SVG emitter: fixed canvas size, linear and log scales,
 * line series with point markers, and a small axis/legend vocabulary.
 *
 * Figures are built as element strings so tests can make structural assertions
 * (series counts, marker counts, coincident centers) by scanning the output.
 */

export const WIDTH = 800;
export const HEIGHT = 480;
export const MARGIN = { left: 70, right: 24, top: 28, bottom: 48 };

export const SERIES_COLORS = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

export interface Scale {
  (value: number): number;
  ticks: number[];
}

function spanTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

export function linearScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const span = hi > lo ? hi - lo : 1;
  const scale = ((value: number) => out0 + ((value - lo) / span) * (out1 - out0)) as Scale;
  scale.ticks = spanTicks(lo, hi);
  return scale;
}

export function logScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const safeLo = Math.max(lo, Number.MIN_VALUE);
  const safeHi = Math.max(hi, safeLo * 10);
  const l0 = Math.log10(safeLo);
  const l1 = Math.log10(safeHi);
  const span = l1 > l0 ? l1 - l0 : 1;
  const scale = ((value: number) =>
    out0 + ((Math.log10(Math.max(value, Number.MIN_VALUE)) - l0) / span) * (out1 - out0)) as Scale;
  const decades: number[] = [];
  for (let d = Math.floor(l0); d <= Math.ceil(l1); d += 1) decades.push(10 ** d);
  scale.ticks = decades;
  return scale;
}

const fmt = (value: number): string => {
  const rounded = Number(value.toFixed(3));
  return Object.is(rounded, -0) ? "0" : String(rounded);
};

export function formatTick(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(0);
  }
  return fmt(value);
}

export class Figure {
  private readonly parts: string[] = [];

  constructor(readonly title: string) {}

  add(element: string): void {
    this.parts.push(element);
  }

  circle(x: number, y: number, r: number, cls: string, fill: string, stroke = "none"): void {
    this.add(
      `<circle class="${cls}" cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" ` +
      `fill="${fill}" stroke="${stroke}" stroke-width="1.4"/>`,
    );
  }

  polyline(points: Array<[number, number]>, cls: string, color: string): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(
      `<polyline class="${cls}" points="${path}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
  }

  text(x: number, y: number, content: string, cls = "label", anchor = "middle"): void {
    this.add(
      `<text class="${cls}" x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
      `font-family="sans-serif" font-size="12">${content}</text>`,
    );
  }

  axes(xScale: Scale, yScale: Scale, xLabel: string, yLabel: string,
       yFormat: (v: number) => string = formatTick): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.add(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#333"/>`);
    this.add(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#333"/>`);
    for (const tick of xScale.ticks) {
      const x = xScale(tick);
      this.add(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y0 + 5}" stroke="#333"/>`);
      this.text(x, y0 + 20, formatTick(tick), "tick");
    }
    for (const tick of yScale.ticks) {
      const y = yScale(tick);
      this.add(`<line x1="${x0 - 5}" y1="${fmt(y)}" x2="${x0}" y2="${fmt(y)}" stroke="#333"/>`);
      this.text(x0 - 8, y + 4, yFormat(tick), "tick", "end");
    }
    this.text((x0 + x1) / 2, HEIGHT - 10, xLabel, "axis-label");
    this.add(
      `<text class="axis-label" x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">` +
      `${yLabel}</text>`,
    );
  }

  legend(entries: Array<[string, string]>): void {
    entries.forEach(([name, color], i) => {
      const x = WIDTH - MARGIN.right - 150;
      const y = MARGIN.top + 16 * i;
      this.add(
        `<line class="legend-swatch" x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" ` +
        `stroke="${color}" stroke-width="2"/>`,
      );
      this.text(x + 28, y + 4, name, "legend", "start");
    });
  }

  render(): string {
    const head =
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`;
    const background = `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`;
    const title =
      `<text class="title" x="${WIDTH / 2}" y="18" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="14">${this.title}</text>`;
    return [head, background, title, ...this.parts, "</svg>", ""].join("\n");
  }
}

export function plotArea(): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}
