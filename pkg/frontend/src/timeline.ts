/**
 * Channel-activation timeline: which Tx/Rx channels each policy keeps active at
 * every measurement step, plus the resulting virtual array in MIMO mode with
 * coincident virtual elements drawn as concentric rings.
 */

import { readSelections, SelectionRow } from "./csv.js";
import { Figure, linearScale, plotArea, SERIES_COLORS } from "./svg.js";

export interface TimelineOptions {
  mode?: "auto" | "simo" | "mimo";
  spacingFactor?: number;
  wavelength?: number;
}

interface Band {
  label: string;
  yTop: number;
  yBottom: number;
}

function elementPosition(index: number, spacingFactor: number, wavelength: number): number {
  return (index - 1) * spacingFactor * wavelength / 2;
}

function groupByKind(rows: SelectionRow[]): Map<string, SelectionRow[]> {
  const groups = new Map<string, SelectionRow[]>();
  for (const row of rows) {
    const bucket = groups.get(row.boundKind) ?? [];
    bucket.push(row);
    groups.set(row.boundKind, bucket);
  }
  return groups;
}

function drawIndexBand(fig: Figure, band: Band, rows: SelectionRow[],
                       pick: (row: SelectionRow) => number[], maxIndex: number,
                       xOf: (step: number) => number, cls: string, color: string): void {
  const yOf = (index: number) =>
    band.yBottom - ((index - 0.5) / maxIndex) * (band.yBottom - band.yTop);
  fig.text(plotArea().x0 - 8, (band.yTop + band.yBottom) / 2, band.label, "band-label", "end");
  for (const row of rows) {
    for (const index of pick(row)) {
      fig.circle(xOf(row.step), yOf(index), 4, `marker ${cls}`, color);
    }
  }
}

function drawVirtualBand(fig: Figure, band: Band, rows: SelectionRow[],
                         xOf: (step: number) => number,
                         spacingFactor: number, wavelength: number): void {
  const positions = (row: SelectionRow): number[] =>
    row.tx.flatMap((t) =>
      row.rx.map((r) =>
        elementPosition(t, spacingFactor, wavelength) +
        elementPosition(r, spacingFactor, wavelength)));
  const everyPosition = rows.flatMap(positions);
  const maxPos = everyPosition.length > 0 ? Math.max(...everyPosition) : 1;
  const yOf = (pos: number) =>
    band.yBottom - 6 - (pos / (maxPos || 1)) * (band.yBottom - band.yTop - 12);
  fig.text(plotArea().x0 - 8, (band.yTop + band.yBottom) / 2, band.label, "band-label", "end");
  for (const row of rows) {
    const counts = new Map<string, number>();
    for (const pos of positions(row)) {
      const key = pos.toFixed(9);
      const seen = counts.get(key) ?? 0;
      counts.set(key, seen + 1);
      // Coincident virtual elements become concentric rings around one center.
      if (seen === 0) {
        fig.circle(xOf(row.step), yOf(pos), 3.2, "marker virt", SERIES_COLORS[2]);
      } else {
        fig.circle(xOf(row.step), yOf(pos), 3.2 + 2.6 * seen, "marker virt",
                   "none", SERIES_COLORS[2]);
      }
    }
  }
}

export function renderTimeline(inPath: string, options: TimelineOptions = {}): string {
  const rows = readSelections(inPath);
  const spacingFactor = options.spacingFactor ?? 0.9;
  const wavelength = options.wavelength ?? 1.0;
  const requested = options.mode ?? "auto";
  const mimo = requested === "mimo" ||
    (requested === "auto" && rows.some((row) => row.tx.length > 1));

  const fig = new Figure("Active channels per measurement step");
  const area = plotArea();
  const steps = rows.map((row) => row.step);
  const minStep = steps.length > 0 ? Math.min(...steps) : 1;
  const maxStep = steps.length > 0 ? Math.max(...steps) : 1;
  const xScale = linearScale(minStep - 0.5, maxStep + 0.5, area.x0, area.x1);
  xScale.ticks = Array.from({ length: maxStep - minStep + 1 }, (_, i) => minStep + i);

  const maxTx = Math.max(1, ...rows.flatMap((row) => row.tx));
  const maxRx = Math.max(1, ...rows.flatMap((row) => row.rx));

  const groups = groupByKind(rows);
  const panelCount = Math.max(1, groups.size);
  const panelHeight = (area.y0 - area.y1) / panelCount;
  let panelIndex = 0;
  for (const [kind, kindRows] of groups) {
    const top = area.y1 + panelIndex * panelHeight;
    const bottom = top + panelHeight - 8;
    fig.text((area.x0 + area.x1) / 2, top + 10, kind, "panel-label");
    const bands = mimo ? 3 : 1;
    const bandHeight = (bottom - (top + 14)) / bands;
    const bandAt = (slot: number, label: string): Band => ({
      label,
      yTop: top + 14 + slot * bandHeight + 2,
      yBottom: top + 14 + (slot + 1) * bandHeight - 2,
    });
    if (mimo) {
      drawIndexBand(fig, bandAt(0, "Tx"), kindRows, (row) => row.tx, maxTx,
                    xScale, "tx", SERIES_COLORS[1]);
      drawIndexBand(fig, bandAt(1, "Rx"), kindRows, (row) => row.rx, maxRx,
                    xScale, "rx", SERIES_COLORS[0]);
      drawVirtualBand(fig, bandAt(2, "virtual"), kindRows, xScale,
                      spacingFactor, wavelength);
    } else {
      drawIndexBand(fig, bandAt(0, "Rx"), kindRows, (row) => row.rx, maxRx,
                    xScale, "rx", SERIES_COLORS[0]);
    }
    panelIndex += 1;
  }

  const yScale = linearScale(0, 1, area.y0, area.y1);
  yScale.ticks = [];
  fig.axes(xScale, yScale, "measurement step", "active channels");
  return fig.render();
}
