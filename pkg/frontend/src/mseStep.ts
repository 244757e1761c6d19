/** Squared estimation error over measurement steps, one log-scale line per policy. */

import { readTrajectory, TrajectoryRow } from "./csv.js";
import { Figure, linearScale, logScale, plotArea, SERIES_COLORS } from "./svg.js";

const FLOOR = 1e-16; // keeps exact-hit steps drawable on the log axis

export function renderMseStep(inPath: string): string {
  const rows = readTrajectory(inPath);
  const fig = new Figure("Squared error of the conditional-mean estimate per step");
  const area = plotArea();

  const kinds: string[] = [];
  const byKind = new Map<string, TrajectoryRow[]>();
  for (const row of rows) {
    if (!byKind.has(row.boundKind)) {
      byKind.set(row.boundKind, []);
      kinds.push(row.boundKind);
    }
    byKind.get(row.boundKind)!.push(row);
  }

  const steps = rows.map((row) => row.step);
  const errors = rows.map((row) => Math.max(row.sqErr, FLOOR));
  const xScale = linearScale(
    steps.length > 0 ? Math.min(...steps) : 1,
    steps.length > 0 ? Math.max(...steps) : 8,
    area.x0, area.x1);
  const yScale = logScale(
    errors.length > 0 ? Math.min(...errors) : 1e-6,
    errors.length > 0 ? Math.max(...errors) : 1,
    area.y0, area.y1);

  kinds.forEach((kind, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const series = byKind.get(kind)!
      .slice()
      .sort((a, b) => a.step - b.step);
    const points = series.map((row): [number, number] =>
      [xScale(row.step), yScale(Math.max(row.sqErr, FLOOR))]);
    fig.polyline(points, "series", color);
    for (const [x, y] of points) {
      fig.circle(x, y, 3, "point", color);
    }
  });
  fig.legend(kinds.map((kind, i) => [kind, SERIES_COLORS[i % SERIES_COLORS.length]]));
  fig.axes(xScale, yScale, "measurement step", "squared error",
           (v) => v.toExponential(0));
  return fig.render();
}
