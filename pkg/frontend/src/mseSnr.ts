/** Average MSE at the evaluation step versus SNR, one log-scale line per policy. */

import { MseSnrRow, readMseSnr } from "./csv.js";
import { Figure, linearScale, logScale, plotArea, SERIES_COLORS } from "./svg.js";

export function renderMseSnr(inPath: string): string {
  const rows = readMseSnr(inPath);
  const fig = new Figure("Average MSE at the evaluation step vs SNR");
  const area = plotArea();

  const kinds: string[] = [];
  const byKind = new Map<string, MseSnrRow[]>();
  for (const row of rows) {
    if (!byKind.has(row.boundKind)) {
      byKind.set(row.boundKind, []);
      kinds.push(row.boundKind);
    }
    byKind.get(row.boundKind)!.push(row);
  }

  const snrs = rows.map((row) => row.snrDb);
  const mses = rows.map((row) => row.mse);
  const xScale = linearScale(
    snrs.length > 0 ? Math.min(...snrs) : -10,
    snrs.length > 0 ? Math.max(...snrs) : 5,
    area.x0, area.x1);
  const yScale = logScale(
    mses.length > 0 ? Math.min(...mses) : 1e-6,
    mses.length > 0 ? Math.max(...mses) : 1,
    area.y0, area.y1);

  kinds.forEach((kind, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const series = byKind.get(kind)!
      .slice()
      .sort((a, b) => a.snrDb - b.snrDb);
    const points = series.map((row): [number, number] =>
      [xScale(row.snrDb), yScale(row.mse)]);
    fig.polyline(points, "series", color);
    for (const [x, y] of points) {
      fig.circle(x, y, 3, "point", color);
    }
  });
  fig.legend(kinds.map((kind, i) => [kind, SERIES_COLORS[i % SERIES_COLORS.length]]));
  fig.axes(xScale, yScale, "SNR [dB]", "MSE", (v) => v.toExponential(0));
  return fig.render();
}
