/**
 * Strict readers for the doasel CSV artifacts.
 *
 * The producer writes plain comma-separated files with a fixed header row and
 * no quoting, so parsing is a straight split; schema violations fail loudly
 * with the offending file, column, or line.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file (expected a header row)`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${path}:${i + 2}: expected ${header.length} cells, got ${cells.length}`,
      );
    }
    return cells;
  });
  return { header, rows };
}

export function requireColumns(table: Table, path: string, columns: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of columns) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new Error(`${path}: missing column '${name}' (header: ${table.header.join(",")})`);
    }
    index.set(name, at);
  }
  return index;
}

export function asNumber(cell: string, path: string, column: string, row: number): number {
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new Error(`${path}:${row + 2}: column '${column}' has non-numeric cell '${cell}'`);
  }
  return value;
}

/** Semicolon-joined 1-based channel indices, e.g. "1;3;4". */
export function asIndexList(cell: string, path: string, column: string, row: number): number[] {
  return cell.split(";").map((part) => {
    const value = Number(part);
    if (!Number.isInteger(value) || value < 1) {
      throw new Error(`${path}:${row + 2}: column '${column}' has bad index list '${cell}'`);
    }
    return value;
  });
}

export interface SelectionRow {
  step: number;
  boundKind: string;
  tx: number[];
  rx: number[];
}

export function readSelections(path: string): SelectionRow[] {
  const table = readTable(path);
  const col = requireColumns(table, path, ["step", "bound_kind", "sel_tx", "sel_rx"]);
  return table.rows.map((cells, i) => ({
    step: asNumber(cells[col.get("step")!], path, "step", i),
    boundKind: cells[col.get("bound_kind")!],
    tx: asIndexList(cells[col.get("sel_tx")!], path, "sel_tx", i),
    rx: asIndexList(cells[col.get("sel_rx")!], path, "sel_rx", i),
  }));
}

export interface TrajectoryRow {
  step: number;
  boundKind: string;
  sqErr: number;
}

export function readTrajectory(path: string): TrajectoryRow[] {
  const table = readTable(path);
  const col = requireColumns(table, path, ["step", "bound_kind", "sq_err"]);
  return table.rows.map((cells, i) => ({
    step: asNumber(cells[col.get("step")!], path, "step", i),
    boundKind: cells[col.get("bound_kind")!],
    sqErr: asNumber(cells[col.get("sq_err")!], path, "sq_err", i),
  }));
}

export interface MseSnrRow {
  snrDb: number;
  boundKind: string;
  mse: number;
}

export function readMseSnr(path: string): MseSnrRow[] {
  const table = readTable(path);
  const col = requireColumns(table, path, ["snr_db", "bound_kind", "mse"]);
  return table.rows.map((cells, i) => ({
    snrDb: asNumber(cells[col.get("snr_db")!], path, "snr_db", i),
    boundKind: cells[col.get("bound_kind")!],
    mse: asNumber(cells[col.get("mse")!], path, "mse", i),
  }));
}
