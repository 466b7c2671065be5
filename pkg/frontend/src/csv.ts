/** Strict readers for the workbench CSV schemas. */

import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const columns = (parsed.meta.fields ?? []).map((c) => c.trim());
  return { columns, rows: parsed.data };
}

/** Fail with the offending column names when a schema does not match. */
export function requireColumns(table: Table, required: string[], path: string): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing required column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
}

export function numeric(row: Record<string, string>, column: string): number | null {
  const raw = row[column];
  if (raw === undefined || raw === "") return null;
  const value = Number(raw);
  if (Number.isNaN(value)) {
    throw new SchemaError(`column ${column}: not a number: ${raw}`);
  }
  return value;
}

export const RECORD_COLUMNS = [
  "figure_id", "seed", "k", "tau", "p", "beta", "h", "n_train", "solver",
  "kappa", "kappa_hat", "kappa_beta", "theta_x", "theta_y", "theta_z",
  "theta_max", "delta", "vpt", "d_maxima", "e_psd", "bounded", "status",
];

export const SUMMARY_COLUMNS = [
  "figure_id", "k", "tau", "p", "beta", "h", "n_train", "solver",
  "metric", "median", "q25", "q75", "bounded_fraction",
];

export function readRecords(path: string): Table {
  const table = readTable(path);
  requireColumns(table, RECORD_COLUMNS, path);
  return table;
}

export function readSummary(path: string): Table {
  const table = readTable(path);
  requireColumns(table, SUMMARY_COLUMNS, path);
  return table;
}

/** Trajectory CSV: t, x1..xd. Returns times plus one series per coordinate. */
export function readTrajectory(path: string): { t: number[]; series: number[][] } {
  const table = readTable(path);
  requireColumns(table, ["t", "x1"], path);
  const coords = table.columns.filter((c) => /^x\d+$/.test(c));
  const t: number[] = [];
  const series: number[][] = coords.map(() => []);
  for (const row of table.rows) {
    t.push(Number(row.t));
    coords.forEach((c, i) => series[i].push(Number(row[c])));
  }
  return { t, series };
}

/** Two-column helper for psd_*.csv (frequency,power), maxima (s_n,s_next),
 * x_submatrix (tau,seed,kappa_x) and mi (lag,mi) files. */
export function readColumns(path: string, required: string[]): Record<string, number[]> {
  const table = readTable(path);
  requireColumns(table, required, path);
  const out: Record<string, number[]> = {};
  for (const column of required) out[column] = [];
  for (const row of table.rows) {
    for (const column of required) out[column].push(Number(row[column]));
  }
  return out;
}
