/** Minimal CSV reader for the experiment runner's output files.
 *
 * The runner writes one header row and unquoted comma-separated values
 * (floats at 17 significant digits, "inf" for infinite exponents, empty
 * cells for nulls), so no quoting rules are needed here.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((col, i) => {
      row[col] = cells[i] ?? "";
    });
    return row;
  });
  return { header, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Numeric cell: "inf" maps to Infinity, empty to NaN. */
export function num(row: Record<string, string>, col: string): number {
  const v = row[col];
  if (v === undefined || v === "") return NaN;
  if (v === "inf" || v === "Infinity") return Infinity;
  return Number(v);
}

export function requireColumns(table: Table, cols: string[], where: string): void {
  const missing = cols.filter((c) => !table.header.includes(c));
  if (missing.length > 0) {
    throw new Error(`${where}: missing columns: ${missing.join(", ")}`);
  }
}
