/** The three figure types over experiment CSVs:
 *   1. achieved discrepancy vs n with closed-form bound overlays,
 *   2. measured constant (achieved/target ratio) per ensemble,
 *   3. per-coordinate log2 Gaussian-measure curves.
 *
 * Figures are pure functions of CSV + spec; overlay values come from
 * formulas.ts (same closed forms as the experiment CLI).
 */

import { writeFileSync } from "node:fs";
import { num, readCsv, requireColumns, type Table } from "./csv.js";
import { overlayValue, type BoundParams } from "./formulas.js";
import { barChart, lineChart, type Series } from "./svg.js";

export interface PlotSpec {
  csv: string[];
  x: string;
  y: string[];
  overlays: string[];
  out: string;
  logX?: boolean;
  logY?: boolean;
  title?: string;
}

export interface FigureResult {
  out: string;
  written: boolean;
  series: number;
}

function loadAll(paths: string[]): { path: string; table: Table }[] {
  return paths.map((p) => ({ path: p, table: readCsv(p) }));
}

function rowParams(row: Record<string, string>): BoundParams {
  return {
    n: num(row, "n"),
    m: num(row, "m"),
    p: num(row, "p"),
    q: num(row, "q"),
    r: Number.isNaN(num(row, "r")) ? null : num(row, "r"),
    h: Number.isNaN(num(row, "h")) ? null : num(row, "h"),
  };
}

function meanByX(
  table: Table,
  x: string,
  y: string,
): [number, number][] {
  const groups = new Map<number, number[]>();
  for (const row of table.rows) {
    const xv = num(row, x);
    const yv = num(row, y);
    if (Number.isNaN(xv) || Number.isNaN(yv)) continue;
    if (!groups.has(xv)) groups.set(xv, []);
    groups.get(xv)!.push(yv);
  }
  return [...groups.entries()]
    .map(([xv, ys]): [number, number] => [xv, ys.reduce((a, b) => a + b, 0) / ys.length])
    .sort((a, b) => a[0] - b[0]);
}

function firstRowAtX(table: Table, x: string): Map<number, Record<string, string>> {
  const out = new Map<number, Record<string, string>>();
  for (const row of table.rows) {
    const xv = num(row, x);
    if (!Number.isNaN(xv) && !out.has(xv)) out.set(xv, row);
  }
  return out;
}

function label(path: string, table: Table, col: string): string {
  const fam = table.rows[0]?.["family"];
  const base = path.split("/").pop() ?? path;
  return fam ? `${fam} ${col}` : `${base} ${col}`;
}

/** Figure 1: discrepancy (or any y columns) vs x with bound overlays. */
export function plotDiscrepancyCurve(spec: PlotSpec): FigureResult {
  const tables = loadAll(spec.csv);
  const series: Series[] = [];
  for (const { path, table } of tables) {
    if (table.rows.length === 0) {
      console.warn(`warning: ${path} has no data rows; skipping`);
      continue;
    }
    requireColumns(table, [spec.x, ...spec.y], path);
    for (const col of spec.y) {
      series.push({ label: label(path, table, col), points: meanByX(table, spec.x, col) });
    }
    for (const name of spec.overlays) {
      const pts: [number, number][] = [];
      for (const [xv, row] of firstRowAtX(table, spec.x)) {
        pts.push([xv, overlayValue(name, rowParams(row))]);
      }
      pts.sort((a, b) => a[0] - b[0]);
      series.push({ label: name, points: pts, dashed: true, markers: false });
    }
  }
  if (series.length === 0) {
    console.warn(`warning: nothing to plot for ${spec.out}`);
    return { out: spec.out, written: false, series: 0 };
  }
  const svg = lineChart({
    title: spec.title ?? `${spec.y.join(", ")} vs ${spec.x}`,
    xLabel: spec.x,
    yLabel: spec.y.join(", "),
    series,
    logX: spec.logX,
    logY: spec.logY,
  });
  writeFileSync(spec.out, svg);
  return { out: spec.out, written: true, series: series.length };
}

/** Figure 2: measured constant (max ratio) per ensemble label. */
export function plotConstantBars(opts: {
  csv: string[];
  value: string;
  group: string;
  out: string;
  title?: string;
}): FigureResult {
  const tables = loadAll(opts.csv);
  const groups = new Map<string, number>();
  for (const { path, table } of tables) {
    if (table.rows.length === 0) {
      console.warn(`warning: ${path} has no data rows; skipping`);
      continue;
    }
    requireColumns(table, [opts.value, opts.group], path);
    for (const row of table.rows) {
      const g = row[opts.group] || path;
      const v = num(row, opts.value);
      if (Number.isNaN(v)) continue;
      groups.set(g, Math.max(groups.get(g) ?? -Infinity, v));
    }
  }
  if (groups.size === 0) {
    console.warn(`warning: nothing to plot for ${opts.out}`);
    return { out: opts.out, written: false, series: 0 };
  }
  const svg = barChart({
    title: opts.title ?? `measured constant (max ${opts.value}) by ${opts.group}`,
    yLabel: `max ${opts.value}`,
    bars: [...groups.entries()].map(([g, v]) => ({ label: g, value: v })),
  });
  writeFileSync(opts.out, svg);
  return { out: opts.out, written: true, series: groups.size };
}

/** Figure 3: per-coordinate log2-measure curves, one series per CSV. */
export function plotMeasureCurves(opts: {
  csv: string[];
  out: string;
  title?: string;
}): FigureResult {
  const tables = loadAll(opts.csv);
  const series: Series[] = [];
  for (const { path, table } of tables) {
    if (table.rows.length === 0) {
      console.warn(`warning: ${path} has no data rows; skipping`);
      continue;
    }
    requireColumns(table, ["n", "log2_per_coord"], path);
    const solid: [number, number][] = [];
    const censored: [number, number][] = [];
    for (const row of table.rows) {
      const pt: [number, number] = [num(row, "n"), num(row, "log2_per_coord")];
      (row["censored"] === "1" ? censored : solid).push(pt);
    }
    const fam = table.rows[0]?.["family"] ?? path.split("/").pop() ?? path;
    if (solid.length > 0) {
      series.push({ label: fam, points: solid.sort((a, b) => a[0] - b[0]) });
    }
    if (censored.length > 0) {
      series.push({
        label: `${fam} (censored bound)`,
        points: censored.sort((a, b) => a[0] - b[0]),
        dashed: true,
      });
    }
  }
  if (series.length === 0) {
    console.warn(`warning: nothing to plot for ${opts.out}`);
    return { out: opts.out, written: false, series: 0 };
  }
  const svg = lineChart({
    title: opts.title ?? "per-coordinate log2 Gaussian measure",
    xLabel: "n",
    yLabel: "log2(measure)/n",
    series,
  });
  writeFileSync(opts.out, svg);
  return { out: opts.out, written: true, series: series.length };
}
