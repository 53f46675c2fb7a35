/** CLI: render figures from experiment CSVs.
 *
 *   node dist/index.js discrepancy --csv sweep.csv [--csv more.csv]
 *       --x n --y discrepancy [--overlay spencer ...] --out fig.svg [--log-y]
 *   node dist/index.js constants --csv sweep.csv [--value ratio]
 *       [--group family] --out fig.svg
 *   node dist/index.js measure --csv m1.csv [--csv m2.csv] --out fig.svg
 */

import { plotConstantBars, plotDiscrepancyCurve, plotMeasureCurves } from "./figures.js";

interface Flags {
  lists: Map<string, string[]>;
  flags: Set<string>;
}

function parseArgs(argv: string[]): Flags {
  const lists = new Map<string, string[]>();
  const flags = new Set<string>();
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (!a.startsWith("--")) throw new Error(`unexpected argument ${a}`);
    const key = a.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      if (!lists.has(key)) lists.set(key, []);
      lists.get(key)!.push(argv[++i]);
    } else {
      flags.add(key);
    }
  }
  return { lists, flags };
}

function one(f: Flags, key: string, fallback?: string): string {
  const vs = f.lists.get(key);
  if (!vs || vs.length === 0) {
    if (fallback !== undefined) return fallback;
    throw new Error(`missing required --${key}`);
  }
  return vs[vs.length - 1];
}

export function main(argv: string[]): number {
  const [cmd, ...rest] = argv;
  try {
    const f = parseArgs(rest);
    const csv = f.lists.get("csv") ?? [];
    if (csv.length === 0) throw new Error("missing required --csv");
    const out = one(f, "out");
    if (cmd === "discrepancy") {
      const res = plotDiscrepancyCurve({
        csv,
        x: one(f, "x", "n"),
        y: f.lists.get("y") ?? ["discrepancy"],
        overlays: f.lists.get("overlay") ?? [],
        out,
        logX: f.flags.has("log-x"),
        logY: f.flags.has("log-y"),
        title: f.lists.get("title")?.[0],
      });
      console.log(res.written ? `wrote ${res.out} (${res.series} series)` : "nothing written");
      return 0;
    }
    if (cmd === "constants") {
      const res = plotConstantBars({
        csv,
        value: one(f, "value", "ratio"),
        group: one(f, "group", "family"),
        out,
        title: f.lists.get("title")?.[0],
      });
      console.log(res.written ? `wrote ${res.out} (${res.series} bars)` : "nothing written");
      return 0;
    }
    if (cmd === "measure") {
      const res = plotMeasureCurves({ csv, out, title: f.lists.get("title")?.[0] });
      console.log(res.written ? `wrote ${res.out} (${res.series} series)` : "nothing written");
      return 0;
    }
    throw new Error(`unknown figure type ${cmd}; use discrepancy | constants | measure`);
  } catch (e) {
    console.error(`matdisc-plots: ${(e as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
