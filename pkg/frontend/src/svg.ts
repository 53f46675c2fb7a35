/** Dependency-free SVG chart builder: line charts with optional log axes
 * and legends, and simple bar charts.  Pure functions of their inputs.
 */

export interface Series {
  label: string;
  points: [number, number][];
  dashed?: boolean;
  markers?: boolean;
}

export interface LineChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
  logX?: boolean;
  logY?: boolean;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const MARGIN = { top: 42, right: 160, bottom: 48, left: 64 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function ticks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

export function lineChart(opts: LineChartOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 440;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const pts = opts.series.flatMap((s) => s.points).filter(
    ([x, y]) => Number.isFinite(x) && Number.isFinite(y) &&
      (!opts.logX || x > 0) && (!opts.logY || y > 0),
  );
  if (pts.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="20" y="40">${esc(opts.title)}: no data</text></svg>`;
  }
  const tx = (v: number) => (opts.logX ? Math.log10(v) : v);
  const ty = (v: number) => (opts.logY ? Math.log10(v) : v);
  let xLo = Math.min(...pts.map(([x]) => tx(x)));
  let xHi = Math.max(...pts.map(([x]) => tx(x)));
  let yLo = Math.min(...pts.map(([, y]) => ty(y)));
  let yHi = Math.max(...pts.map(([, y]) => ty(y)));
  if (xHi === xLo) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yHi === yLo) [yLo, yHi] = [yLo - 1, yHi + 1];
  const yPad = 0.05 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;
  const px = (v: number) => MARGIN.left + ((tx(v) - xLo) / (xHi - xLo)) * innerW;
  const py = (v: number) => MARGIN.top + innerH - ((ty(v) - yLo) / (yHi - yLo)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold">${esc(opts.title)}</text>`,
  );

  // axes, gridlines, ticks
  const xTicks = ticks(xLo, xHi);
  const yTicks = ticks(yLo, yHi);
  for (const t of yTicks) {
    const y = MARGIN.top + innerH - ((t - yLo) / (yHi - yLo)) * innerH;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + innerW}" y2="${y}" stroke="#e0e0e0"/>`,
    );
    const label = opts.logY ? `1e${fmtTick(t)}` : fmtTick(t);
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${y + 4}" text-anchor="end">${label}</text>`,
    );
  }
  for (const t of xTicks) {
    const x = MARGIN.left + ((t - xLo) / (xHi - xLo)) * innerW;
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + innerH}" stroke="#f0f0f0"/>`,
    );
    const label = opts.logX ? `1e${fmtTick(t)}` : fmtTick(t);
    parts.push(
      `<text x="${x}" y="${MARGIN.top + innerH + 16}" text-anchor="middle">${label}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#404040"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 10}" text-anchor="middle">${esc(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${esc(opts.yLabel)}</text>`,
  );

  // series
  opts.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const valid = s.points.filter(
      ([x, y]) => Number.isFinite(x) && Number.isFinite(y) &&
        (!opts.logX || x > 0) && (!opts.logY || y > 0),
    );
    if (valid.length === 0) return;
    const coords = valid.map(([x, y]) => `${px(x).toFixed(2)},${py(y).toFixed(2)}`);
    const dash = s.dashed ? ' stroke-dasharray="6,4"' : "";
    parts.push(
      `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
    );
    if (s.markers !== false) {
      for (const [x, y] of valid) {
        parts.push(
          `<circle cx="${px(x).toFixed(2)}" cy="${py(y).toFixed(2)}" r="3" fill="${color}"/>`,
        );
      }
    }
    const ly = MARGIN.top + 14 + 18 * i;
    const lx = MARGIN.left + innerW + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"${dash}/>`,
    );
    parts.push(`<text x="${lx + 28}" y="${ly}">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}

export interface BarChartOptions {
  title: string;
  yLabel: string;
  bars: { label: string; value: number }[];
  width?: number;
  height?: number;
}

export function barChart(opts: BarChartOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 440;
  const innerW = width - MARGIN.left - 40;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const bars = opts.bars.filter((b) => Number.isFinite(b.value));
  if (bars.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="20" y="40">${esc(opts.title)}: no data</text></svg>`;
  }
  const hi = Math.max(...bars.map((b) => b.value), 0) * 1.1;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold">${esc(opts.title)}</text>`,
  );
  for (const t of ticks(0, hi)) {
    const y = MARGIN.top + innerH - (t / hi) * innerH;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + innerW}" y2="${y}" stroke="#e0e0e0"/>`,
    );
    parts.push(`<text x="${MARGIN.left - 6}" y="${y + 4}" text-anchor="end">${fmtTick(t)}</text>`);
  }
  const bw = innerW / bars.length;
  bars.forEach((b, i) => {
    const x = MARGIN.left + i * bw + 0.15 * bw;
    const h = (b.value / hi) * innerH;
    const y = MARGIN.top + innerH - h;
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${(0.7 * bw).toFixed(2)}" height="${h.toFixed(2)}" fill="${color}"/>`,
    );
    parts.push(
      `<text x="${(x + 0.35 * bw).toFixed(2)}" y="${(y - 6).toFixed(2)}" text-anchor="middle">${fmtTick(b.value)}</text>`,
    );
    parts.push(
      `<text x="${(x + 0.35 * bw).toFixed(2)}" y="${MARGIN.top + innerH + 16}" text-anchor="middle">${esc(b.label)}</text>`,
    );
  });
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#404040"/>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${esc(opts.yLabel)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n");
}
