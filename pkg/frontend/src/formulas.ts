/** Closed-form bound overlays, re-implemented from the same formulas the
 * experiment CLI uses (constant 1, natural logs).  Spot-checked against
 * the CLI `bounds` output in the test suite to 1e-9.
 */

export interface BoundParams {
  n: number;
  m: number;
  p: number; // Infinity allowed
  q: number;
  r?: number | null;
  h?: number | null;
}

function inv(e: number): number {
  return Number.isFinite(e) ? 1 / e : 0;
}

function safeLog(v: number): number {
  return v > 0 ? Math.log(v) : -Infinity;
}

export function kRatio(p: BoundParams): number {
  return Math.min(1, p.m / p.n);
}

export function spencer(p: BoundParams): number {
  if (2 * p.m <= p.n) return NaN;
  return Math.sqrt(p.n * Math.log((2 * p.m) / p.n));
}

export function matrixSpencerConj(p: BoundParams): number {
  return Math.sqrt(p.n * Math.max(1, safeLog(p.m / p.n)));
}

export function lowrank(p: BoundParams): number {
  const r = Math.min(p.r ?? p.m, p.m);
  return Math.sqrt(p.n * Math.max(1, safeLog(r * kRatio(p))));
}

export function block(p: BoundParams): number {
  const h = Math.min(p.h ?? p.m, p.m);
  return Math.sqrt(p.n * Math.max(1, safeLog((h * p.m) / p.n)));
}

export function schatten(p: BoundParams): number {
  const r = Math.min(p.r ?? p.m, p.m);
  const k = kRatio(p);
  let inner = Math.max(1, safeLog(r * k));
  if (Number.isFinite(p.p)) inner = Math.min(p.p, inner);
  return Math.sqrt(p.n * inner) * Math.pow(k, inv(p.p) - inv(p.q));
}

export function banaszczyk(p: BoundParams): number {
  return Math.pow(p.m, 1 + inv(p.q) - inv(p.p));
}

export function komlos(p: BoundParams): number {
  return Math.sqrt(Math.min(p.m, p.n));
}

/** Floor of the rank-1 star family for half-frozen partial colorings. */
export function rank1Floor(p: BoundParams): number {
  return 0.5 * Math.sqrt(p.n / 2);
}

export const OVERLAYS: Record<string, (p: BoundParams) => number> = {
  spencer,
  matrix_spencer_conj: matrixSpencerConj,
  lowrank,
  block,
  schatten,
  banaszczyk,
  komlos,
  rank1_floor: rank1Floor,
};

export function overlayValue(name: string, p: BoundParams): number {
  const fn = OVERLAYS[name];
  if (!fn) {
    throw new Error(
      `unknown overlay ${name}; known: ${Object.keys(OVERLAYS).join(", ")}`,
    );
  }
  return fn(p);
}
