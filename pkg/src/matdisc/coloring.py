"""Partial and full colorings via Gaussian projection onto discrepancy bodies.

The partial-coloring primitive samples a Gaussian and computes its
projection onto {z : z + y in [-1,1]^n, ||sum_i z_i A_i||_Sq <= t} by
Dykstra-style alternating projections between the cube and the
half-spaces produced by the spectral separation oracle.  A single
projection of a unit Gaussian freezes roughly a 0.32 fraction of the
coordinates even when the body contains the whole cube, so one call
composes several project-and-freeze rounds on the still-active
coordinates (same t, triangle inequality on the discrepancy) until at
least half the coordinates sit at +-1; the achieved constant c is
measured and recorded, never assumed.  If freezing stalls, the call
retries with t scaled up by a growth factor.

The full-coloring iteration runs the primitive on the active set with a
per-size target t = bound_fn(|active|) until every coordinate is at +-1
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import eval_discrepancy, eval_discrepancy_batch, separation_oracle
from .instances import Instance


@dataclass
class PartialColoringParams:
    sigma: float = 1.0
    delta_freeze: float = 1e-6
    oracle_cap_per_coord: int = 50
    growth: float = 1.25
    max_retries: int = 8
    max_inner_rounds: int = 16
    seed: int = 0

    def validate(self) -> None:
        if min(self.sigma, self.delta_freeze, self.growth) <= 0:
            raise ValueError("partial coloring parameters must be positive")
        if self.delta_freeze > 1e-3:
            raise ValueError(f"delta_freeze must be <= 1e-3, got {self.delta_freeze}")


@dataclass
class Coloring:
    """A partial coloring x with shift y; frozen coordinates have |x_i + y_i| = 1."""

    x: np.ndarray
    y: np.ndarray
    frozen: frozenset
    t_requested: float
    t_used: float
    discrepancy: float
    measured_c: float
    retries: int
    inner_rounds: int
    oracle_calls: int

    @property
    def combined(self) -> np.ndarray:
        return self.x + self.y

    def check(self, delta_freeze: float = 1e-6) -> None:
        combined = self.combined
        if np.max(np.abs(combined)) > 1 + 1e-9:
            raise AssertionError("coloring leaves the cube")
        at_face = set(np.flatnonzero(np.abs(combined) >= 1 - delta_freeze).tolist())
        if at_face != set(self.frozen):
            raise AssertionError("frozen set inconsistent with coordinates at +-1")


class PartialColoringError(RuntimeError):
    """Raised when no attempt froze half the coordinates; carries the best attempt."""

    def __init__(self, message: str, best: Coloring | None = None, round_index: int | None = None):
        super().__init__(message)
        self.best = best
        self.round_index = round_index


def _project_body_cube(
    inst: Instance,
    g: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    t: float,
    q: float,
    budget: int,
) -> tuple[np.ndarray | None, int]:
    """Alternating projections of g onto cube [lo, hi] intersect the body.

    Returns (point or None, oracle calls used).  The point, when found, is
    exact on the cube faces it touches (it is returned right after a cube
    clip) and feasible for the separation oracle.
    """
    z = g.copy()
    p_cube = np.zeros_like(z)
    used = 0
    accept = t + 1e-9 * max(1.0, t)
    while used < budget:
        w = np.clip(z + p_cube, lo, hi)
        p_cube = z + p_cube - w
        z = w
        res = separation_oracle(inst, z, t, q)
        used += 1
        if res.value <= accept:
            return z, used
        grad = res.gradient
        gg = float(grad @ grad)
        if gg <= 1e-300:
            return z, used
        z = z - ((res.value - t) / gg) * grad
    return None, used


def _zero_instance(inst: Instance) -> bool:
    return not np.any(inst.stack)


def partial_color(
    inst: Instance,
    t: float,
    y: np.ndarray | None = None,
    params: PartialColoringParams | None = None,
    q: float | None = None,
) -> Coloring:
    """Find x with x + y in [-1,1]^n, at least n/2 coordinates of x + y at
    +-1 exactly, and ||sum_i x_i A_i||_Sq <= c*t with c recorded."""
    params = params or PartialColoringParams()
    params.validate()
    if t <= 0:
        raise ValueError(f"target t must be positive, got {t}")
    q = inst.q if q is None else q
    n = inst.n
    y = np.zeros(n) if y is None else np.asarray(y, dtype=float).copy()
    if y.shape != (n,):
        raise ValueError(f"shift has shape {y.shape}, expected ({n},)")
    if np.max(np.abs(y)) >= 1.0:
        raise ValueError("shift must lie strictly inside (-1,1)^n")

    if _zero_instance(inst):
        # the body is all of R^n: snap every coordinate to its nearer face
        s = np.where(y >= 0, 1.0, -1.0)
        x = s - y
        return Coloring(
            x=x, y=y, frozen=frozenset(range(n)), t_requested=t, t_used=t,
            discrepancy=0.0, measured_c=0.0, retries=0, inner_rounds=0, oracle_calls=0,
        )

    rng = np.random.default_rng(params.seed)
    need = n  # 2*|frozen| >= n
    best: Coloring | None = None
    t_cur = float(t)
    for attempt in range(params.max_retries + 1):
        x = np.zeros(n)
        shift = y.copy()
        frozen: set[int] = set()
        budget = params.oracle_cap_per_coord * n
        calls = 0
        stalls = 0
        rounds = 0
        while 2 * len(frozen) < need and rounds < params.max_inner_rounds:
            rounds += 1
            active = np.flatnonzero(np.abs(shift) < 1 - params.delta_freeze)
            if active.size == 0:
                break
            sub = _restrict(inst, active)
            g = params.sigma * rng.standard_normal(active.size)
            # increments must keep both x and x + y inside the cube
            lo = np.maximum(-1.0 - x[active], -1.0 - shift[active])
            hi = np.minimum(1.0 - x[active], 1.0 - shift[active])
            z, used = _project_body_cube(sub, g, lo, hi, t_cur, q, budget - calls)
            calls += used
            if z is None:
                break
            x[active] += z
            shift[active] += z
            newly = active[np.abs(shift[active]) >= 1 - params.delta_freeze]
            if newly.size == 0:
                stalls += 1
                if stalls >= 2:
                    # fractional drift can pin x at a cube face and make the
                    # remaining faces unreachable; discard the drift on the
                    # active coordinates and resample at the same t
                    x[active] = 0.0
                    shift[active] = y[active]
                    stalls = 0
                continue
            stalls = 0
            # snap to exactly +-1, absorbing the <= delta_freeze perturbation
            snap = np.sign(shift[newly]) - shift[newly]
            x[newly] += snap
            shift[newly] = np.sign(shift[newly])
            frozen.update(newly.tolist())

        disc = eval_discrepancy(inst, x, q)
        col = Coloring(
            x=x, y=y, frozen=frozenset(frozen), t_requested=t, t_used=t_cur,
            discrepancy=disc, measured_c=disc / t, retries=attempt,
            inner_rounds=rounds, oracle_calls=calls,
        )
        if 2 * len(frozen) >= need:
            return col
        if best is None or len(col.frozen) > len(best.frozen):
            best = col
        t_cur *= params.growth
    raise PartialColoringError(
        f"no attempt froze {need}/2 coordinates after {params.max_retries + 1} tries "
        f"(best froze {len(best.frozen) if best else 0})",
        best=best,
    )


def _restrict(inst: Instance, idx: np.ndarray) -> Instance:
    return Instance(
        n=int(idx.size), m=inst.m, p=inst.p, q=inst.q,
        matrices=[inst.matrices[i] for i in idx],
        r=inst.r, h=inst.h, label=inst.label, seed=inst.seed,
        symmetric=inst.symmetric,
    )


@dataclass
class RoundRecord:
    active: int
    t: float
    discrepancy: float
    retries: int
    oracle_calls: int


@dataclass
class FullColoring:
    x: np.ndarray
    discrepancy: float
    rounds: list[RoundRecord] = field(default_factory=list)
    round_sum: float = 0.0
    geometric_reference: float | None = None
    geometric_ratio: float | None = None

    @property
    def rounds_executed(self) -> int:
        return len(self.rounds)


def full_color(
    inst: Instance,
    bound_fn,
    params: PartialColoringParams | None = None,
    q: float | None = None,
    beta: float | None = None,
) -> FullColoring:
    """Iterate partial colorings on the active set until x is in {+-1}^n.

    bound_fn maps the active-set size to the per-round target t.  The
    active set at least halves every round, so about log2(n) rounds plus
    cleanup are executed; partial-coloring failures propagate with the
    round index attached.

    When bound_fn(s) is proportional to s^beta, pass `beta` to report the
    achieved discrepancy against the geometric-sum reference
    (1 - 2^-beta)^-1 * bound_fn(n).
    """
    params = params or PartialColoringParams()
    q = inst.q if q is None else q
    n = inst.n
    x = np.zeros(n)
    seeds = np.random.SeedSequence(params.seed).spawn(int(np.log2(max(n, 2))) + 9)
    rounds: list[RoundRecord] = []
    cap = len(seeds)
    for rnd in range(cap):
        active = np.flatnonzero(np.abs(x) < 1.0)
        if active.size == 0:
            break
        t_round = float(bound_fn(int(active.size)))
        if t_round <= 0:
            raise ValueError(f"bound_fn({active.size}) must be positive, got {t_round}")
        sub = _restrict(inst, active)
        round_params = replace(params, seed=int(seeds[rnd].generate_state(1)[0]))
        try:
            col = partial_color(sub, t_round, y=x[active], params=round_params, q=q)
        except PartialColoringError as e:
            raise PartialColoringError(
                f"round {rnd} (active={active.size}, t={t_round:.4g}): {e}",
                best=e.best, round_index=rnd,
            ) from e
        x[active] += col.x
        x[np.abs(x) >= 1 - params.delta_freeze] = np.sign(
            x[np.abs(x) >= 1 - params.delta_freeze]
        )
        rounds.append(
            RoundRecord(
                active=int(active.size), t=t_round, discrepancy=col.discrepancy,
                retries=col.retries, oracle_calls=col.oracle_calls,
            )
        )
    active = np.flatnonzero(np.abs(x) < 1.0)
    if active.size:
        raise PartialColoringError(
            f"{active.size} coordinates still fractional after {cap} rounds",
            round_index=cap,
        )
    disc = eval_discrepancy(inst, x, q)
    reference = ratio = None
    if beta is not None and beta > 0:
        reference = float(bound_fn(n)) / (1.0 - 2.0 ** (-beta))
        ratio = disc / reference
    return FullColoring(
        x=x,
        discrepancy=disc,
        rounds=rounds,
        round_sum=sum(r.discrepancy for r in rounds),
        geometric_reference=reference,
        geometric_ratio=ratio,
    )


def brute_force_min(
    inst: Instance, q: float | None = None, cap: int = 22, block: int = 4096
) -> tuple[np.ndarray, float]:
    """Exact minimum discrepancy over all sign vectors (x_1 fixed to +1 by
    the x -> -x symmetry), evaluated in vectorized blocks."""
    if inst.n > cap:
        raise ValueError(f"brute force capped at n <= {cap}, got n = {inst.n}")
    q = inst.q if q is None else q
    n = inst.n
    total = 1 << (n - 1)
    best_val = np.inf
    best_x = None
    for start in range(0, total, block):
        codes = np.arange(start, min(start + block, total), dtype=np.uint64)
        bits = (codes[:, None] >> np.arange(n - 1, dtype=np.uint64)) & 1
        xs = np.empty((codes.size, n))
        xs[:, 0] = 1.0
        xs[:, 1:] = np.where(bits == 1, 1.0, -1.0)
        vals = eval_discrepancy_batch(inst, xs, q)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_x = xs[j].copy()
    return best_x, best_val
