"""Mirror descent in the spectraplex and Schatten setups, and the covering
machinery built on it.

Spectraplex setup: iterates live on {X PSD, tr X = 1}, mirror map is the
negative von Neumann entropy tr(X log X) (1/2-strongly convex w.r.t. the
trace norm, by quantum Pinsker); the Bregman divergence is the quantum
relative entropy and the update is a trace-normalized matrix exponential.

Schatten setup: iterates live on all of R^{m x m} with mirror map
||X||_{p*}^2 / (2(p*-1)) for p* in (1, 2] (1-strongly convex w.r.t. the
Schatten-p* norm); gradient and inverse gradient are signed spectral
power maps.

In both setups the iterate is a function of the start point and the SUM
of the gradients only, which is what makes the reachable set countable:
gradients are always drawn from the 2n matrices {+-A_i}, so at most
sum_t C(t+2n-1, 2n-1) states are reachable in n steps per start.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .instances import Instance
from .linalg import (
    DomainError,
    quantum_rel_entropy,
    random_symmetric,
    schatten_norm,
    signed_power,
    sym_check,
    sym_log,
)

SPECTRAPLEX = "spectraplex"
SCHATTEN = "schatten"

GUARANTEE_SLACK = 1e-6


@dataclass
class MirrorState:
    """Order-free mirror descent state: the iterate is a deterministic
    function of (x0, grad_sum, eta) alone."""

    setup: str
    x0: np.ndarray
    grad_sum: np.ndarray
    eta: float
    t_step: int = 0
    T: int = 0
    d_max: float = 0.0
    L: float = 1.0
    p_star: float | None = None

    @property
    def rho(self) -> float:
        return 0.5 if self.setup == SPECTRAPLEX else 1.0


def eta_for(L: float, rho: float, d_max: float, T: int) -> float:
    """Step size (1/L) sqrt(2 rho D_max / T)."""
    if L <= 0 or rho <= 0 or d_max < 0 or T <= 0:
        raise ValueError("eta_for needs L, rho, T > 0 and D_max >= 0")
    return (1.0 / L) * math.sqrt(2.0 * rho * d_max / T)


def _conjugate(p: float) -> float:
    return p / (p - 1.0)


def grad_potential(x: np.ndarray, p_star: float) -> np.ndarray:
    """Gradient of ||X||_{p*}^2 / (2(p*-1)): ||X||^(2-p*) X^<p*-1> / (p*-1)."""
    if not 1.0 < p_star <= 2.0:
        raise DomainError(f"p* must be in (1, 2], got {p_star}")
    if p_star == 2.0:
        return np.asarray(x, dtype=float)
    norm = schatten_norm(x, p_star)
    if norm == 0.0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return norm ** (2.0 - p_star) * signed_power(x, p_star - 1.0) / (p_star - 1.0)


def grad_potential_inv(w: np.ndarray, p_star: float) -> np.ndarray:
    """Inverse of grad_potential via the conjugate-exponent signed power map."""
    if not 1.0 < p_star <= 2.0:
        raise DomainError(f"p* must be in (1, 2], got {p_star}")
    if p_star == 2.0:
        return np.asarray(w, dtype=float)
    pp = _conjugate(p_star)
    norm = schatten_norm(w, pp)
    if norm == 0.0:
        return np.zeros_like(np.asarray(w, dtype=float))
    return (p_star - 1.0) * norm ** (2.0 - pp) * signed_power(w, pp - 1.0)


def potential(x: np.ndarray, p_star: float) -> float:
    return schatten_norm(x, p_star) ** 2 / (2.0 * (p_star - 1.0))


def bregman(setup: str, x: np.ndarray, y: np.ndarray, p_star: float | None = None) -> float:
    """Bregman divergence of the setup's mirror map."""
    if setup == SPECTRAPLEX:
        return quantum_rel_entropy(x, y)
    if setup == SCHATTEN:
        if p_star is None:
            raise ValueError("schatten setup needs p_star")
        gy = grad_potential(y, p_star)
        return (
            potential(x, p_star)
            - potential(y, p_star)
            - float(np.tensordot(gy, np.asarray(x) - np.asarray(y), axes=2))
        )
    raise ValueError(f"unknown setup {setup!r}")


def md_iterate(state: MirrorState) -> np.ndarray:
    """Current iterate from (x0, grad_sum, eta); independent of gradient order."""
    if state.setup == SPECTRAPLEX:
        return _spectraplex_point(sym_log(state.x0), state.grad_sum, state.eta)
    if state.setup == SCHATTEN:
        if state.p_star is None:
            raise ValueError("schatten setup needs p_star")
        w0 = grad_potential(state.x0, state.p_star)
        return grad_potential_inv(w0 - state.eta * state.grad_sum, state.p_star)
    raise ValueError(f"unknown setup {state.setup!r}")


def _spectraplex_point(log_x0: np.ndarray, grad_sum: np.ndarray, eta: float) -> np.ndarray:
    w = log_x0 - eta * grad_sum
    vals, vecs = np.linalg.eigh((w + w.T) / 2.0)
    e = np.exp(vals - vals.max())  # normalization cancels the shift
    x = (vecs * e) @ vecs.T
    return x / np.trace(x)


@dataclass
class Subgradient:
    index: int
    sign: float
    value: float
    matrix: np.ndarray


def subgrad_fU(inst: Instance, x: np.ndarray, u: np.ndarray) -> Subgradient:
    """Subgradient of f_U(X) = max_i |<A_i, X - U>| from the 2n matrices
    {+-A_i}; lowest index on ties, sign +1 on an exact zero."""
    diff = inst.eval_map(np.asarray(x) - np.asarray(u))
    idx = int(np.argmax(np.abs(diff)))
    val = float(np.abs(diff[idx]))
    sign = 1.0 if diff[idx] >= 0 else -1.0
    return Subgradient(index=idx, sign=sign, value=val, matrix=sign * inst.matrices[idx])


@dataclass
class MDResult:
    best: float
    best_step: int
    bound: float
    d_value: float
    eta: float
    values: list[float]
    gradient_log: list[tuple[int, float]]
    x_final: np.ndarray

    @property
    def within_guarantee(self) -> bool:
        return self.best <= self.bound + GUARANTEE_SLACK


def md_minimize(
    inst: Instance,
    u: np.ndarray,
    x0: np.ndarray,
    setup: str,
    T: int,
    p_star: float | None = None,
    d_max: float | None = None,
) -> MDResult:
    """Run T mirror descent steps on f_U from x0; the best value must meet
    the L sqrt(2 D / (rho T)) guarantee (a theorem, not a heuristic).

    d_max defaults to the exact Bregman divergence D(U, x0) (verification
    mode); the step size is derived from it.
    """
    rho = 0.5 if setup == SPECTRAPLEX else 1.0
    d = bregman(setup, u, x0, p_star) if d_max is None else float(d_max)
    d = max(d, 0.0)
    eta = 0.0 if d == 0.0 else eta_for(1.0, rho, d, T)
    if setup == SPECTRAPLEX:
        log_x0 = sym_log(x0)
        point = lambda gs: _spectraplex_point(log_x0, gs, eta)
    else:
        w0 = grad_potential(x0, p_star)
        point = lambda gs: grad_potential_inv(w0 - eta * gs, p_star)

    x = np.asarray(x0, dtype=float)
    grad_sum = np.zeros_like(x)
    glog: list[tuple[int, float]] = []
    values = []
    best, best_step = math.inf, -1
    for step in range(T + 1):
        sg = subgrad_fU(inst, x, u)
        values.append(sg.value)
        if sg.value < best:
            best, best_step = sg.value, step
        if step == T:
            break
        grad_sum = grad_sum + sg.matrix
        glog.append((sg.index, sg.sign))
        x = point(grad_sum)
    bound = math.sqrt(2.0 * d / (rho * T))
    return MDResult(
        best=best, best_step=best_step, bound=bound, d_value=d, eta=eta,
        values=values, gradient_log=glog, x_final=x,
    )


# ---------------------------------------------------------------------------
# counting and covering
# ---------------------------------------------------------------------------


def net_size_bound(n: int) -> tuple[int, int]:
    """Exact sum_{t=0}^{n} C(t+2n-1, 2n-1) of reachable gradient multisets,
    and the (n+1) C(3n, n) upper bound, both as exact integers."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    exact = sum(math.comb(t + 2 * n - 1, 2 * n - 1) for t in range(n + 1))
    upper = (n + 1) * math.comb(3 * n, n)
    return exact, upper


@dataclass
class NetCover:
    images: np.ndarray
    n_states: int
    size_bound: int
    d_max: float
    eta: float
    sampled_radius: float | None = None
    radius_bound: float | None = None


def default_d_max(setup: str, inst: Instance, p_star: float | None = None) -> float:
    """Worst-case Bregman radius: log m from the uniform start on the
    spectraplex; (p-1)/2 = 1/(2(p*-1)) from 0 on the Schatten-p* ball."""
    if setup == SPECTRAPLEX:
        return math.log(inst.m)
    return 1.0 / (2.0 * (p_star - 1.0))


def sample_feasible(
    setup: str, m: int, rng: np.random.Generator, p_star: float | None = None
) -> np.ndarray:
    """Random member of the setup's feasible set (spectraplex / S_{p*} ball)."""
    if setup == SPECTRAPLEX:
        g = rng.standard_normal((m, m))
        x = g @ g.T
        return x / np.trace(x)
    u = random_symmetric(m, rng)
    norm = schatten_norm(u, p_star)
    if norm == 0:
        return u
    return u * (rng.uniform() / norm)


def enumerate_cover(
    inst: Instance,
    t0: list[np.ndarray],
    setup: str,
    p_star: float | None = None,
    d_max: float | None = None,
    n_cap: int = 8,
    samples: int = 200,
    seed: int = 0,
    budget: int | None = None,
) -> NetCover:
    """Materialize every image A(X) reachable from the starts via any
    multiset of at most `budget` (default n) signed gradients, and audit
    the l_inf cover radius on sampled feasible points.

    States are keyed by the integer gradient multiset (exact, order-free);
    the step size comes from the declared Bregman radius so that every
    mirror descent trajectory is a subset of the enumeration.
    """
    n = inst.n
    if n > n_cap:
        raise ValueError(f"enumeration capped at n <= {n_cap}, got n = {n}")
    budget = n if budget is None else budget
    rho = 0.5 if setup == SPECTRAPLEX else 1.0
    if d_max is None:
        d_max = default_d_max(setup, inst, p_star)
    eta = eta_for(1.0, rho, d_max, n) if d_max > 0 else 0.0

    images = []
    n_states = 0
    for x0 in t0:
        if setup == SPECTRAPLEX:
            log_x0 = sym_log(x0)
            point = lambda gs: _spectraplex_point(log_x0, gs, eta)
        else:
            w0 = grad_potential(x0, p_star)
            point = lambda gs: grad_potential_inv(w0 - eta * gs, p_star)
        seen_sums: dict[tuple, np.ndarray] = {}
        for t in range(budget + 1):
            for combo in itertools.combinations_with_replacement(range(2 * n), t):
                n_states += 1
                coeff = np.zeros(n)
                for item in combo:
                    coeff[item % n] += 1.0 if item < n else -1.0
                key = tuple(coeff)
                img = seen_sums.get(key)
                if img is None:
                    x = point(inst.signed_sum(coeff))
                    img = inst.eval_map(x)
                    seen_sums[key] = img
                images.append(img)
    images = np.asarray(images)
    distinct = np.unique(np.round(images, 9), axis=0)

    rng = np.random.default_rng(seed)
    radius = 0.0
    for _ in range(samples):
        u = sample_feasible(setup, inst.m, rng, p_star)
        target = inst.eval_map(u)
        dist = float(np.min(np.max(np.abs(images - target), axis=1)))
        radius = max(radius, dist)
    exact, _ = net_size_bound(n)
    return NetCover(
        images=distinct,
        n_states=n_states,
        size_bound=exact * len(t0),
        d_max=d_max,
        eta=eta,
        sampled_radius=radius,
        radius_bound=math.sqrt(2.0 * d_max / (rho * n)),
    )


@dataclass
class CoverReport:
    successes: int
    samples: int
    rows: list[dict] = field(default_factory=list)

    @property
    def success_fraction(self) -> float:
        return self.successes / self.samples if self.samples else 1.0


def verify_cover_sampled(
    inst: Instance,
    t0: list[np.ndarray],
    setup: str,
    samples: int,
    seed: int = 0,
    p_star: float | None = None,
) -> CoverReport:
    """For sampled feasible U, run mirror descent from the Bregman-nearest
    start and record whether the achieved value meets sqrt(2 D/(rho n));
    the fraction must be 1.0 (the guarantee is a theorem)."""
    rng = np.random.default_rng(seed)
    rho = 0.5 if setup == SPECTRAPLEX else 1.0
    rows = []
    successes = 0
    for i in range(samples):
        u = sample_feasible(setup, inst.m, rng, p_star)
        ds = [bregman(setup, u, x0, p_star) for x0 in t0]
        j = int(np.argmin(ds))
        res = md_minimize(inst, u, t0[j], setup, T=inst.n, p_star=p_star)
        ok = res.within_guarantee
        successes += ok
        rows.append(
            {
                "sample": i,
                "start": j,
                "d": res.d_value,
                "best": res.best,
                "bound": res.bound,
                "ok": bool(ok),
            }
        )
    return CoverReport(successes=successes, samples=samples, rows=rows)
