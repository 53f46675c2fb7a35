"""Closed-form discrepancy bound calculators, discrepancy evaluation and the
spectral separation oracle for discrepancy bodies.

All asymptotic bounds are evaluated with constant exactly 1; empirical
constants are fitted by the experiment runner and never baked in here.
Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instances import Instance
from .linalg import schatten_norm, schatten_norm_batch, sym_check

# Relative tolerance for eigenvalue ties in the q=inf subgradient.
_TIE_RTOL = 1e-12


@dataclass
class BoundReport:
    """Closed-form bound values for one (n, m, p, q, r, h) configuration.

    `out_of_regime` lists bound names whose theorem hypotheses (m >= n for
    the vector Spencer bound, m >= sqrt(n) for the matrix bounds) fail;
    values are still computed from the formulas.
    """

    n: int
    m: int
    p: float
    q: float
    r: int
    h: int
    k: float
    spencer: float
    matrix_spencer_conj: float
    lowrank: float
    block: float
    schatten: float
    banaszczyk: float
    komlos: float
    out_of_regime: list[str] = field(default_factory=list)

    def named(self) -> dict[str, float]:
        return {
            "spencer": self.spencer,
            "matrix_spencer_conj": self.matrix_spencer_conj,
            "lowrank": self.lowrank,
            "block": self.block,
            "schatten": self.schatten,
            "banaszczyk": self.banaszczyk,
            "komlos": self.komlos,
        }


@dataclass
class SeparationResult:
    """Outcome of one separation-oracle query against {x : ||sum x_i A_i||_Sq <= t}."""

    feasible: bool
    value: float
    gradient: np.ndarray | None = None


def eval_discrepancy(inst: Instance, x: np.ndarray, q: float | None = None) -> float:
    """Schatten-q norm of sum_i x_i A_i (q defaults to the instance's q)."""
    q = inst.q if q is None else q
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise ValueError(f"coloring has shape {x.shape}, expected ({inst.n},)")
    m = inst.signed_sum(x)
    if not inst.symmetric:
        s = np.linalg.svd(m, compute_uv=False)
        if np.isinf(q):
            return float(s.max(initial=0.0))
        return float(np.sum(s**q) ** (1.0 / q))
    return schatten_norm(m, q)


def eval_discrepancy_batch(inst: Instance, xs: np.ndarray, q: float | None = None) -> np.ndarray:
    """Vectorized discrepancies for a (B, n) batch of colorings.

    Diagonal families skip the eigensolver: the spectrum of
    sum_i x_i diag(d_i) is the entrywise sum itself.
    """
    q = inst.q if q is None else q
    xs = np.asarray(xs, dtype=float)
    if inst.is_diagonal():
        diags = np.stack([np.diag(a) for a in inst.matrices])  # (n, m)
        vals = np.abs(xs @ diags)
        if np.isinf(q):
            return vals.max(axis=1)
        return (vals**q).sum(axis=1) ** (1.0 / q)
    sums = inst.signed_sum_batch(xs)
    if not inst.symmetric:
        s = np.linalg.svd(sums, compute_uv=False)
        if np.isinf(q):
            return s.max(axis=-1)
        return (s**q).sum(axis=-1) ** (1.0 / q)
    return schatten_norm_batch(sums, q)


def _safe_log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


def bound_all(
    n: int,
    m: int,
    p: float = np.inf,
    q: float | None = None,
    r: int | None = None,
    h: int | None = None,
) -> BoundReport:
    """Evaluate every closed-form bound with constant 1.

    spencer              sqrt(n log(2m/n))                       [m >= n]
    matrix_spencer_conj  sqrt(n max(1, log(m/n)))
    lowrank              sqrt(n max(1, log(r min(1, m/n))))
    block                sqrt(n max(1, log(hm/n)))
    schatten             sqrt(n min(p, max(1, log(rk)))) k^(1/p-1/q), k = min(1, m/n)
    banaszczyk           m^(1 + 1/q - 1/p)
    komlos               sqrt(min(m, n))
    """
    q = p if q is None else q
    r_eff = min(r, m) if r is not None else m
    h_eff = min(h, m) if h is not None else m
    k = min(1.0, m / n)
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    inv_q = 0.0 if np.isinf(q) else 1.0 / q

    spencer = math.sqrt(n * math.log(2.0 * m / n)) if 2.0 * m > n else float("nan")
    conj = math.sqrt(n * max(1.0, _safe_log(m / n)))
    lowrank = math.sqrt(n * max(1.0, _safe_log(r_eff * k)))
    block = math.sqrt(n * max(1.0, _safe_log(h_eff * m / n)))
    schatten_inner = max(1.0, _safe_log(r_eff * k))
    if not np.isinf(p):
        schatten_inner = min(p, schatten_inner)
    schatten = math.sqrt(n * schatten_inner) * k ** (inv_p - inv_q)
    banaszczyk = float(m) ** (1.0 + inv_q - inv_p)
    komlos = math.sqrt(min(m, n))

    oor = []
    if m < n:
        oor.append("spencer")
    if m * m < n:
        oor.extend(["matrix_spencer_conj", "lowrank", "block", "schatten"])
    return BoundReport(
        n=n, m=m, p=p, q=q, r=r_eff, h=h_eff, k=k,
        spencer=spencer, matrix_spencer_conj=conj, lowrank=lowrank, block=block,
        schatten=schatten, banaszczyk=banaszczyk, komlos=komlos, out_of_regime=oor,
    )


def full_coloring_factor(p: float, q: float) -> float:
    """Partial-to-full coloring cost (1/2 + 1/q - 1/p)^(-1); inf at the p=2, q=inf edge."""
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    denom = 0.5 + inv_q - inv_p
    return math.inf if denom <= 0 else 1.0 / denom


def geometric_round_factor(beta: float) -> float:
    """(1 - 2^-beta)^(-1): total-over-rounds factor when the per-round target is n^beta."""
    if beta <= 0:
        return math.inf
    return 1.0 / (1.0 - 2.0 ** (-beta))


def schatten_subgradient(m_sum: np.ndarray, q: float) -> tuple[float, np.ndarray]:
    """(value, G): ||M||_Sq and a subgradient G with ||G||_{S_q*} = 1, <M, G> = value.

    Finite q: G = ||M||^(1-q) sum_j sign(l_j)|l_j|^(q-1) v_j v_j^T.
    q = inf: G = sign(l) v v^T at an eigenvalue of maximal magnitude
    (lowest index among ties, eigenvalues sorted descending).
    """
    m_sum = sym_check(m_sum, "signed sum")
    w, v = np.linalg.eigh(m_sum)
    w, v = w[::-1], v[:, ::-1]
    aw = np.abs(w)
    if np.isinf(q):
        value = float(aw.max(initial=0.0))
        if value == 0.0:
            return 0.0, np.zeros_like(m_sum)
        j = int(np.argmax(aw >= value * (1.0 - _TIE_RTOL)))
        g = math.copysign(1.0, w[j]) * np.outer(v[:, j], v[:, j])
        return value, g
    value = float((aw**q).sum() ** (1.0 / q))
    if value == 0.0:
        return 0.0, np.zeros_like(m_sum)
    coeff = value ** (1.0 - q) * np.sign(w) * aw ** (q - 1.0)
    g = (v * coeff) @ v.T
    return value, g


def separation_oracle(inst: Instance, x: np.ndarray, t: float, q: float | None = None) -> SeparationResult:
    """Membership test for the discrepancy body at scale t, with a separating
    linear functional on the infeasible side.

    The returned gradient g has g_i = <A_i, G> for a dual-norm-1 subgradient
    G, so <g, x> equals the current norm value and {z : <g, z> <= t}
    contains the body.
    """
    if t <= 0:
        raise ValueError(f"body scale t must be positive, got {t}")
    q = inst.q if q is None else q
    x = np.asarray(x, dtype=float)
    m_sum = inst.signed_sum(x)
    value, g_mat = schatten_subgradient(m_sum, q)
    if value <= t:
        return SeparationResult(feasible=True, value=value)
    grad = inst.eval_map(g_mat)
    return SeparationResult(feasible=False, value=value, gradient=grad)
