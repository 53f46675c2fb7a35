"""Matrix-discrepancy instances: construction, validation and JSON persistence.

An instance is a family A_1..A_n of m x m matrices with norm exponents
(p, q), p <= q, each matrix Schatten-p normalized to at most 1, plus
optional structure metadata (rank bound r, block size h).  Generators
cover random ensembles (dense, low-rank, block diagonal), the diagonal
Spencer ensemble, and the two lower-bound families: the Hadamard-times-
permutation orthogonal basis and the rank-1 star family.

Files use the `.mdi.json` format: a metadata header plus full dense
row-major matrices; p/q = infinity is encoded as the string "inf".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import sym_check

FORMAT_TAG = "mdi.json/1"
NORM_TOL = 1e-8
RANK_CUTOFF = 1e-10


class InstanceValidationError(ValueError):
    """An instance violates one of its declared invariants."""


def _svals(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(a, compute_uv=False)


def general_schatten_norm(a: np.ndarray, p: float) -> float:
    """Schatten-p norm via singular values; works for non-symmetric matrices."""
    s = _svals(np.asarray(a, dtype=float))
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


@dataclass
class Instance:
    """A family of n matrices in R^{m x m} with exponents p <= q.

    `symmetric` is False only for the raw (unsymmetrized) Hadamard lower
    bound family, which is kept for the exact Parseval identity; the
    coloring pipeline requires symmetric instances.
    """

    n: int
    m: int
    p: float
    q: float
    matrices: list[np.ndarray]
    r: int | None = None
    h: int | None = None
    label: str = ""
    seed: int | None = None
    symmetric: bool = True
    _stack: np.ndarray | None = field(default=None, repr=False, compare=False)

    def validate(self) -> None:
        if self.p < 2:
            raise InstanceValidationError(f"source exponent p must be in [2, inf], got {self.p}")
        if self.p > self.q:
            raise InstanceValidationError(f"requires p <= q, got p={self.p} q={self.q}")
        if len(self.matrices) != self.n:
            raise InstanceValidationError(
                f"expected {self.n} matrices, got {len(self.matrices)}"
            )
        for i, a in enumerate(self.matrices):
            if a.shape != (self.m, self.m):
                raise InstanceValidationError(
                    f"matrix {i + 1} has shape {a.shape}, expected ({self.m}, {self.m})"
                )
            if self.symmetric:
                try:
                    sym_check(a, f"matrix {i + 1}")
                except ValueError as e:
                    raise InstanceValidationError(str(e)) from e
            norm = general_schatten_norm(a, self.p)
            if norm > 1.0 + NORM_TOL:
                raise InstanceValidationError(
                    f"matrix {i + 1} has Schatten-{self.p} norm {norm!r} > 1"
                )
            if self.r is not None:
                s = _svals(a)
                rank = int(np.sum(s > RANK_CUTOFF * max(s.max(initial=0.0), 1e-300)))
                if rank > self.r:
                    raise InstanceValidationError(
                        f"matrix {i + 1} has numerical rank {rank} > declared r={self.r}"
                    )
            if self.h is not None:
                if self.m % self.h != 0:
                    raise InstanceValidationError(
                        f"block size h={self.h} does not divide m={self.m}"
                    )
                if not _is_block_diagonal(a, self.h):
                    raise InstanceValidationError(
                        f"matrix {i + 1} has entries outside its {self.h}x{self.h} "
                        f"diagonal blocks"
                    )

    @property
    def stack(self) -> np.ndarray:
        """(n, m, m) array view of the family; cached."""
        if self._stack is None:
            self._stack = np.stack(self.matrices) if self.n else np.zeros((0, self.m, self.m))
        return self._stack

    @property
    def flat(self) -> np.ndarray:
        """(n, m*m) row-major flattening, for fast evaluation maps."""
        return self.stack.reshape(self.n, self.m * self.m)

    def signed_sum(self, x: np.ndarray) -> np.ndarray:
        """sum_i x_i A_i for a single coefficient vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"coefficient vector has shape {x.shape}, expected ({self.n},)")
        return np.tensordot(x, self.stack, axes=(0, 0))

    def signed_sum_batch(self, xs: np.ndarray) -> np.ndarray:
        """(B, m, m) stack of sums for a (B, n) batch of coefficient vectors."""
        xs = np.asarray(xs, dtype=float)
        return (xs @ self.flat).reshape(xs.shape[0], self.m, self.m)

    def eval_map(self, u: np.ndarray) -> np.ndarray:
        """The evaluation map u -> (<A_1, u>, ..., <A_n, u>)."""
        return self.flat @ np.asarray(u, dtype=float).ravel()

    def is_diagonal(self) -> bool:
        return all(np.count_nonzero(a - np.diag(np.diag(a))) == 0 for a in self.matrices)


def _is_block_diagonal(a: np.ndarray, h: int) -> bool:
    mask = np.ones_like(a, dtype=bool)
    for b in range(a.shape[0] // h):
        mask[b * h : (b + 1) * h, b * h : (b + 1) * h] = False
    return not np.any(a[mask])


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def gen_random(
    n: int,
    m: int,
    p: float,
    r: int | None = None,
    h: int | None = None,
    seed: int = 0,
    q: float | None = None,
) -> Instance:
    """Random symmetric ensemble, Schatten-p normalized to 1.

    Dense: symmetrized Gaussian.  Low-rank (r given): sum of r signed
    Gaussian rank-1 terms.  Block (h given): independent Gaussian blocks.
    """
    if r is not None and h is not None:
        raise InstanceValidationError("r and h are mutually exclusive structure parameters")
    if r is not None and r > m:
        raise InstanceValidationError(f"rank bound r={r} exceeds m={m}")
    if h is not None and m % h != 0:
        raise InstanceValidationError(f"block size h={h} does not divide m={m}")
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(n):
        if r is not None:
            a = np.zeros((m, m))
            for _ in range(r):
                u = rng.standard_normal(m)
                a += rng.choice([-1.0, 1.0]) * np.outer(u, u)
        elif h is not None:
            a = np.zeros((m, m))
            for b in range(m // h):
                g = rng.standard_normal((h, h))
                a[b * h : (b + 1) * h, b * h : (b + 1) * h] = (g + g.T) / 2
        else:
            g = rng.standard_normal((m, m))
            a = (g + g.T) / 2
        norm = general_schatten_norm(a, p)
        if norm > 0:
            a /= norm
        mats.append(a)
    inst = Instance(
        n=n, m=m, p=p, q=(q if q is not None else p), matrices=mats,
        r=r, h=h, label=f"random(n={n},m={m},p={p},r={r},h={h})", seed=seed,
    )
    inst.validate()
    return inst


def gen_diagonal_spencer(n: int, m: int, seed: int = 0) -> Instance:
    """Spencer's vector setting as diagonal matrices: A_i = diag(a_i), a_i in {+-1}^m."""
    rng = np.random.default_rng(seed)
    mats = [np.diag(rng.choice([-1.0, 1.0], size=m)) for _ in range(n)]
    inst = Instance(
        n=n, m=m, p=np.inf, q=np.inf, matrices=mats, h=1,
        label=f"diagonal-spencer(n={n},m={m})", seed=seed,
    )
    inst.validate()
    return inst


def walsh_hadamard(m: int) -> np.ndarray:
    """Walsh-Hadamard matrix of order m (m a power of two), entries +-1."""
    if m < 1 or m & (m - 1):
        raise InstanceValidationError(f"Hadamard order must be a power of two, got {m}")
    h = np.array([[1.0]])
    while h.shape[0] < m:
        h = np.block([[h, h], [h, -h]])
    return h


def gen_hadamard_lower(m: int, p: float = np.inf, symmetrize: bool = True) -> Instance:
    """Orthogonal-basis lower-bound family: A_{i+mj} = D_i P_j, scaled by n^(-1/2p).

    D_i is diagonal from the i-th Hadamard row, P_j the cyclic shift
    permutation with ones where row - col = j (mod m); n = m^2.  With
    `symmetrize`, each raw M embeds as [[0, M], [M^T, 0]] in 2m x 2m.
    The embedding preserves each singular value but doubles its
    multiplicity, so for finite p the embedded family is rescaled by
    2^(-1/p) to keep unit Schatten-p norms (no-op for p = inf).
    """
    had = walsh_hadamard(m)
    n = m * m
    scale = n ** (-1.0 / (2.0 * p)) if not np.isinf(p) else 1.0
    mats = []
    for j in range(m):  # permutation index
        pj = np.zeros((m, m))
        for row in range(m):
            pj[row, (row - j) % m] = 1.0
        for i in range(m):  # diagonal index
            raw = np.diag(had[i]) @ pj
            mats.append(scale * raw)
    if symmetrize:
        embed_scale = 1.0 if np.isinf(p) else 2.0 ** (-1.0 / p)
        full = []
        for raw in mats:
            s = np.zeros((2 * m, 2 * m))
            s[:m, m:] = raw
            s[m:, :m] = raw.T
            full.append(embed_scale * s)
        inst = Instance(
            n=n, m=2 * m, p=p, q=p, matrices=full, r=None, h=None,
            label=f"hadamard-lower(m={m},p={p},sym)", symmetric=True,
        )
    else:
        inst = Instance(
            n=n, m=m, p=p, q=p, matrices=mats, r=None, h=None,
            label=f"hadamard-lower(m={m},p={p},raw)", symmetric=False,
        )
    inst.validate()
    return inst


def gen_rank1_lower(n: int) -> Instance:
    """Rank-1 star family: A_i = (e_i + e_n)(e_i + e_n)^T / 2 for i < n, A_n = 0."""
    if n < 2:
        raise InstanceValidationError(f"rank-1 family needs n >= 2, got {n}")
    mats = []
    for i in range(n - 1):
        v = np.zeros(n)
        v[i] = 1.0
        v[n - 1] = 1.0
        mats.append(0.5 * np.outer(v, v))
    mats.append(np.zeros((n, n)))
    inst = Instance(
        n=n, m=n, p=2, q=np.inf, matrices=mats, r=1,
        label=f"rank1-lower(n={n})",
    )
    inst.validate()
    return inst


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _encode_exponent(p: float):
    return "inf" if np.isinf(p) else p


def _decode_exponent(v) -> float:
    if v == "inf":
        return np.inf
    return float(v)


def save(inst: Instance, path: str | Path) -> None:
    """Write an instance as `.mdi.json` (full dense matrices, lossless floats)."""
    doc = {
        "format": FORMAT_TAG,
        "n": inst.n,
        "m": inst.m,
        "p": _encode_exponent(inst.p),
        "q": _encode_exponent(inst.q),
        "r": inst.r,
        "h": inst.h,
        "label": inst.label,
        "seed": inst.seed,
        "symmetric": inst.symmetric,
        "matrices": [a.tolist() for a in inst.matrices],
    }
    Path(path).write_text(json.dumps(doc))


def load(path: str | Path) -> Instance:
    """Load and re-validate an instance file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InstanceValidationError(f"cannot parse {path}: {e}") from e
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise InstanceValidationError(
            f"{path} is not a {FORMAT_TAG} file (format={doc.get('format') if isinstance(doc, dict) else None!r})"
        )
    try:
        inst = Instance(
            n=int(doc["n"]),
            m=int(doc["m"]),
            p=_decode_exponent(doc["p"]),
            q=_decode_exponent(doc["q"]),
            r=doc.get("r"),
            h=doc.get("h"),
            label=doc.get("label", ""),
            seed=doc.get("seed"),
            symmetric=bool(doc.get("symmetric", True)),
            matrices=[np.asarray(a, dtype=float) for a in doc["matrices"]],
        )
    except (KeyError, TypeError) as e:
        raise InstanceValidationError(f"malformed instance file {path}: {e}") from e
    inst.validate()
    return inst


def spencer_target(n: int, m: int) -> float:
    """sqrt(n log(2m/n)) with constant 1 (vector Spencer shape)."""
    return math.sqrt(n * math.log(2.0 * m / n))
