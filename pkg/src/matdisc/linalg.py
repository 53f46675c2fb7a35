"""Dense symmetric linear algebra: eigendecompositions, spectral functions,
Schatten norms, Frobenius inner products and quantum relative entropy.

All operations take plain float ndarrays.  Symmetric inputs are validated
against an absolute tolerance scaled by the Frobenius norm; matrices that
fail the check are rejected rather than silently symmetrized.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

# Symmetry / reconstruction tolerances for double precision at m <= 256.
SYM_ATOL = 1e-12
RECON_RTOL = 1e-8
# Eigenvalues of X below this cutoff are treated as 0 in x*log(x).
ZERO_EIG_CUTOFF = 1e-12


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class Spectrum(NamedTuple):
    """Eigendecomposition with eigenvalues sorted descending.

    ``eigenvectors[:, j]`` is the unit eigenvector for ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def sym_check(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate that `a` is a square symmetric float matrix; return it as ndarray."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    skew = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if skew > SYM_ATOL * scale:
        raise DomainError(
            f"{name} is not symmetric: max |a - a.T| = {skew:.3e} "
            f"exceeds {SYM_ATOL * scale:.3e}"
        )
    return a


def sym_eig(a: np.ndarray) -> Spectrum:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    a = sym_check(a)
    w, v = np.linalg.eigh(a)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def schatten_norm(a: np.ndarray, p: float) -> float:
    """Schatten-p norm: lp norm of the eigenvalue vector (symmetric input).

    p = inf gives the operator norm, p = 2 the Frobenius norm, p = 1 the
    trace norm.
    """
    if p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    a = sym_check(a)
    w = np.abs(np.linalg.eigvalsh(a))
    return _lp(w, p)


def _lp(absvals: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(absvals.max(initial=0.0))
    if p == 1:
        return float(absvals.sum())
    if p == 2:
        return float(np.sqrt(np.sum(absvals**2)))
    top = absvals.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # factor out the max to avoid overflow for large p
    return float(top * np.sum((absvals / top) ** p) ** (1.0 / p))


def schatten_norm_batch(stack: np.ndarray, p: float) -> np.ndarray:
    """Schatten-p norms of a (..., m, m) stack of symmetric matrices."""
    w = np.abs(np.linalg.eigvalsh(stack))
    if np.isinf(p):
        return w.max(axis=-1)
    if p == 2:
        return np.sqrt((w**2).sum(axis=-1))
    if p == 1:
        return w.sum(axis=-1)
    top = w.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = (((w / safe) ** p).sum(axis=-1)) ** (1.0 / p) * safe[..., 0]
    return np.where(top[..., 0] > 0, out, 0.0)


def spectral_fn(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar map to the spectrum: sum_j f(lambda_j) v_j v_j^T."""
    spec = sym_eig(a)
    fe = np.asarray(f(spec.eigenvalues), dtype=float)
    if not np.all(np.isfinite(fe)):
        raise DomainError("scalar map produced non-finite values on the spectrum")
    v = spec.eigenvectors
    return (v * fe) @ v.T


def sym_exp(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric matrix."""
    return spectral_fn(a, np.exp)


def sym_log(a: np.ndarray) -> np.ndarray:
    """Matrix logarithm; requires a positive definite input."""
    spec = sym_eig(a)
    if spec.eigenvalues[-1] <= 0:
        raise DomainError(
            f"log requires a positive definite matrix; min eigenvalue "
            f"{spec.eigenvalues[-1]:.3e}"
        )
    v = spec.eigenvectors
    return (v * np.log(spec.eigenvalues)) @ v.T


def signed_power(a: np.ndarray, alpha: float) -> np.ndarray:
    """Signed spectral power: sum_j sign(lambda_j) |lambda_j|^alpha v_j v_j^T."""
    return spectral_fn(a, lambda w: np.sign(w) * np.abs(w) ** alpha)


def frob_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius inner product tr(a^T b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.tensordot(a, b, axes=2))


def vn_entropy_neg(x: np.ndarray) -> float:
    """tr(X log X) for PSD X, with 0*log(0) = 0 (negative von Neumann entropy)."""
    w = np.linalg.eigvalsh(sym_check(x, "X"))
    if w[0] < -1e-8:
        raise DomainError(f"X is not PSD: min eigenvalue {w[0]:.3e}")
    w = w[w > ZERO_EIG_CUTOFF]
    return float(np.sum(w * np.log(w)))


def quantum_rel_entropy(x: np.ndarray, y: np.ndarray) -> float:
    """Quantum relative entropy S(X||Y) = tr(X log X) - tr(X log Y).

    X must be PSD with trace 1 (within 1e-8); Y must be positive definite.
    Null eigenvalues of X contribute 0 via the 0*log(0) = 0 convention.
    """
    x = sym_check(x, "X")
    y = sym_check(y, "Y")
    if x.shape != y.shape:
        raise DomainError(f"dimension mismatch: {x.shape} vs {y.shape}")
    tr = float(np.trace(x))
    if abs(tr - 1.0) > 1e-8:
        raise DomainError(f"X must have trace 1, got {tr!r}")
    wx = np.linalg.eigvalsh(x)
    if wx[0] < -1e-8:
        raise DomainError(f"X is not PSD: min eigenvalue {wx[0]:.3e}")
    wy, vy = np.linalg.eigh(y)
    if wy[0] <= ZERO_EIG_CUTOFF:
        raise DomainError(
            f"Y must be positive definite: min eigenvalue {wy[0]:.3e}"
        )
    log_y = (vy * np.log(wy)) @ vy.T
    return vn_entropy_neg(x) - frob_inner(x, log_y)


def random_symmetric(m: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian symmetric matrix (G + G^T)/2 scaled."""
    g = rng.standard_normal((m, m))
    return scale * (g + g.T) / 2.0


def random_spectraplex(m: int, rng: np.random.Generator) -> np.ndarray:
    """Random PSD trace-1 matrix (normalized Wishart, full rank a.s.)."""
    g = rng.standard_normal((m, m))
    x = g @ g.T
    return x / np.trace(x)
