import numpy as np
import pytest

from matdisc.linalg import (
    DomainError,
    frob_inner,
    quantum_rel_entropy,
    random_spectraplex,
    random_symmetric,
    schatten_norm,
    schatten_norm_batch,
    signed_power,
    spectral_fn,
    sym_eig,
    sym_exp,
    sym_log,
)


def char_poly_roots(a: np.ndarray) -> np.ndarray:
    """Oracle: eigenvalues as roots of the characteristic polynomial.

    Coefficients come from the Faddeev-LeVerrier recurrence (traces of
    powers), roots from the companion matrix via np.roots -- a different
    code path than the symmetric eigensolver under test.
    """
    m = a.shape[0]
    coeffs = np.zeros(m + 1)
    coeffs[0] = 1.0
    mk = np.eye(m)
    for k in range(1, m + 1):
        mk = a @ mk
        ck = -np.trace(mk) / k
        coeffs[k] = ck
        mk = mk + ck * np.eye(m)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


class TestSymEig:
    def test_identity(self):
        spec = sym_eig(np.eye(3))
        assert np.allclose(spec.eigenvalues, [1, 1, 1])

    def test_reflection_2x2(self):
        spec = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(spec.eigenvalues, [1.0, -1.0])

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_char_poly_oracle(self, seed):
        rng = np.random.default_rng(seed)
        a = random_symmetric(6, rng)
        spec = sym_eig(a)
        assert np.allclose(spec.eigenvalues, char_poly_roots(a), atol=1e-6)

    def test_reconstruction(self):
        rng = np.random.default_rng(3)
        a = random_symmetric(8, rng)
        spec = sym_eig(a)
        assert np.linalg.norm(spec.reconstruct() - a) <= 1e-8 * np.linalg.norm(a)

    def test_descending_and_orthonormal(self):
        rng = np.random.default_rng(4)
        a = random_symmetric(10, rng)
        w, v = sym_eig(a)
        assert np.all(np.diff(w) <= 1e-12)
        assert np.allclose(v.T @ v, np.eye(10), atol=1e-8)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(DomainError):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSchattenNorm:
    def test_identity_op(self):
        assert schatten_norm(np.eye(3), np.inf) == pytest.approx(1.0)

    def test_pythagorean(self):
        assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0)

    def test_trace_norm_psd(self):
        assert schatten_norm(np.eye(4), 1) == pytest.approx(4.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_in_p(self, seed):
        rng = np.random.default_rng(seed)
        a = random_symmetric(7, rng)
        ps = [1, 1.5, 2, 3, 6, np.inf]
        vals = [schatten_norm(a, p) for p in ps]
        for lo, hi in zip(vals, vals[1:]):
            assert hi <= lo + 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_holder_interpolation(self, seed):
        # ||A||_p <= m^(1/p - 1/q) ||A||_q for p <= q
        rng = np.random.default_rng(10 + seed)
        m = 6
        a = random_symmetric(m, rng)
        for p, q in [(1, 2), (2, np.inf), (1.5, 3), (2, 4)]:
            iq = 0.0 if np.isinf(q) else 1.0 / q
            lhs = schatten_norm(a, p)
            rhs = m ** (1.0 / p - iq) * schatten_norm(a, q)
            assert lhs <= rhs * (1 + 1e-10)

    def test_frob_inner_consistency(self):
        rng = np.random.default_rng(20)
        a = random_symmetric(5, rng)
        assert frob_inner(a, a) == pytest.approx(schatten_norm(a, 2) ** 2, rel=1e-10)

    def test_batch_agrees_with_scalar(self):
        rng = np.random.default_rng(21)
        stack = np.stack([random_symmetric(5, rng) for _ in range(8)])
        for p in [1, 2, 3.5, np.inf]:
            got = schatten_norm_batch(stack, p)
            want = [schatten_norm(a, p) for a in stack]
            assert np.allclose(got, want, rtol=1e-12)

    def test_zero_matrix(self):
        z = np.zeros((3, 3))
        for p in [1, 2, 5, np.inf]:
            assert schatten_norm(z, p) == 0.0


class TestSpectralFn:
    def test_exp_zero(self):
        assert np.allclose(sym_exp(np.zeros((4, 4))), np.eye(4))

    @pytest.mark.parametrize("seed", range(3))
    def test_log_exp_roundtrip(self, seed):
        rng = np.random.default_rng(30 + seed)
        a = random_symmetric(6, rng)
        a *= 2.0 / max(schatten_norm(a, np.inf), 1e-12)
        back = sym_log(sym_exp(a))
        assert np.linalg.norm(back - a) <= 1e-8 * max(1.0, np.linalg.norm(a))

    def test_signed_sqrt_diagonal(self):
        out = signed_power(np.diag([4.0, -9.0]), 0.5)
        assert np.allclose(out, np.diag([2.0, -3.0]))

    def test_identity_map(self):
        rng = np.random.default_rng(33)
        a = random_symmetric(5, rng)
        assert np.allclose(spectral_fn(a, lambda w: w), a, atol=1e-10)

    def test_log_rejects_non_pd(self):
        with pytest.raises(DomainError):
            sym_log(np.diag([1.0, 0.0]))


class TestFrobInner:
    def test_identity(self):
        assert frob_inner(np.eye(2), np.eye(2)) == pytest.approx(2.0)

    def test_zero(self):
        rng = np.random.default_rng(40)
        a = random_symmetric(3, rng)
        assert frob_inner(a, np.zeros((3, 3))) == 0.0

    def test_orthogonal_pair(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        b = np.array([[1.0, 0.0], [0.0, -1.0]])
        assert frob_inner(a, b) == pytest.approx(0.0)

    def test_dim_mismatch(self):
        with pytest.raises(DomainError):
            frob_inner(np.eye(2), np.eye(3))


class TestQuantumRelEntropy:
    def test_self_entropy_zero(self):
        rng = np.random.default_rng(50)
        x = random_spectraplex(4, rng)
        assert quantum_rel_entropy(x, x) == pytest.approx(0.0, abs=1e-10)

    def test_pure_state_vs_uniform(self):
        m = 5
        x = np.zeros((m, m))
        x[0, 0] = 1.0
        assert quantum_rel_entropy(x, np.eye(m) / m) == pytest.approx(np.log(m))

    @pytest.mark.parametrize("seed", range(10))
    def test_pinsker(self, seed):
        # S(X||Y) >= 0.5 ||X - Y||_{S1}^2 (quantum Pinsker)
        rng = np.random.default_rng(60 + seed)
        m = 6
        x = random_spectraplex(m, rng)
        y = 0.5 * (random_spectraplex(m, rng) + np.eye(m) / m)
        s = quantum_rel_entropy(x, y)
        d1 = schatten_norm(x - y, 1)
        assert s >= 0.5 * d1**2 - 1e-10
        assert s >= -1e-12

    def test_rejects_non_pd_reference(self):
        x = np.eye(2) / 2
        with pytest.raises(DomainError):
            quantum_rel_entropy(x, np.diag([1.0, 0.0]))

    def test_rejects_bad_trace(self):
        with pytest.raises(DomainError):
            quantum_rel_entropy(np.eye(2), np.eye(2) / 2)
