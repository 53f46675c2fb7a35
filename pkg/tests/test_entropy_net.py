import json
import math

import numpy as np
import pytest

from matdisc.entropy_net import (
    DomainError,
    EntropyNet,
    NetSizeError,
    audit_opnorm_net,
    block_spectraplex_sampler,
    build_entropy_net,
    entropy_from_op_check,
    mix_with_identity,
    net_error_sampled,
    opnorm_net_spectraplex,
)
from matdisc.linalg import quantum_rel_entropy, random_spectraplex


class TestMixWithIdentity:
    def test_pure_state(self):
        y = np.zeros((2, 2))
        y[0, 0] = 1.0
        assert np.allclose(mix_with_identity(y, 2), np.diag([0.75, 0.25]))

    def test_uniform_fixed_point(self):
        y = np.eye(4) / 4
        assert np.allclose(mix_with_identity(y, 4), y)

    def test_trace_preserved_and_floor(self):
        rng = np.random.default_rng(1)
        y = random_spectraplex(5, rng)
        mixed = mix_with_identity(y, 5)
        assert np.trace(mixed) == pytest.approx(1.0)
        assert np.linalg.eigvalsh(mixed)[0] >= 1.0 / 10 - 1e-12


class TestEntropyFromOpCheck:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_perturbation_pairs(self, seed):
        rng = np.random.default_rng(seed)
        m = 4
        y = random_spectraplex(m, rng)
        x = random_spectraplex(m, rng)
        # blend so the pair is within op distance 1/2, then use eps = 1/2
        x = 0.7 * y + 0.3 * x
        x /= np.trace(x)
        assert entropy_from_op_check(x, y, 0.5)

    def test_equal_pair(self):
        rng = np.random.default_rng(30)
        x = random_spectraplex(4, rng)
        assert entropy_from_op_check(x, x, 1.0 / 4)

    def test_pure_vs_uniform(self):
        m = 4
        x = np.zeros((m, m))
        x[0, 0] = 1.0
        assert entropy_from_op_check(x, np.eye(m) / m, 1.0)

    def test_rejects_small_eps(self):
        x = np.eye(4) / 4
        with pytest.raises(DomainError):
            entropy_from_op_check(x, x, 0.1)

    def test_rejects_distant_pair(self):
        m = 4
        x = np.zeros((m, m))
        x[0, 0] = 1.0
        with pytest.raises(DomainError):
            entropy_from_op_check(x, np.eye(m) / m, 0.3)


class TestOpNormNet:
    def test_h1_singleton(self):
        for eps in (0.1, 0.5, 1.0):
            net = opnorm_net_spectraplex(1, eps)
            assert net.shape == (1, 1, 1) and net[0, 0, 0] == 1.0

    def test_h2_sampled_coverage(self):
        for eps in (0.5, 0.25):
            net = opnorm_net_spectraplex(2, eps)
            assert audit_opnorm_net(net, 2, eps, trials=1000, seed=5) <= eps

    def test_h2_size_monotone_in_eps(self):
        sizes = [len(opnorm_net_spectraplex(2, eps)) for eps in (0.4, 0.2, 0.1)]
        assert sizes[0] <= sizes[1] <= sizes[2]

    def test_h3_audited_coverage(self):
        eps = 0.5
        net = opnorm_net_spectraplex(3, eps, seed=2)
        assert audit_opnorm_net(net, 3, eps, trials=300, seed=7) <= eps

    def test_points_are_spectraplex_members(self):
        net = opnorm_net_spectraplex(2, 0.3)
        for p in net:
            assert np.trace(p) == pytest.approx(1.0)
            assert np.linalg.eigvalsh(p)[0] >= -1e-12

    def test_rejects_unsupported_h(self):
        with pytest.raises(DomainError):
            opnorm_net_spectraplex(5, 0.5)


class TestBuildEntropyNet:
    def test_m4_h1_n4_construction_trace(self):
        net = build_entropy_net(4, 1, 4)
        assert net.N == 8  # eps = h/n = 1/4, N = 2/eps
        assert net.size == math.comb(11, 3) == 165
        assert net.declared_error == pytest.approx(1.0)

    def test_m2_h2_n4_single_block(self):
        net = build_entropy_net(2, 2, 4)
        assert net.ell == 1
        assert net.eps_candidates[0] == pytest.approx(0.5)
        assert net.declared_error == pytest.approx(1.0)

    def test_points_mixed_and_on_spectraplex(self):
        net = build_entropy_net(4, 1, 4)
        pts = net.materialize()
        assert len(pts) == net.size
        for p in pts:
            assert np.trace(p) == pytest.approx(1.0, abs=1e-8)
            assert np.linalg.eigvalsh(p)[0] >= 1.0 / (2 * 4) - 1e-10

    def test_size_cap_coarsens_N(self):
        net = build_entropy_net(16, 1, 8)
        assert net.N_exact == 16
        assert net.N == 8  # halved once to fit the cap
        assert net.size == math.comb(23, 15)
        assert net.size <= net.cap

    def test_size_cap_error_reports_counts(self):
        with pytest.raises(NetSizeError, match="block net sizes"):
            build_entropy_net(16, 1, 8, cap=10)

    def test_min_entropy_matches_materialized_min(self):
        net = build_entropy_net(4, 2, 4)
        pts = net.materialize()
        rng = np.random.default_rng(11)
        sampler = block_spectraplex_sampler(4, 2)
        for _ in range(5):
            x = sampler(rng)
            brute = min(quantum_rel_entropy(x, p) for p in pts)
            assert net.min_entropy(x) == pytest.approx(brute, abs=1e-9)

    def test_nearest_consistent(self):
        net = build_entropy_net(4, 1, 4)
        rng = np.random.default_rng(12)
        x = block_spectraplex_sampler(4, 1)(rng)
        point, val = net.nearest(x)
        assert val == pytest.approx(net.min_entropy(x), abs=1e-9)
        assert val == pytest.approx(quantum_rel_entropy(x, point), abs=1e-9)

    def test_uniform_member_has_zero_entropy(self):
        # z = (2,2,2,2)/8 puts I/m itself in the pre-mixed net, and mixing
        # fixes I/m, so the exact minimum is 0
        m = 4
        net = build_entropy_net(m, 1, 4)
        assert net.min_entropy(np.eye(m) / m) == pytest.approx(0.0, abs=1e-9)

    def test_premixed_source_point(self):
        net = build_entropy_net(4, 1, 4)
        x = np.diag([2 / 8, 2 / 8, 3 / 8, 1 / 8])  # exact N=8 allocation
        # S(X || mix(X)) <= log 2
        assert net.min_entropy(x) <= math.log(2.0) + 1e-9

    def test_rejects_bad_h(self):
        with pytest.raises(DomainError):
            build_entropy_net(8, 3, 4)

    def test_export_json(self, tmp_path):
        net = build_entropy_net(4, 1, 4)
        out = tmp_path / "net.json"
        net.export_json(out)
        doc = json.loads(out.read_text())
        assert doc["size"] == 165 and len(doc["points"]) == 165


class TestNetErrorSampled:
    @pytest.mark.parametrize("m,h,n", [(8, 1, 8), (8, 2, 8)])
    def test_acceptance_configs_pass(self, m, h, n):
        net = build_entropy_net(m, h, n)
        rep = net_error_sampled(net, trials=100, seed=3)
        assert rep.passed and rep.c_net <= 4.0
        print(f"net (m={m},h={h},n={n}): c_net = {rep.c_net:.3f}")

    def test_diagonal_sampler_is_simplex_kl(self):
        # h = 1 restriction: net error equals classical KL on the simplex
        m, n = 8, 8
        net = build_entropy_net(m, 1, n)
        rng = np.random.default_rng(4)
        w = rng.dirichlet(np.ones(m))
        x = np.diag(w)
        got = net.min_entropy(x)
        # brute force over allocations: KL(w || mix(z/N))
        best = np.inf
        from matdisc.entropy_net import _compositions

        for z in _compositions(net.N, m):
            q = 0.5 * np.asarray(z) / net.N + 1.0 / (2 * m)
            best = min(best, float(np.sum(w * np.log(w / q))))
        assert got == pytest.approx(best, abs=1e-9)
