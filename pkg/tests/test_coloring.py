import math

import numpy as np
import pytest

from matdisc.bounds import eval_discrepancy
from matdisc.coloring import (
    Coloring,
    PartialColoringError,
    PartialColoringParams,
    brute_force_min,
    full_color,
    partial_color,
)
from matdisc.instances import (
    Instance,
    gen_diagonal_spencer,
    gen_hadamard_lower,
    gen_random,
    gen_rank1_lower,
    spencer_target,
)


class TestPartialColor:
    def test_huge_body_freezes_half(self):
        n = 16
        inst = gen_diagonal_spencer(n, n, seed=1)
        col = partial_color(inst, t=10.0 * n, params=PartialColoringParams(seed=2))
        col.check()
        assert 2 * len(col.frozen) >= n
        assert col.discrepancy <= 10.0 * n

    def test_cube_and_freeze_contract_always(self):
        # contract holds regardless of the diameter of the body
        inst = gen_random(n=10, m=6, p=np.inf, seed=3)
        for seed in range(5):
            col = partial_color(
                inst, t=2.5, params=PartialColoringParams(seed=seed), q=np.inf
            )
            col.check()
            assert 2 * len(col.frozen) >= inst.n
            assert col.discrepancy <= col.measured_c * col.t_requested + 1e-12

    def test_spencer_target_constant(self):
        n = 16
        inst = gen_diagonal_spencer(n, n, seed=4)
        t = spencer_target(n, n)
        ok, cs = 0, []
        for seed in range(30):
            try:
                col = partial_color(inst, t, params=PartialColoringParams(seed=seed))
            except PartialColoringError:
                continue
            ok += 1
            cs.append(col.measured_c)
        assert ok >= int(0.95 * 30)
        c = max(cs)
        print(f"diag spencer n=m=16 partial: success {ok}/30, measured c <= {c:.3f}")
        assert c <= 4.0

    def test_rank1_lower_bound_floor(self):
        n = 16
        inst = gen_rank1_lower(n)
        col = partial_color(inst, t=3.0, params=PartialColoringParams(seed=7), q=np.inf)
        assert 2 * len(col.frozen) >= n
        assert col.discrepancy >= 0.5 * math.sqrt(n / 2) - 1e-9

    def test_zero_instance_immediate(self):
        mats = [np.zeros((3, 3)) for _ in range(4)]
        inst = Instance(n=4, m=3, p=2, q=2, matrices=mats)
        y = np.array([0.5, -0.5, 0.0, 0.9])
        col = partial_color(inst, t=1.0, y=y)
        assert col.oracle_calls == 0
        assert np.allclose(np.abs(col.combined), 1.0)
        assert np.max(np.abs(col.x)) <= 1.0

    def test_shift_respected(self):
        inst = gen_diagonal_spencer(8, 8, seed=9)
        y = np.full(8, 0.6)
        col = partial_color(inst, t=20.0, y=y, params=PartialColoringParams(seed=1))
        col.check()
        # snapping to exact +-1 may push x past 1 by at most delta_freeze
        assert np.max(np.abs(col.x)) <= 1.0 + 1e-5
        assert np.max(np.abs(col.combined)) <= 1.0 + 1e-9

    def test_rejects_bad_shift(self):
        inst = gen_diagonal_spencer(4, 4, seed=0)
        with pytest.raises(ValueError):
            partial_color(inst, t=1.0, y=np.array([0.0, 0.0, 0.0, 1.0]))

    def test_rejects_nonpositive_t(self):
        inst = gen_diagonal_spencer(4, 4, seed=0)
        with pytest.raises(ValueError):
            partial_color(inst, t=0.0)

    def test_failure_carries_best_attempt(self):
        # an impossibly small t on a lower-bound family cannot freeze half
        inst = gen_rank1_lower(8)
        params = PartialColoringParams(seed=3, max_retries=1, max_inner_rounds=2)
        with pytest.raises(PartialColoringError) as ei:
            partial_color(inst, t=1e-6, params=params, q=np.inf)
        assert ei.value.best is not None
        assert isinstance(ei.value.best, Coloring)


class TestFullColor:
    def test_single_matrix(self):
        inst = gen_random(n=1, m=3, p=np.inf, seed=11)
        res = full_color(inst, lambda s: 2.0, params=PartialColoringParams(seed=5))
        assert abs(res.x[0]) == 1.0
        assert res.discrepancy == pytest.approx(
            eval_discrepancy(inst, res.x, np.inf)
        )

    def test_diagonal_spencer_32(self):
        n = 32
        inst = gen_diagonal_spencer(n, n, seed=12)
        res = full_color(
            inst, lambda s: spencer_target(s, n), params=PartialColoringParams(seed=6)
        )
        assert np.all(np.abs(res.x) == 1.0)
        ratio = res.discrepancy / spencer_target(n, n)
        print(f"diag spencer n=m=32 full: disc {res.discrepancy:.3f}, C = {ratio:.3f}")
        assert ratio <= 6.0
        # triangle inequality over rounds
        assert res.discrepancy <= res.round_sum + 1e-9

    def test_round_count_and_halving(self):
        n = 32
        inst = gen_diagonal_spencer(n, n, seed=13)
        res = full_color(
            inst, lambda s: spencer_target(s, n), params=PartialColoringParams(seed=7)
        )
        assert res.rounds_executed <= int(math.log2(n)) + 9
        actives = [r.active for r in res.rounds]
        for a, b in zip(actives, actives[1:]):
            assert b <= a - a // 2  # at least half frozen each round

    def test_failure_reports_round(self):
        inst = gen_rank1_lower(8)
        params = PartialColoringParams(seed=3, max_retries=0, max_inner_rounds=2)
        with pytest.raises(PartialColoringError) as ei:
            full_color(inst, lambda s: 1e-7, params=params, q=np.inf)
        assert ei.value.round_index == 0

    def test_block_instance_full_color(self):
        # regression: a late round with one active coordinate must not
        # deadlock when fractional drift pins x at a cube face
        from matdisc.bounds import bound_all

        inst = gen_random(n=24, m=12, p=np.inf, h=3, seed=5)
        res = full_color(
            inst,
            lambda s: bound_all(n=s, m=12, p=np.inf, q=np.inf, h=3).block,
            params=PartialColoringParams(seed=9),
        )
        assert np.all(np.abs(res.x) == 1.0)

    def test_single_active_with_shift_many_seeds(self):
        inst = gen_random(n=1, m=4, p=np.inf, seed=3)
        for seed in range(40):
            col = partial_color(
                inst, t=1.9, y=np.array([0.19]), params=PartialColoringParams(seed=seed)
            )
            assert len(col.frozen) == 1
            assert abs(col.combined[0]) == 1.0
            assert abs(col.x[0]) <= 1.0 + 1e-5

    def test_geometric_reference_for_power_bound(self):
        # bound_fn(s) = sqrt(s) has beta = 1/2; reference is bound/(1 - 2^-1/2)
        n = 16
        inst = gen_random(n=n, m=n, p=np.inf, r=1, seed=14)
        res = full_color(
            inst, lambda s: math.sqrt(s), params=PartialColoringParams(seed=8), beta=0.5
        )
        want_ref = math.sqrt(n) / (1 - 2**-0.5)
        assert res.geometric_reference == pytest.approx(want_ref)
        assert res.geometric_ratio == pytest.approx(res.discrepancy / want_ref)


class TestBruteForce:
    def test_single_matrix(self):
        inst = gen_random(n=1, m=4, p=np.inf, seed=20)
        x, v = brute_force_min(inst, np.inf)
        assert v == pytest.approx(eval_discrepancy(inst, x, np.inf))
        assert v == pytest.approx(1.0)  # normalized op norm

    def test_rank1_n12(self):
        inst = gen_rank1_lower(12)
        _, v = brute_force_min(inst, np.inf)
        assert v >= 0.5 * math.sqrt(11)

    def test_hadamard_m2_vs_parseval(self):
        inst = gen_hadamard_lower(2, np.inf, symmetrize=False)
        _, v = brute_force_min(inst, np.inf)
        # ||M||_op >= ||M||_F / sqrt(rank) with ||M||_F^2 = m n = 8
        assert v >= math.sqrt(8 / 2) - 1e-12

    def test_matches_exhaustive_oracle(self):
        inst = gen_random(n=8, m=4, p=np.inf, seed=21)
        _, v = brute_force_min(inst, np.inf)
        best = np.inf
        for bits in range(2**8):
            x = np.array([1.0 if (bits >> k) & 1 else -1.0 for k in range(8)])
            best = min(best, eval_discrepancy(inst, x, np.inf))
        assert v == pytest.approx(best, rel=1e-12)

    def test_cap_enforced(self):
        inst = gen_diagonal_spencer(8, 8, seed=0)
        with pytest.raises(ValueError):
            brute_force_min(inst, cap=6)
