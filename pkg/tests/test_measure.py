import math

import numpy as np
import pytest
from scipy.stats import norm

from matdisc.instances import Instance, gen_diagonal_spencer, gen_rank1_lower, spencer_target
from matdisc.measure import (
    MeasureEstimate,
    mc_gaussian_measure,
    mc_gaussian_measure_multi,
    measure_exponent_sweep,
)


def diag_basis(n):
    mats = [np.diag([1.0 if j == i else 0.0 for j in range(n)]) for i in range(n)]
    return Instance(n=n, m=n, p=np.inf, q=np.inf, matrices=mats, h=1)


class TestMCMeasure:
    def test_matches_cdf_product_oracle(self):
        # body {|g_i| <= 2}^8: measure = (2 Phi(2) - 1)^8
        n, t = 8, 2.0
        inst = diag_basis(n)
        truth = (2 * norm.cdf(t) - 1) ** n
        est = mc_gaussian_measure(inst, t, samples=10**5, seed=1)
        assert truth == pytest.approx(0.6892, abs=5e-4)
        assert abs(est.estimate - truth) <= 3 * est.ci_halfwidth

    def test_tiny_t_censored(self):
        inst = diag_basis(6)
        est = mc_gaussian_measure(inst, 1e-6, samples=2000, seed=2)
        assert est.censored
        assert est.hits == 0
        assert est.estimate == pytest.approx(1.0 / est.samples)  # never zero

    def test_huge_t_full_measure(self):
        inst = diag_basis(6)
        est = mc_gaussian_measure(inst, 1000.0, samples=2000, seed=3)
        assert est.estimate == pytest.approx(1.0)

    def test_monotone_in_t_same_samples(self):
        inst = gen_diagonal_spencer(6, 6, seed=4)
        ests = mc_gaussian_measure_multi(inst, [0.5, 1.0, 2.0, 4.0], samples=4000, seed=5)
        vals = [e.estimate for e in ests]
        assert vals == sorted(vals)

    def test_antithetic_hits_even(self):
        inst = gen_diagonal_spencer(5, 5, seed=6)
        est = mc_gaussian_measure(inst, 2.0, samples=2000, seed=7, antithetic=True)
        assert est.hits % 2 == 0

    def test_deterministic_per_seed(self):
        inst = gen_diagonal_spencer(5, 5, seed=8)
        a = mc_gaussian_measure(inst, 2.0, samples=4000, seed=9)
        b = mc_gaussian_measure(inst, 2.0, samples=4000, seed=9)
        assert a == b

    def test_antithetic_agrees_with_plain_in_expectation(self):
        inst = diag_basis(4)
        t = 1.5
        truth = (2 * norm.cdf(t) - 1) ** 4
        a = mc_gaussian_measure(inst, t, samples=20000, seed=10, antithetic=False)
        assert abs(a.estimate - truth) <= 4 * a.ci_halfwidth

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            mc_gaussian_measure(diag_basis(3), 1.0, samples=0)

    def test_halfwidth_formula_consistency(self):
        est = mc_gaussian_measure(diag_basis(4), 1.5, samples=4000, seed=20)
        p = est.estimate
        want = 1.959963984540054 * math.sqrt(p * (1 - p) / est.samples)
        assert est.ci_halfwidth == pytest.approx(want, rel=1e-12)
        assert 0.0 <= est.estimate <= 1.0


class TestExponentSweep:
    def test_spencer_scaling_bounded_below(self):
        rows = measure_exponent_sweep(
            family=lambda n: gen_diagonal_spencer(n, n, seed=n),
            t_rule=lambda n, inst: spencer_target(n, n),
            n_list=[6, 8, 10],
            samples=20000,
            seed=11,
        )
        exps = [r["log2_per_coord"] for r in rows]
        assert all(not r["censored"] for r in rows)
        assert min(exps) > -1.0  # far above any collapsing exponent

    def test_rank1_tiny_t_collapses(self):
        rows = measure_exponent_sweep(
            family=gen_rank1_lower,
            t_rule=lambda n, inst: 0.1 * math.sqrt(n),
            n_list=[8, 10],
            samples=20000,
            seed=12,
        )
        for r in rows:
            assert r["censored"] or r["log2_per_coord"] < -1.0

    def test_infinite_t_rule_exponent_zero(self):
        rows = measure_exponent_sweep(
            family=lambda n: gen_diagonal_spencer(n, n, seed=0),
            t_rule=lambda n, inst: 1e9,
            n_list=[6],
            samples=2000,
            seed=13,
        )
        assert rows[0]["log2_per_coord"] == pytest.approx(0.0)
