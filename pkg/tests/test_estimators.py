"""Streaming accumulators, fits, and the Monte Carlo reductions."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymer_lab.estimators import (
    CovarianceAccumulator,
    ExperimentPlan,
    MomentAccumulator,
    PowerLawFit,
    TailCounter,
    diagonal_free_energy_samples,
    estimate_nonrandom_fluctuation,
    estimate_time_correlation,
    estimate_transversal_exponent,
    estimate_variance_scaling,
    fisher_confidence_interval,
    fit_power_law,
    jackknife_variance_stderr,
    wilson_interval,
)


def _moments(xs):
    acc = MomentAccumulator()
    for x in xs:
        acc.push(float(x))
    return acc


class TestMomentAccumulator:
    def test_against_numpy(self):
        x = np.random.default_rng(0).normal(2.0, 3.0, size=500)
        acc = _moments(x)
        assert acc.mean == pytest.approx(x.mean(), rel=1e-12)
        assert acc.variance == pytest.approx(x.var(ddof=1), rel=1e-12)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=60),
           st.integers(min_value=1, max_value=59))
    @settings(max_examples=60, deadline=None)
    def test_merge_equals_concatenation(self, xs, cut):
        cut = min(cut, len(xs) - 1)
        whole = _moments(xs)
        merged = _moments(xs[:cut]).merge(_moments(xs[cut:]))
        assert merged.count == whole.count
        assert merged.mean == pytest.approx(whole.mean, rel=1e-12, abs=1e-12)
        assert merged.m2 == pytest.approx(whole.m2, rel=1e-12, abs=1e-9)

    def test_merge_commutes_and_associates(self):
        rng = np.random.default_rng(1)
        a, b, c = (_moments(rng.normal(size=20)) for _ in range(3))
        ab_c = a.merge(b).merge(c)
        a_bc = a.merge(b.merge(c))
        ba_c = b.merge(a).merge(c)
        for other in (a_bc, ba_c):
            assert ab_c.mean == pytest.approx(other.mean, rel=1e-12)
            assert ab_c.m2 == pytest.approx(other.m2, rel=1e-12)

    def test_identity_merge(self):
        a = _moments([1.0, 2.0, 4.0])
        m = MomentAccumulator().merge(a)
        assert (m.count, m.mean, m.m2) == (a.count, a.mean, a.m2)

    def test_variance_nonnegative_and_guarded(self):
        assert _moments([3.0, 3.0, 3.0]).variance == 0.0
        with pytest.raises(ValueError):
            MomentAccumulator().variance


class TestCovarianceAccumulator:
    def test_against_numpy(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=300)
        y = 0.5 * x + rng.normal(size=300)
        acc = CovarianceAccumulator()
        for u, v in zip(x, y):
            acc.push(float(u), float(v))
        assert acc.covariance == pytest.approx(np.cov(x, y, ddof=1)[0, 1], rel=1e-12)
        assert acc.correlation == pytest.approx(np.corrcoef(x, y)[0, 1], rel=1e-12)

    def test_affine_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=200)
        y = rng.normal(size=200)
        a, b = CovarianceAccumulator(), CovarianceAccumulator()
        for u, v in zip(x, y):
            a.push(float(u), float(v))
            b.push(3.0 * float(u) - 7.0, 0.25 * float(v) + 2.0)
        assert b.correlation == pytest.approx(a.correlation, abs=1e-12)

    def test_merge(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=100)
        y = rng.normal(size=100)
        whole = CovarianceAccumulator()
        p1, p2 = CovarianceAccumulator(), CovarianceAccumulator()
        for i, (u, v) in enumerate(zip(x, y)):
            whole.push(float(u), float(v))
            (p1 if i < 37 else p2).push(float(u), float(v))
        m = p1.merge(p2)
        assert m.cxy == pytest.approx(whole.cxy, rel=1e-12)
        assert m.m2y == pytest.approx(whole.m2y, rel=1e-12)

    def test_variance_difference_identity(self):
        # Var(U - V) >= (1 - Corr^2) Var(U) on every empirical pair
        rng = np.random.default_rng(5)
        for _ in range(25):
            u = rng.normal(size=50)
            v = rng.normal(size=50) + rng.uniform(-1, 1) * u
            corr = np.corrcoef(u, v)[0, 1]
            assert np.var(u - v, ddof=1) >= (1 - corr**2) * np.var(u, ddof=1) - 1e-9

    def test_constant_series_guarded(self):
        acc = CovarianceAccumulator()
        for v in (1.0, 1.0, 1.0):
            acc.push(v, v)
        with pytest.raises(ValueError):
            acc.correlation


class TestTailCounter:
    def test_counts_monotone(self):
        tc = TailCounter(thresholds=(0.5, 1.0, 2.0))
        for v in np.random.default_rng(6).normal(size=500):
            tc.push(float(v))
        assert all(b <= a for a, b in zip(tc.upper, tc.upper[1:]))
        assert all(b <= a for a, b in zip(tc.lower, tc.lower[1:]))

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TailCounter(thresholds=(1.0, 0.5))
        with pytest.raises(ValueError):
            TailCounter(thresholds=(-1.0, 0.5))

    def test_wilson_contains_truth(self):
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi
        assert wilson_interval(0, 100)[0] == 0.0
        assert wilson_interval(100, 100)[1] >= 1.0 - 1e-12


class TestPowerLawFit:
    def test_exact_power_data(self):
        fit = fit_power_law([(n, 3 * n ** (2 / 3)) for n in (8, 16, 32, 64)])
        assert fit.slope == pytest.approx(2 / 3, abs=1e-12)
        assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-12)
        assert fit.slope_stderr <= 1e-12

    def test_two_points_rejected(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 1), (2, 2)])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 1), (2, 0), (3, 3)])

    def test_noisy_recovery(self):
        rng = np.random.default_rng(8)
        hits = 0
        for _ in range(100):
            xs = np.array([10, 20, 40, 80, 160], dtype=float)
            ys = 2.0 * xs**0.5 * np.exp(rng.normal(0, 0.05, size=5))
            fit = fit_power_law(list(zip(xs, ys)))
            if abs(fit.slope - 0.5) <= 2 * fit.slope_stderr:
                hits += 1
        # 2 SE on a 5-point fit has only 3 residual dof, so coverage sits
        # below the gaussian 95%; the t_3 value is ~81%
        assert hits >= 70


class TestExperimentPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentPlan(mu=-1.0, sizes=(8,), replicas=10, seed=0)
        with pytest.raises(ValueError):
            ExperimentPlan(mu=2.0, sizes=(8,), replicas=1, seed=0)
        with pytest.raises(ValueError):
            ExperimentPlan(mu=2.0, sizes=(8,), replicas=10, seed=0, levels=(8,))
        with pytest.raises(ValueError):
            ExperimentPlan(mu=2.0, sizes=(), replicas=10, seed=0)

    def test_ratio_flooring(self):
        p = ExperimentPlan(mu=2.0, sizes=(10,), replicas=10, seed=0, ratios=(0.25, 0.77))
        assert p.resolved_levels(10) == (2, 7)


class TestReductions:
    def test_sample_determinism(self):
        p = ExperimentPlan(mu=2.0, sizes=(16,), replicas=6, seed=9)
        a = diagonal_free_energy_samples(p, 16)
        b = diagonal_free_energy_samples(p, 16)
        assert np.array_equal(a, b)

    def test_worker_count_invariance(self):
        p1 = ExperimentPlan(mu=2.0, sizes=(16,), replicas=8, seed=9, threads=1)
        p2 = ExperimentPlan(mu=2.0, sizes=(16,), replicas=8, seed=9, threads=2)
        assert np.array_equal(
            diagonal_free_energy_samples(p1, 16), diagonal_free_energy_samples(p2, 16)
        )

    def test_jackknife_matches_closed_form_scale(self):
        x = np.random.default_rng(10).normal(size=400)
        se = jackknife_variance_stderr(x)
        # for near-gaussian data, SE(s^2) ~ s^2 sqrt(2/(n-1))
        assert se == pytest.approx(np.var(x, ddof=1) * np.sqrt(2 / 399), rel=0.35)

    def test_variance_degenerate_size_list(self):
        p = ExperimentPlan(mu=2.0, sizes=(12,), replicas=30, seed=3)
        res = estimate_variance_scaling(p)
        assert res.fit is None and res.fit_error is not None
        assert res.rows[0].value > 0

    def test_variance_constant_samples(self):
        p = ExperimentPlan(mu=2.0, sizes=(8, 12, 16), replicas=10, seed=3)
        res = estimate_variance_scaling(
            p, samples_by_size={N: np.full(10, 5.0) for N in (8, 12, 16)}
        )
        assert all(r.value == 0.0 for r in res.rows)
        assert res.fit is None

    def test_correlation_requires_replicas(self):
        p = ExperimentPlan(mu=2.0, sizes=(16,), replicas=50, seed=3, levels=(8,))
        with pytest.raises(ValueError):
            estimate_time_correlation(p)

    def test_correlation_of_identical_levels(self):
        rng = np.random.default_rng(11)
        col = rng.normal(size=200)
        samples = np.column_stack([col, col])
        p = ExperimentPlan(mu=2.0, sizes=(16,), replicas=200, seed=3, levels=(8,))
        rows = estimate_time_correlation(p, samples=samples)
        assert rows[0].corr == pytest.approx(1.0, abs=1e-12)

    def test_fisher_interval_orders(self):
        lo, hi = fisher_confidence_interval(0.3, 200)
        assert -1 < lo < 0.3 < hi < 1

    def test_nonrandom_positive_at_small_scale(self):
        p = ExperimentPlan(mu=2.0, sizes=(24,), replicas=200, seed=42)
        rows = estimate_nonrandom_fluctuation(p)
        assert rows[0].value - 3 * rows[0].stderr > 0

    def test_transversal_needs_three_sizes(self):
        with pytest.raises(ValueError):
            estimate_transversal_exponent(
                ExperimentPlan(mu=2.0, sizes=(8, 16), replicas=10, seed=0)
            )
