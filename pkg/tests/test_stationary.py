"""Boundary-model construction, Burke-property statistics, exit
probabilities, and the random-walk profile sandwich."""
import numpy as np
import pytest
from scipy import stats

from polymer_lab.bruteforce import brute_log_partition, brute_path_measure
from polymer_lab.dp import DownRightPath, log_partition_table
from polymer_lab.environment import RegionSpec, sample_weight_field
from polymer_lab.stationary import (
    burke_increment_samples,
    burke_independence_check,
    characteristic_endpoint,
    make_stationary_environment,
    quenched_exit_probability,
    rw_sandwich_check,
    stationary_table,
)

EULER_GAMMA = 0.577215664901532860606512090082


def _env(rep=0, mu=2.0, rho=1.0, extent=(3, 3), seed=42):
    return make_stationary_environment(mu, rho, (0, 0), extent, seed, replica_id=rep)


class TestConstruction:
    def test_parameter_domain(self):
        with pytest.raises(ValueError):
            make_stationary_environment(2.0, 2.5, (0, 0), (2, 2), 0)
        with pytest.raises(ValueError):
            make_stationary_environment(2.0, 1.0, (0, 0), (0, 2), 0)

    def test_regenerable(self):
        a, b = _env(3), _env(3)
        assert np.array_equal(a.log_east, b.log_east)
        assert np.array_equal(a.bulk.logw, b.bulk.logw)

    def test_boundary_independent_of_bulk_reuse(self):
        # the same bulk can serve two rho values; bulk bytes are shared
        bulk = sample_weight_field(2.0, RegionSpec((1, 1), (3, 3)), 42, 0)
        e1 = make_stationary_environment(2.0, 0.8, (0, 0), (3, 3), 42, bulk=bulk)
        e2 = make_stationary_environment(2.0, 1.2, (0, 0), (3, 3), 42, bulk=bulk)
        assert np.array_equal(e1.bulk.logw, e2.bulk.logw)
        assert not np.array_equal(e1.log_east, e2.log_east)

    def test_boundary_marginals(self):
        # east edges are log InvGamma(mu - rho): exp(-log I) ~ Gamma(mu - rho)
        east = np.concatenate([_env(r, extent=(8, 2)).log_east for r in range(3000)])
        north = np.concatenate([_env(r, extent=(2, 8)).log_north for r in range(3000)])
        assert stats.kstest(np.exp(-east), "gamma", args=(1.0,)).pvalue > 0.001
        assert stats.kstest(np.exp(-north), "gamma", args=(1.0,)).pvalue > 0.001


class TestStationaryTable:
    def test_base_and_boundary_entries(self):
        env = _env()
        tab = stationary_table(env)
        assert tab.entry((0, 0)) == 0.0
        assert tab.entry((1, 0)) == pytest.approx(env.log_east[0], abs=0)
        assert tab.entry((3, 0)) == pytest.approx(env.log_east.sum(), rel=1e-14)
        assert tab.entry((0, 2)) == pytest.approx(env.log_north[:2].sum(), rel=1e-14)

    def test_matches_enumeration(self):
        env = _env(7)
        synth = env.synthetic_field()
        tab = stationary_table(env)
        for w in [(3, 3), (2, 3), (3, 1)]:
            ref = brute_log_partition(synth.log_weight, (0, 0), w)
            assert tab.entry(w) == pytest.approx(ref, rel=1e-12)

    def test_horizontal_increment_stationarity(self):
        # the law of entry(i+1, j) - entry(i, j) does not depend on i
        a, b = [], []
        for r in range(800):
            tab = stationary_table(_env(r, extent=(28, 6)))
            a.append(tab.entry((6, 3)) - tab.entry((5, 3)))
            b.append(tab.entry((26, 3)) - tab.entry((25, 3)))
        assert stats.ks_2samp(a, b).pvalue > 0.001


class TestBurke:
    def test_boundary_path_increments_exact(self):
        env = _env(extent=(4, 2))
        theta = DownRightPath(((0, 0), (1, 0), (2, 0), (3, 0)))
        from polymer_lab.dp import profile_increments

        inc = profile_increments(stationary_table(env), theta)
        # sequential accumulation leaves ulp-level rounding in the differences
        assert np.allclose(inc, env.log_east[:3], atol=1e-12, rtol=1e-12)

    def test_increment_means(self):
        theta = DownRightPath.from_steps((1, 5), "RDRDRDRD")
        samples = burke_increment_samples(2.0, 1.0, theta, 3000, 42)
        east = samples[:, 0::2].ravel()  # e1 steps: mean E[log InvGamma(1)] = gamma
        se = east.std(ddof=1) / np.sqrt(east.size)
        assert abs(east.mean() - EULER_GAMMA) <= 4 * se
        down = samples[:, 1::2].ravel()  # -e2 steps: mean -E[log InvGamma(1)] = -gamma
        se_d = down.std(ddof=1) / np.sqrt(down.size)
        assert abs(down.mean() + EULER_GAMMA) <= 4 * se_d

    def test_independence_envelope(self):
        theta = DownRightPath.from_steps((1, 5), "RDRDRDRD")
        samples = burke_increment_samples(2.0, 1.0, theta, 3000, 42)
        assert burke_independence_check(samples) <= 4 / np.sqrt(3000)

    def test_correlated_control_rejected(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(500, 1))
        dup = np.hstack([x, x])
        assert burke_independence_check(dup) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_column(self):
        with pytest.raises(ValueError):
            burke_independence_check(np.ones((100, 2)))


class TestExitProbability:
    def test_normalization_exact(self):
        for r in range(10):
            env = _env(r, extent=(5, 5))
            w = (4, 4)
            q1 = quenched_exit_probability(env, w, 1, "e1")
            q2 = quenched_exit_probability(env, w, 1, "e2")
            assert q1 + q2 == pytest.approx(1.0, abs=1e-12)

    def test_matches_enumeration(self):
        env = _env(9, extent=(3, 3))
        synth = env.synthetic_field()
        w = (3, 3)
        measure = brute_path_measure(synth.log_weight, (0, 0), w)
        want = sum(
            p for path, p in measure.items() if path[1] == (1, 0) and path[2] == (2, 0)
        )
        got = quenched_exit_probability(env, w, 2, "e1")
        assert got == pytest.approx(want, abs=1e-12)

    def test_monotone_nonincreasing_in_k(self):
        env = _env(4, extent=(6, 6))
        qs = [quenched_exit_probability(env, (6, 6), k, "e1") for k in range(1, 7)]
        assert all(b <= a + 1e-12 for a, b in zip(qs, qs[1:]))

    def test_target_shift_monotonicity(self):
        # moving the target down-right can only favor an eastward start
        for r in range(20):
            env = _env(500 + r, extent=(8, 6))
            q_lo = quenched_exit_probability(env, (6, 6), 2, "e1")
            q_hi = quenched_exit_probability(env, (8, 4), 2, "e1")
            assert q_lo <= q_hi + 1e-12

    def test_threshold_bounds(self):
        env = _env(extent=(3, 3))
        with pytest.raises(ValueError):
            quenched_exit_probability(env, (3, 3), 4, "e1")
        with pytest.raises(ValueError):
            quenched_exit_probability(env, (3, 3), 1, "diag")


class TestSandwich:
    def test_characteristic_endpoint(self):
        assert characteristic_endpoint(2.0, 1.0, 64) == (64, 64)
        vx, vy = characteristic_endpoint(2.0, 0.5, 64)
        assert vx > vy

    def test_requires_path_through_endpoint(self):
        theta = DownRightPath.from_steps((0, 10), "R" * 4)
        with pytest.raises(ValueError):
            rw_sandwich_check(2.0, 1.0, 16, 2.0, theta, 2, 42)

    def test_rejects_large_s(self):
        theta = DownRightPath.from_steps((8, 16), "R" * 16)
        with pytest.raises(ValueError):
            rw_sandwich_check(2.0, 1.0, 16, 10.0, theta, 2, 42)

    def test_zero_step_path_trivial(self):
        theta = DownRightPath(((16, 16),))
        assert rw_sandwich_check(2.0, 1.0, 16, 1.0, theta, 5, 42) == 1.0

    def test_small_scale_frequency(self):
        theta = DownRightPath.from_steps((8, 16), "R" * 16)
        freq = rw_sandwich_check(2.0, 1.0, 16, 2.0, theta, 50, 42)
        assert freq >= 0.9


class TestStationaryDominance:
    def test_boundary_model_exceeds_iid(self):
        # the boundary model from (-1,-1) carries strictly more mass than
        # the bare i.i.d. model from the origin in nearly every replica
        N = 64
        hits = 0
        reps = 300
        for r in range(reps):
            bulk = sample_weight_field(2.0, RegionSpec((0, 0), (N, N)), 42, r)
            iid = log_partition_table(bulk, (0, 0)).entry((N, N))
            env = make_stationary_environment(
                2.0, 1.0, (-1, -1), (N + 1, N + 1), 42, replica_id=r, bulk=bulk
            )
            st = stationary_table(env).entry((N, N))
            if st >= iid:
                hits += 1
        assert hits / reps >= 0.99
