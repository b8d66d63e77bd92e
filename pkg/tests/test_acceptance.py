"""Full-scale acceptance gate: seeded statistical criteria at their pinned
replica counts plus the deterministic oracle criteria.

One summary line per criterion is printed in the terminal summary.  The
heavy sample sets are collected once per module and shared between the
criteria that measure the same quantity (variance/nonrandom share the
per-size free-energy samples; both correlation criteria share one sweep
set).  Total runtime is dominated by the Monte Carlo loops (~20 min on
one desktop core).
"""
import subprocess
import sys

import numpy as np
import pytest

from polymer_lab import acceptance
from polymer_lab.estimators import ExperimentPlan, diagonal_free_energy_samples

from conftest import record_criterion

SEED = acceptance.ACCEPTANCE_SEED
MU = acceptance.ACCEPTANCE_MU


def _check(number, name, res):
    record_criterion(number, name, res.passed, res.detail)
    assert res.passed, f"criterion {number} ({name}): {res.detail}"


@pytest.fixture(scope="module")
def var_samples():
    sizes = (64, 128, 256, 512)
    plan = ExperimentPlan(mu=MU, sizes=sizes, replicas=4000, seed=SEED)
    return {N: diagonal_free_energy_samples(plan, N)[:, 0] for N in sizes}


@pytest.fixture(scope="module")
def corr_samples():
    levels = (32, 64, 128, 384, 448, 480)
    plan = ExperimentPlan(
        mu=MU, sizes=(512,), replicas=20_000, seed=SEED, levels=levels
    )
    return diagonal_free_energy_samples(plan, 512, levels), levels


def test_criterion_01_dp_exactness():
    _check(1, "dp_exactness", acceptance.check_dp_exactness(MU, SEED, instances=50))


def test_criterion_02_combinatorial_control():
    _check(2, "combinatorial_control", acceptance.check_combinatorial_control(max_n=12))


def test_criterion_03_shape_function():
    _check(3, "shape_function", acceptance.check_shape_function(MU))


def test_criterion_04_burke_property():
    _check(4, "burke_property", acceptance.check_burke(MU, MU / 2, 20_000, SEED))


def test_criterion_05_stationary_expectation():
    _check(
        5,
        "stationary_expectation",
        acceptance.check_stationary_expectation(MU, MU / 2, (20, 10), 100_000, SEED),
    )


def test_criterion_06_variance_scaling(var_samples):
    _check(6, "variance_scaling", acceptance.check_variance_scaling(var_samples))


def test_criterion_07_correlation_close(corr_samples):
    samples, levels = corr_samples
    _check(7, "correlation_close", acceptance.check_correlation_close(samples, levels))


def test_criterion_08_correlation_far(corr_samples):
    samples, levels = corr_samples
    _check(8, "correlation_far", acceptance.check_correlation_far(samples, levels))


def test_criterion_09_transversal_exponent():
    _check(
        9,
        "transversal_exponent",
        acceptance.check_transversal(MU, (128, 256, 512), 2000, SEED),
    )


def test_criterion_10_nonrandom_fluctuation(var_samples):
    sub = {N: var_samples[N] for N in (128, 256, 512)}
    _check(10, "nonrandom_fluctuation", acceptance.check_nonrandom(MU, sub))


def test_criterion_11_tail_shape():
    _check(11, "tail_shape", acceptance.check_tail_shape(MU, 256, 50_000, SEED))


def test_criterion_12_rw_sandwich():
    _check(12, "rw_sandwich", acceptance.check_sandwich(MU, MU / 2, 128, 2.0, 500, SEED))


def test_criterion_13_monotonicity():
    _check(13, "monotonicity", acceptance.check_monotonicity(MU, SEED))


def test_criterion_14_sampler_exactness():
    _check(14, "sampler_exactness", acceptance.check_sampler_exactness(MU, SEED, 200_000))


def test_criterion_15_determinism(tmp_path):
    # byte-identical CSV bodies across two CLI runs of the full suite;
    # replica counts are scaled down to keep the double run tractable,
    # which exercises the identical code path at identical seeds
    bodies = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        proc = subprocess.run(
            [sys.executable, "-m", "polymer_lab.cli", "all-acceptance",
             "--scale", "0.002", "--seed", str(SEED), "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode in (0, 1), proc.stderr.decode()
        bodies.append(
            (out / "all-acceptance" / "results.csv").read_bytes()
            + (out / "all-acceptance" / "data.csv").read_bytes()
        )
    passed = bodies[0] == bodies[1]
    record_criterion(15, "determinism", passed,
                     f"{len(bodies[0])} CSV bytes, run A == run B: {passed}")
    assert passed
