"""Increment-stationary inverse-gamma polymer with boundary edge weights.

The base vertex carries inverse-gamma edge weights on its east and north
boundary rays, drawn from streams disjoint from the bulk cells so one bulk
field can be reused under several boundary parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .dp import DownRightPath, FreeEnergyTable, log_partition_table, profile_increments
from .environment import (
    STREAM_EAST,
    STREAM_NORTH,
    RegionSpec,
    WeightField,
    row_rng,
    sample_weight_field,
)
from .shape import characteristic_direction

__all__ = [
    "StationaryEnvironment",
    "make_stationary_environment",
    "stationary_table",
    "burke_increment_samples",
    "burke_independence_check",
    "quenched_exit_probability",
    "characteristic_endpoint",
    "rw_sandwich_check",
]


def _param_bits(rho: float) -> int:
    return int(np.float64(rho).view(np.uint64))


@dataclass(frozen=True)
class StationaryEnvironment:
    """Bulk weights plus rho-parametrized boundary edge weights at a base vertex."""

    mu: float
    rho: float
    base: tuple[int, int]
    extent: tuple[int, int]
    seed: int
    replica_id: int
    bulk: WeightField = dc_field(repr=False)
    log_east: np.ndarray = dc_field(repr=False)
    log_north: np.ndarray = dc_field(repr=False)

    def synthetic_field(self) -> WeightField:
        """Vertex-weight grid equivalent to the boundary-edge model.

        Cell (k, 0) carries the k-th east edge, (0, k) the k-th north edge,
        the base carries unit weight, and the interior is bulk.
        """
        W, H = self.extent
        logw = np.empty((W + 1, H + 1))
        logw[0, 0] = 0.0
        logw[1:, 0] = self.log_east
        logw[0, 1:] = self.log_north
        logw[1:, 1:] = self.bulk.logw
        region = RegionSpec(self.base, (self.base[0] + W, self.base[1] + H))
        return WeightField(
            region=region, logw=logw, mu=self.mu, seed=self.seed, replica_id=self.replica_id
        )


def make_stationary_environment(
    mu: float,
    rho: float,
    base: tuple[int, int],
    extent: tuple[int, int],
    seed: int,
    replica_id: int = 0,
    bulk: WeightField | None = None,
) -> StationaryEnvironment:
    """Environment with I ~ InvGamma(mu - rho) east edges and
    J ~ InvGamma(rho) north edges, independent of the bulk."""
    if not 0 < rho < mu:
        raise ValueError(f"rho must lie in (0, {mu}), got {rho}")
    W, H = extent
    if W < 1 or H < 1:
        raise ValueError(f"extent must be at least (1, 1), got {extent}")
    bulk_region = RegionSpec((base[0] + 1, base[1] + 1), (base[0] + W, base[1] + H))
    if bulk is None:
        bulk = sample_weight_field(mu, bulk_region, seed, replica_id)
    elif bulk.region != bulk_region:
        raise ValueError(f"bulk region {bulk.region} does not match extent {extent}")
    bits = _param_bits(rho)
    log_east = -np.log(row_rng(seed, replica_id, STREAM_EAST, bits).gamma(mu - rho, size=W))
    log_north = -np.log(row_rng(seed, replica_id, STREAM_NORTH, bits).gamma(rho, size=H))
    return StationaryEnvironment(
        mu=mu, rho=rho, base=base, extent=extent, seed=seed, replica_id=replica_id,
        bulk=bulk, log_east=log_east, log_north=log_north,
    )


def stationary_table(env: StationaryEnvironment) -> FreeEnergyTable:
    """Table of the boundary model's log partition values from the base.

    Boundary rows are prefix sums of log-edge weights; the interior follows
    the standard recursion; the base entry is 0.
    """
    return log_partition_table(env.synthetic_field(), env.base)


def burke_increment_samples(
    mu: float,
    rho: float,
    path: DownRightPath,
    replicas: int,
    seed: int,
) -> np.ndarray:
    """Profile increments of fresh stationary environments along a down-right
    path based at the origin; one row per replica."""
    xs = [v[0] for v in path.vertices]
    ys = [v[1] for v in path.vertices]
    if min(xs) < 0 or min(ys) < 0:
        raise ValueError("path must stay in the nonnegative quadrant of the base")
    extent = (max(max(xs), 1), max(max(ys), 1))
    out = np.empty((replicas, len(path)))
    for r in range(replicas):
        env = make_stationary_environment(mu, rho, (0, 0), extent, seed, replica_id=r)
        out[r, :] = profile_increments(stationary_table(env), path)
    return out


def burke_independence_check(samples: np.ndarray) -> float:
    """Maximal absolute pairwise Pearson correlation across increment columns."""
    if samples.ndim != 2 or samples.shape[0] < 2 or samples.shape[1] < 2:
        raise ValueError(f"need a (replicas, increments) matrix, got {samples.shape}")
    if np.any(np.std(samples, axis=0) == 0):
        raise ValueError("degenerate (constant) increment column")
    corr = np.corrcoef(samples, rowvar=False)
    np.fill_diagonal(corr, 0.0)
    return float(np.max(np.abs(corr)))


def quenched_exit_probability(
    env: StationaryEnvironment,
    w: tuple[int, int],
    k: int,
    side: str,
) -> float:
    """Quenched probability that the first k steps all leave along `side`.

    Computed as the ratio of the boundary-restricted partition mass to the
    full stationary mass at w; never by subtraction.
    """
    if side not in ("e1", "e2"):
        raise ValueError(f"side must be 'e1' or 'e2', got {side!r}")
    a = w[0] - env.base[0]
    b = w[1] - env.base[1]
    span = a if side == "e1" else b
    if not 1 <= k <= span:
        raise ValueError(f"threshold k={k} outside [1, {span}] for side {side}")
    synth = env.synthetic_field()
    full = log_partition_table(_clip_field(synth, env.base, w), env.base)
    if side == "e1":
        src = (env.base[0] + k, env.base[1])
        init = float(np.sum(env.log_east[:k]))
    else:
        src = (env.base[0], env.base[1] + k)
        init = float(np.sum(env.log_north[:k]))
    restricted = log_partition_table(_clip_field(synth, src, w), [(src, init)])
    q = np.exp(restricted.entry(w) - full.entry(w))
    return float(min(max(q, 0.0), 1.0))


def _clip_field(fld: WeightField, lo: tuple[int, int], hi: tuple[int, int]) -> WeightField:
    i0, j0 = fld.region.index(lo)
    i1, j1 = fld.region.index(hi)
    return WeightField(
        region=RegionSpec(lo, hi),
        logw=fld.logw[i0 : i1 + 1, j0 : j1 + 1],
        mu=fld.mu,
        seed=fld.seed,
        replica_id=fld.replica_id,
    )


def characteristic_endpoint(mu: float, rho: float, N: int) -> tuple[int, int]:
    """2N xi[rho] with both coordinates floored."""
    xi = characteristic_direction(mu, rho)
    return int(np.floor(2 * N * xi.e1)), int(np.floor(2 * N * xi.e2))


def rw_sandwich_check(
    mu: float,
    rho: float,
    N: int,
    s: float,
    theta: DownRightPath,
    replicas: int,
    seed: int,
    q0: float = 1.0,
) -> float:
    """Empirical frequency of the two-sided random-walk bound on the profile.

    Each replica shares one bulk field between the i.i.d. model from the
    origin and two boundary models at base (-1, -1) with perturbed
    parameters rho +- q0 s N^{-1/3}; the sandwich must hold at every step.
    """
    delta = q0 * s * N ** (-1.0 / 3.0)
    lam = rho + delta
    eta = rho - delta
    if not (0 < eta and lam < mu):
        raise ValueError(f"perturbed parameters ({eta}, {lam}) leave (0, {mu}); s too large")
    vN = characteristic_endpoint(mu, rho, N)
    if vN not in theta.vertices:
        raise ValueError(f"path must pass through the characteristic endpoint {vN}")
    xs = [v[0] for v in theta.vertices]
    ys = [v[1] for v in theta.vertices]
    if min(xs) < 0 or min(ys) < 0:
        raise ValueError("path must stay in the nonnegative quadrant")
    mx, my = max(xs), max(ys)
    region = RegionSpec((0, 0), (mx, my))
    extent = (mx + 1, my + 1)

    lo_b, hi_b = np.log(9.0 / 10.0), np.log(10.0 / 9.0)
    hits = 0
    for r in range(replicas):
        bulk = sample_weight_field(mu, region, seed, replica_id=r)
        iid = log_partition_table(bulk, (0, 0))
        inc = profile_increments(iid, theta)
        env_u = make_stationary_environment(
            mu, lam, (-1, -1), extent, seed, replica_id=r, bulk=bulk
        )
        env_l = make_stationary_environment(
            mu, eta, (-1, -1), extent, seed, replica_id=r, bulk=bulk
        )
        x_inc = profile_increments(stationary_table(env_u), theta)
        y_inc = profile_increments(stationary_table(env_l), theta)
        if np.all(lo_b + y_inc <= inc) and np.all(inc <= hi_b + x_inc):
            hits += 1
    return hits / replicas
