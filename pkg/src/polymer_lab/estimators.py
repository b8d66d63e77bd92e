"""Monte Carlo harness: replica orchestration, streaming moments, tail
frequencies, correlations, and power-law exponent fits.

Replica i of an experiment always owns its own environment, keyed by
(master seed, i), so results are reproducible regardless of worker count
and reductions happen in replica order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dp import crossing_argmax, log_partition_records
from .environment import RegionSpec, sample_weight_field
from .shape import diagonal_shape_value

__all__ = [
    "MomentAccumulator",
    "CovarianceAccumulator",
    "TailCounter",
    "PowerLawFit",
    "ExperimentPlan",
    "fit_power_law",
    "wilson_interval",
    "fisher_confidence_interval",
    "diagonal_free_energy_samples",
    "estimate_variance_scaling",
    "estimate_time_correlation",
    "estimate_tail_curve",
    "estimate_nonrandom_fluctuation",
    "estimate_transversal_exponent",
]


@dataclass
class MomentAccumulator:
    """Single-pass mean and second central moment with mergeable state."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if self.count == 0:
            return MomentAccumulator(other.count, other.mean, other.m2)
        if other.count == 0:
            return MomentAccumulator(self.count, self.mean, self.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return MomentAccumulator(n, mean, m2)

    @property
    def variance(self) -> float:
        if self.count < 2:
            raise ValueError("variance needs at least two samples")
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count)


@dataclass
class CovarianceAccumulator:
    """Single-pass co-moments of a paired sample with mergeable state."""

    count: int = 0
    mean_x: float = 0.0
    mean_y: float = 0.0
    m2x: float = 0.0
    m2y: float = 0.0
    cxy: float = 0.0

    def push(self, x: float, y: float) -> None:
        self.count += 1
        dx = x - self.mean_x
        dy = y - self.mean_y
        self.mean_x += dx / self.count
        self.mean_y += dy / self.count
        self.m2x += dx * (x - self.mean_x)
        self.m2y += dy * (y - self.mean_y)
        self.cxy += dx * (y - self.mean_y)

    def merge(self, other: "CovarianceAccumulator") -> "CovarianceAccumulator":
        if self.count == 0:
            return CovarianceAccumulator(**vars(other))
        if other.count == 0:
            return CovarianceAccumulator(**vars(self))
        n = self.count + other.count
        dx = other.mean_x - self.mean_x
        dy = other.mean_y - self.mean_y
        w = self.count * other.count / n
        return CovarianceAccumulator(
            count=n,
            mean_x=self.mean_x + dx * other.count / n,
            mean_y=self.mean_y + dy * other.count / n,
            m2x=self.m2x + other.m2x + dx * dx * w,
            m2y=self.m2y + other.m2y + dy * dy * w,
            cxy=self.cxy + other.cxy + dx * dy * w,
        )

    @property
    def covariance(self) -> float:
        if self.count < 2:
            raise ValueError("covariance needs at least two samples")
        return self.cxy / (self.count - 1)

    @property
    def correlation(self) -> float:
        if self.m2x <= 0 or self.m2y <= 0:
            raise ValueError("correlation of a constant series")
        return self.cxy / math.sqrt(self.m2x * self.m2y)


@dataclass
class TailCounter:
    """Two-sided exceedance counts on an ascending threshold grid."""

    thresholds: tuple[float, ...]
    upper: np.ndarray = None
    lower: np.ndarray = None
    count: int = 0

    def __post_init__(self):
        ts = tuple(self.thresholds)
        if any(b <= a for a, b in zip(ts, ts[1:])) or any(t <= 0 for t in ts):
            raise ValueError(f"thresholds must be positive ascending, got {ts}")
        if self.upper is None:
            self.upper = np.zeros(len(ts), dtype=np.int64)
        if self.lower is None:
            self.lower = np.zeros(len(ts), dtype=np.int64)

    def push(self, value: float) -> None:
        self.count += 1
        ts = np.asarray(self.thresholds)
        self.upper += value >= ts
        self.lower += -value >= ts


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares slope of log y against log x."""

    slope: float
    intercept: float
    slope_stderr: float
    points: tuple[tuple[float, float], ...]


def fit_power_law(points) -> PowerLawFit:
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError(f"power-law fit needs at least 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("power-law fit needs strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    sxx = np.sum((lx - lx.mean()) ** 2)
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = len(pts) - 2
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return PowerLawFit(slope=slope, intercept=intercept, slope_stderr=stderr, points=pts)


def wilson_interval(hits: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = hits / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def fisher_confidence_interval(r: float, n: int, z: float = 1.96) -> tuple[float, float]:
    if n < 4:
        raise ValueError("Fisher interval needs at least 4 samples")
    r = min(max(r, -0.999999999), 0.999999999)
    zr = math.atanh(r)
    half = z / math.sqrt(n - 3)
    return math.tanh(zr - half), math.tanh(zr + half)


@dataclass(frozen=True)
class ExperimentPlan:
    """Parameters of one Monte Carlo experiment."""

    mu: float
    sizes: tuple[int, ...]
    replicas: int
    seed: int
    levels: tuple[int, ...] = ()
    ratios: tuple[float, ...] = ()
    thresholds: tuple[float, ...] = ()
    threads: int = 1
    q0: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.replicas < 2:
            raise ValueError(f"need at least 2 replicas, got {self.replicas}")
        if not self.sizes:
            raise ValueError("plan needs at least one size")
        for N in self.sizes:
            for r in self.resolved_levels(N):
                if not 0 < r < N:
                    raise ValueError(f"level {r} outside (0, {N})")

    def resolved_levels(self, N: int) -> tuple[int, ...]:
        if self.levels:
            return self.levels
        return tuple(int(math.floor(q * N)) for q in self.ratios)


def _run_replicas(worker, tasks, threads: int):
    """Evaluate worker over tasks; results are returned in task order."""
    if threads <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (8 * threads))))


def _diag_values_task(task):
    mu, N, levels, seed, rep = task
    region = RegionSpec((0, 0), (N, N))
    fld = sample_weight_field(mu, region, seed, rep)
    pts = [(r, r) for r in levels] + [(N, N)]
    points, _ = log_partition_records(fld, (0, 0), record_points=pts)
    return [points[p] for p in pts]


def _crossing_task(task):
    mu, N, r, seed, rep = task
    region = RegionSpec((0, 0), (N, N))
    fld = sample_weight_field(mu, region, seed, rep)
    p, _ = crossing_argmax(fld, N, r)
    return p[0] - r


def diagonal_free_energy_samples(plan: ExperimentPlan, N: int, levels=()) -> np.ndarray:
    tasks = [(plan.mu, N, tuple(levels), plan.seed, rep) for rep in range(plan.replicas)]
    return np.asarray(_run_replicas(_diag_values_task, tasks, plan.threads))


@dataclass(frozen=True)
class LevelStat:
    N: int
    value: float
    stderr: float


@dataclass(frozen=True)
class VarianceScaling:
    rows: tuple[LevelStat, ...]
    fit: PowerLawFit | None
    fit_error: str | None = None


def jackknife_variance_stderr(x: np.ndarray) -> float:
    """Leave-one-out standard error of the sample variance."""
    n = len(x)
    if n < 3:
        raise ValueError("jackknife needs at least 3 samples")
    s1 = np.sum(x)
    s2 = np.sum(x * x)
    loo_mean = (s1 - x) / (n - 1)
    loo_var = (s2 - x * x - (n - 1) * loo_mean**2) / (n - 2)
    return float(np.sqrt((n - 1) / n * np.sum((loo_var - loo_var.mean()) ** 2)))


def estimate_variance_scaling(plan: ExperimentPlan, samples_by_size=None) -> VarianceScaling:
    """Variance of the diagonal free energy per size with a slope fit
    against size (KPZ target 2/3)."""
    rows = []
    for N in plan.sizes:
        if samples_by_size is not None and N in samples_by_size:
            x = np.asarray(samples_by_size[N])
        else:
            x = diagonal_free_energy_samples(plan, N)[:, 0]
        rows.append(LevelStat(N, float(np.var(x, ddof=1)), jackknife_variance_stderr(x)))
    fit, err = None, None
    try:
        fit = fit_power_law([(row.N, row.value) for row in rows])
    except ValueError as exc:
        err = str(exc)
    return VarianceScaling(rows=tuple(rows), fit=fit, fit_error=err)


@dataclass(frozen=True)
class CorrelationRow:
    r: int
    N: int
    corr: float
    ci_lo: float
    ci_hi: float
    count: int


def estimate_time_correlation(plan: ExperimentPlan, samples: np.ndarray | None = None):
    """Pearson correlation of the free energies at levels r and N on a
    shared environment, with Fisher-z confidence intervals.

    One forward sweep per replica records every level; the coupling across
    levels within a replica is the quantity of interest.
    """
    if plan.replicas < 100:
        raise ValueError("correlation estimation needs at least 100 replicas")
    N = plan.sizes[0]
    levels = plan.resolved_levels(N)
    if samples is None:
        samples = diagonal_free_energy_samples(plan, N, levels)
    full = samples[:, -1]
    rows = []
    for idx, r in enumerate(levels):
        c = float(np.corrcoef(samples[:, idx], full)[0, 1])
        lo, hi = fisher_confidence_interval(c, len(full))
        rows.append(CorrelationRow(r=r, N=N, corr=c, ci_lo=lo, ci_hi=hi, count=len(full)))
    return tuple(rows)


@dataclass(frozen=True)
class TailRow:
    t: float
    upper_p: float
    upper_lo: float
    upper_hi: float
    lower_p: float
    lower_lo: float
    lower_hi: float


@dataclass(frozen=True)
class TailCurve:
    N: int
    center: float
    count: int
    rows: tuple[TailRow, ...]


def estimate_tail_curve(plan: ExperimentPlan, samples: np.ndarray | None = None) -> TailCurve:
    """Empirical two-sided tail frequencies of the centered, N^{1/3}-scaled
    free energy on the plan's threshold grid, with Wilson intervals."""
    N = plan.sizes[0]
    center = 2 * N * diagonal_shape_value(plan.mu)
    counter = TailCounter(thresholds=tuple(plan.thresholds))
    if samples is None:
        samples = diagonal_free_energy_samples(plan, N)[:, 0]
    scale = N ** (1.0 / 3.0)
    for v in samples:
        counter.push((v - center) / scale)
    rows = []
    for i, t in enumerate(counter.thresholds):
        ulo, uhi = wilson_interval(int(counter.upper[i]), counter.count)
        llo, lhi = wilson_interval(int(counter.lower[i]), counter.count)
        rows.append(
            TailRow(
                t=t,
                upper_p=counter.upper[i] / counter.count,
                upper_lo=ulo,
                upper_hi=uhi,
                lower_p=counter.lower[i] / counter.count,
                lower_lo=llo,
                lower_hi=lhi,
            )
        )
    return TailCurve(N=N, center=center, count=counter.count, rows=tuple(rows))


def estimate_nonrandom_fluctuation(plan: ExperimentPlan, samples_by_size=None):
    """Centering gap (2 N f_d - mean log Z) / N^{1/3} per size with its
    standard error."""
    rows = []
    for N in plan.sizes:
        if samples_by_size is not None and N in samples_by_size:
            x = np.asarray(samples_by_size[N])
        else:
            x = diagonal_free_energy_samples(plan, N)[:, 0]
        acc = MomentAccumulator()
        for v in x:
            acc.push(float(v))
        center = 2 * N * diagonal_shape_value(plan.mu)
        scale = N ** (1.0 / 3.0)
        rows.append(LevelStat(N, (center - acc.mean) / scale, acc.stderr / scale))
    return tuple(rows)


@dataclass(frozen=True)
class TransversalResult:
    rows: tuple[LevelStat, ...]
    fit: PowerLawFit | None
    fit_error: str | None = None


def estimate_transversal_exponent(plan: ExperimentPlan) -> TransversalResult:
    """Standard deviation of the mid-level crossing maximizer displacement
    per size with a slope fit against size (KPZ target 2/3)."""
    if len(plan.sizes) < 3:
        raise ValueError("transversal fit needs at least 3 sizes")
    rows = []
    for N in plan.sizes:
        r = N // 2
        tasks = [(plan.mu, N, r, plan.seed, rep) for rep in range(plan.replicas)]
        disp = np.asarray(_run_replicas(_crossing_task, tasks, plan.threads), dtype=float)
        sd = float(np.std(disp, ddof=1))
        se = sd / math.sqrt(2 * (len(disp) - 1)) if sd > 0 else 0.0
        rows.append(LevelStat(N, sd, se))
    fit, err = None, None
    try:
        fit = fit_power_law([(row.N, row.value) for row in rows])
    except ValueError as exc:
        err = str(exc)
    return TransversalResult(rows=tuple(rows), fit=fit, fit_error=err)
