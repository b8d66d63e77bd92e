"""Command-line front door.

Check commands (shape-check, dp-verify, check-burke, exit-time,
rw-sandwich) print a JSON verdict and exit 0/1.  Report commands
(variance, correlation, tails, nonrandom, transversal, sample-paths,
all-acceptance) write a CSV body, a JSON manifest referencing it by
content hash, and a rendered PNG.  Exit codes: 0 pass, 1 failed checks,
2 argument/plan errors.
"""
from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, acceptance, report
from .dp import log_partition_records, log_partition_table, reverse_table
from .environment import RegionSpec, dump_field, sample_weight_field
from .estimators import (
    ExperimentPlan,
    diagonal_free_energy_samples,
    estimate_nonrandom_fluctuation,
    estimate_tail_curve,
    estimate_time_correlation,
    estimate_transversal_exponent,
    estimate_variance_scaling,
)
from .sampler import QuenchedSampler, midpoint_displacement, sample_path
from .shape import characteristic_direction, inverse_slope, shape_at, slope_map
from .stationary import make_stationary_environment, quenched_exit_probability

PLAN_SCHEMA = 1


def _load_plan(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read plan file {path}: {exc}")
    if doc.get("schema") != PLAN_SCHEMA:
        raise click.UsageError(f"plan file {path} has schema {doc.get('schema')!r}, need {PLAN_SCHEMA}")
    return doc


def _pick(flag, plan: dict, key: str, default):
    """Flags override plan-file values, which override defaults."""
    if flag is not None:
        return flag
    if key in plan:
        return plan[key]
    return default


def _sizes(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(v) for v in str(value).split(","))


def _floats(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(v) for v in str(value).split(","))


def _json_default(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _verdict(command: str, checks: list[dict], params: dict) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "parameters": params,
        "checks": checks,
        "passed": all(bool(c["passed"]) for c in checks),
    }
    click.echo(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
    if not doc["passed"]:
        sys.exit(1)


def common_options(f):
    f = click.option("--mu", type=float, default=None, help="Inverse-gamma shape parameter.")(f)
    f = click.option("--seed", type=int, default=None, help="Master seed.")(f)
    f = click.option("--plan", "plan_path", type=click.Path(), default=None,
                     help="JSON plan file; flags override its values.")(f)
    return f


def mc_options(f):
    f = click.option("--reps", type=int, default=None, help="Replica count.")(f)
    f = click.option("--threads", type=int, default=None,
                     help="Worker processes (default: machine parallelism).")(f)
    return f


def out_options(f):
    f = click.option("--out", type=click.Path(), default=None,
                     help="Output root (default: $POLYMER_LAB_OUT or ./out).")(f)
    f = click.option("--force", is_flag=True, help="Overwrite existing artifacts.")(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Inverse-gamma lattice polymer laboratory."""


def _prepare(command, out, force):
    d = report.resolve_out_dir(out, command)
    csv_path = d / "results.csv"
    manifest_path = d / "manifest.json"
    fig_path = d / "figure.png"
    try:
        report.ensure_writable([csv_path, manifest_path, fig_path], force)
    except FileExistsError as exc:
        raise click.UsageError(str(exc))
    return csv_path, manifest_path, fig_path


def _plan_or_usage(**kwargs) -> ExperimentPlan:
    try:
        return ExperimentPlan(**kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc))


LONG_HEADER = ("N", "r", "statistic", "value", "stderr")


# --- deterministic check commands ------------------------------------------


@main.command("shape-check")
@common_options
def shape_check(mu, seed, plan_path):
    """Deterministic closed-form suite: shape values, direction
    monotonicity, slope-map inversion, homogeneity."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    checks = []
    res = acceptance.check_shape_function(mu)
    checks.append({"name": res.name, "passed": res.passed, "detail": res.detail})

    rhos = np.linspace(0.01 * mu, 0.99 * mu, 100)
    comps = [characteristic_direction(mu, r).e1 for r in rhos]
    mono = all(b < a for a, b in zip(comps, comps[1:]))
    checks.append({"name": "direction_monotone", "passed": bool(mono),
                   "detail": "xi e1-component strictly decreasing in rho"})

    worst = 0.0
    for m in (0.25, 0.5, 1.0, 2.0, 4.0):
        z = inverse_slope(mu, m)
        worst = max(worst, abs(slope_map(mu, mu / 2, z) - m) / m)
    checks.append({"name": "slope_roundtrip", "passed": worst <= 1e-10,
                   "detail": f"worst relative residual {worst:.2e}"})

    h_err = abs(shape_at(mu, (60, 80)) - 2 * shape_at(mu, (30, 40)))
    checks.append({"name": "homogeneity", "passed": h_err <= 1e-9,
                   "detail": f"|shape(2p) - 2 shape(p)| = {h_err:.2e}"})
    _verdict("shape-check", checks, {"mu": mu})


@main.command("dp-verify")
@common_options
def dp_verify(mu, seed, plan_path):
    """Oracle and identity suite for the log-space recursion."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    checks = []
    for res in (
        acceptance.check_dp_exactness(mu, seed, instances=20),
        acceptance.check_combinatorial_control(max_n=10),
    ):
        checks.append({"name": res.name, "passed": res.passed, "detail": res.detail})

    fld = sample_weight_field(mu, RegionSpec((0, 0), (63, 63)), seed, 0)
    full = log_partition_table(fld, (0, 0))
    pts, _ = log_partition_records(fld, (0, 0), record_points=[(63, 63), (40, 20)])
    rolling_ok = pts[(63, 63)] == full.entry((63, 63)) and pts[(40, 20)] == full.entry((40, 20))
    checks.append({"name": "rolling_equals_full", "passed": bool(rolling_ok),
                   "detail": "rolling sweep bit-identical to full table"})

    rev = reverse_table(fld, (63, 63))
    rev_err = abs(rev.entry((0, 0)) - full.entry((63, 63)))
    checks.append({"name": "reverse_forward", "passed": rev_err <= 1e-9,
                   "detail": f"|reverse(0,0) - forward(N,N)| = {rev_err:.2e}"})
    _verdict("dp-verify", checks, {"mu": mu, "seed": seed})


@main.command("check-burke")
@common_options
@mc_options
@click.option("--rho", type=float, default=None, help="Boundary parameter (default mu/2).")
def check_burke(mu, seed, plan_path, reps, threads, rho):
    """Increment marginal and independence tests for the boundary model."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 20_000))
    rho = float(_pick(rho, plan, "rho", mu / 2))
    if not 0 < rho < mu:
        raise click.UsageError(f"rho must lie in (0, {mu}), got {rho}")
    res = acceptance.check_burke(mu, rho, reps, seed)
    _verdict("check-burke", [{"name": res.name, "passed": res.passed, "detail": res.detail}],
             {"mu": mu, "rho": rho, "reps": reps, "seed": seed})


@main.command("exit-time")
@common_options
@mc_options
@click.option("--rho", type=float, default=None, help="Boundary parameter (default mu/2).")
@click.option("--N", "size", type=int, default=None, help="Target (N, N).")
def exit_time(mu, seed, plan_path, reps, threads, rho, size):
    """Exit-probability curve: normalization and monotone decay in the
    threshold, averaged over random environments."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 200))
    rho = float(_pick(rho, plan, "rho", mu / 2))
    size = int(_pick(size, plan, "N", 8))
    if not 0 < rho < mu:
        raise click.UsageError(f"rho must lie in (0, {mu}), got {rho}")
    if size < 2:
        raise click.UsageError(f"N must be at least 2, got {size}")
    w = (size, size)
    curve = np.zeros(size)
    norm_err = 0.0
    for r in range(reps):
        env = make_stationary_environment(mu, rho, (0, 0), w, seed, replica_id=r)
        qs = [quenched_exit_probability(env, w, k, "e1") for k in range(1, size + 1)]
        q2 = quenched_exit_probability(env, w, 1, "e2")
        norm_err = max(norm_err, abs(qs[0] + q2 - 1.0))
        curve += np.array(qs)
    curve /= reps
    mono = bool(all(b <= a + 1e-12 for a, b in zip(curve, curve[1:])))
    checks = [
        {"name": "normalization", "passed": bool(norm_err <= 1e-12),
         "detail": f"max |Q(tau>=1) + Q(tau<=-1) - 1| = {norm_err:.2e}"},
        {"name": "monotone_decay", "passed": mono,
         "detail": "mean Q(tau>=k) nonincreasing in k; curve "
                   + ",".join(f"{v:.4f}" for v in curve)},
    ]
    _verdict("exit-time", checks, {"mu": mu, "rho": rho, "N": size, "reps": reps, "seed": seed})


@main.command("rw-sandwich")
@common_options
@mc_options
@click.option("--N", "size", type=int, default=None)
@click.option("--s", "s_param", type=float, default=None, help="Perturbation scale s.")
def rw_sandwich(mu, seed, plan_path, reps, threads, size, s_param):
    """Empirical frequency of the random-walk profile sandwich."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 500))
    size = int(_pick(size, plan, "N", 128))
    s_param = float(_pick(s_param, plan, "s", 2.0))
    try:
        res = acceptance.check_sandwich(mu, mu / 2, size, s_param, reps, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _verdict("rw-sandwich", [{"name": res.name, "passed": res.passed, "detail": res.detail}],
             {"mu": mu, "N": size, "s": s_param, "reps": reps, "seed": seed})


# --- report commands --------------------------------------------------------


def _manifest_params(**kw):
    return {k: v for k, v in kw.items() if v is not None}


@main.command("variance")
@common_options
@mc_options
@out_options
@click.option("--N", "sizes", default=None, help="Comma-separated sizes.")
def variance(mu, seed, plan_path, reps, threads, out, force, sizes):
    """Variance of the diagonal free energy per size, with a power-law fit."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 1000))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    sizes = _sizes(_pick(sizes, plan, "N", (64, 128, 256, 512)))
    csv_path, man_path, fig_path = _prepare("variance", out, force)
    started = report.timestamp()
    p = _plan_or_usage(mu=mu, sizes=sizes, replicas=reps, seed=seed, threads=threads)
    res = estimate_variance_scaling(p)
    rows = [(r.N, "", "variance", r.value, r.stderr) for r in res.rows]
    if res.fit is not None:
        rows.append(("", "", "fit_slope", res.fit.slope, res.fit.slope_stderr))
    digest = report.write_csv(csv_path, LONG_HEADER, rows)
    report.figure_power_law(fig_path, res.rows, res.fit, "N", "Var(log Z)",
                            "free-energy variance scaling")
    report.write_manifest(man_path, "variance",
                          _manifest_params(mu=mu, N=list(sizes), reps=reps, threads=threads),
                          seed, {"results.csv": digest}, started,
                          extra={"fit_error": res.fit_error} if res.fit_error else None)
    click.echo(f"wrote {csv_path}")


@main.command("correlation")
@common_options
@mc_options
@out_options
@click.option("--N", "size", type=int, default=None)
@click.option("--r", "levels", default=None, help="Comma-separated absolute levels.")
@click.option("--ratios", default=None, help="Comma-separated r/N fractions.")
def correlation(mu, seed, plan_path, reps, threads, out, force, size, levels, ratios):
    """Correlation of the free energies at level r and at N on a shared
    environment, with Fisher-z confidence intervals."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 1000))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    size = int(_pick(size, plan, "N", 512))
    levels = _sizes(_pick(levels, plan, "r", None))
    ratios = _floats(_pick(ratios, plan, "ratios", None))
    if (levels is None) == (ratios is None):
        raise click.UsageError("give exactly one of --r or --ratios")
    csv_path, man_path, fig_path = _prepare("correlation", out, force)
    started = report.timestamp()
    p = _plan_or_usage(mu=mu, sizes=(size,), replicas=reps, seed=seed, threads=threads,
                       levels=levels or (), ratios=ratios or ())
    try:
        rows_out = estimate_time_correlation(p)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    rows = []
    for c in rows_out:
        rows.append((c.N, c.r, "corr", c.corr, ""))
        rows.append((c.N, c.r, "ci_lo", c.ci_lo, ""))
        rows.append((c.N, c.r, "ci_hi", c.ci_hi, ""))
    digest = report.write_csv(csv_path, LONG_HEADER, rows)
    xs = [c.r for c in rows_out]
    report.figure_series(fig_path, xs,
                         [("corr", [c.corr for c in rows_out],
                           ([c.ci_lo for c in rows_out], [c.ci_hi for c in rows_out]))],
                         "r", "Corr(log Z_r, log Z_N)", f"time correlation, N={size}")
    report.write_manifest(man_path, "correlation",
                          _manifest_params(mu=mu, N=size, r=list(levels) if levels else None,
                                           ratios=list(ratios) if ratios else None,
                                           reps=reps, threads=threads),
                          seed, {"results.csv": digest}, started)
    click.echo(f"wrote {csv_path}")


@main.command("tails")
@common_options
@mc_options
@out_options
@click.option("--N", "size", type=int, default=None)
@click.option("--t", "thresholds", default=None, help="Comma-separated threshold grid.")
def tails(mu, seed, plan_path, reps, threads, out, force, size, thresholds):
    """Two-sided tail frequencies of the centered, scaled free energy."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 2000))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    size = int(_pick(size, plan, "N", 256))
    thresholds = _floats(_pick(thresholds, plan, "t", (0.5, 1.0, 1.5, 2.0)))
    csv_path, man_path, fig_path = _prepare("tails", out, force)
    started = report.timestamp()
    p = _plan_or_usage(mu=mu, sizes=(size,), replicas=reps, seed=seed,
                       threads=threads, thresholds=thresholds)
    try:
        curve = estimate_tail_curve(p)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    rows = []
    for r in curve.rows:
        rows += [
            (curve.N, r.t, "upper_p", r.upper_p, ""),
            (curve.N, r.t, "upper_lo", r.upper_lo, ""),
            (curve.N, r.t, "upper_hi", r.upper_hi, ""),
            (curve.N, r.t, "lower_p", r.lower_p, ""),
            (curve.N, r.t, "lower_lo", r.lower_lo, ""),
            (curve.N, r.t, "lower_hi", r.lower_hi, ""),
        ]
    digest = report.write_csv(csv_path, LONG_HEADER, rows)
    ts = [r.t for r in curve.rows]
    report.figure_series(fig_path, ts,
                         [("upper", [max(r.upper_p, 1e-12) for r in curve.rows], None),
                          ("lower", [max(r.lower_p, 1e-12) for r in curve.rows], None)],
                         "t", "tail frequency", f"tail curve, N={size}", logy=True)
    report.write_manifest(man_path, "tails",
                          _manifest_params(mu=mu, N=size, t=list(thresholds), reps=reps),
                          seed, {"results.csv": digest}, started)
    click.echo(f"wrote {csv_path}")


@main.command("nonrandom")
@common_options
@mc_options
@out_options
@click.option("--N", "sizes", default=None, help="Comma-separated sizes.")
def nonrandom(mu, seed, plan_path, reps, threads, out, force, sizes):
    """Scaled centering gap (2 N f_d - mean log Z) / N^{1/3} per size."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 1000))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    sizes = _sizes(_pick(sizes, plan, "N", (128, 256, 512)))
    csv_path, man_path, fig_path = _prepare("nonrandom", out, force)
    started = report.timestamp()
    p = _plan_or_usage(mu=mu, sizes=sizes, replicas=reps, seed=seed, threads=threads)
    rows_out = estimate_nonrandom_fluctuation(p)
    rows = [(r.N, "", "gap_scaled", r.value, r.stderr) for r in rows_out]
    digest = report.write_csv(csv_path, LONG_HEADER, rows)
    xs = [r.N for r in rows_out]
    vals = [r.value for r in rows_out]
    band = ([v - 2 * r.stderr for v, r in zip(vals, rows_out)],
            [v + 2 * r.stderr for v, r in zip(vals, rows_out)])
    report.figure_series(fig_path, xs, [("gap / N^(1/3)", vals, band)],
                         "N", "(2N f_d - mean log Z) / N^(1/3)",
                         "nonrandom fluctuation", logx=True)
    report.write_manifest(man_path, "nonrandom",
                          _manifest_params(mu=mu, N=list(sizes), reps=reps),
                          seed, {"results.csv": digest}, started)
    click.echo(f"wrote {csv_path}")


@main.command("transversal")
@common_options
@mc_options
@out_options
@click.option("--N", "sizes", default=None, help="Comma-separated sizes.")
def transversal(mu, seed, plan_path, reps, threads, out, force, sizes):
    """Sd of the mid-level crossing-maximizer displacement per size."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 500))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    sizes = _sizes(_pick(sizes, plan, "N", (128, 256, 512)))
    csv_path, man_path, fig_path = _prepare("transversal", out, force)
    started = report.timestamp()
    p = _plan_or_usage(mu=mu, sizes=sizes, replicas=reps, seed=seed, threads=threads)
    try:
        res = estimate_transversal_exponent(p)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    rows = [(r.N, "", "sd_displacement", r.value, r.stderr) for r in res.rows]
    if res.fit is not None:
        rows.append(("", "", "fit_slope", res.fit.slope, res.fit.slope_stderr))
    digest = report.write_csv(csv_path, LONG_HEADER, rows)
    report.figure_power_law(fig_path, res.rows, res.fit, "N", "sd of displacement",
                            "transversal fluctuation scaling")
    report.write_manifest(man_path, "transversal",
                          _manifest_params(mu=mu, N=list(sizes), reps=reps),
                          seed, {"results.csv": digest}, started,
                          extra={"fit_error": res.fit_error} if res.fit_error else None)
    click.echo(f"wrote {csv_path}")


@main.command("sample-paths")
@common_options
@mc_options
@out_options
@click.option("--N", "size", type=int, default=None)
@click.option("--dump-field", "dump_field_flag", is_flag=True,
              help="Also write the binary field fixture.")
def sample_paths(mu, seed, plan_path, reps, threads, out, force, size, dump_field_flag):
    """Draw paths from the quenched measure on one random environment."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    reps = int(_pick(reps, plan, "reps", 100))
    size = int(_pick(size, plan, "N", 64))
    if size < 1 or reps < 1:
        raise click.UsageError("N and reps must be positive")
    csv_path, man_path, fig_path = _prepare("sample-paths", out, force)
    started = report.timestamp()
    fld = sample_weight_field(mu, RegionSpec((0, 0), (size, size)), seed, 0)
    smp = QuenchedSampler(fld, (0, 0), mode="checkpoint" if size > 256 else "full")
    rng = np.random.default_rng(seed)
    paths = [sample_path(smp, (size, size), rng) for _ in range(reps)]
    rows = [
        (i, "", "midpoint_displacement", midpoint_displacement(p, size // 2),
         p.run_length_encoded())
        for i, p in enumerate(paths)
    ]
    digest = report.write_csv(csv_path, ("draw", "r", "statistic", "value", "path_rle"), rows)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    for p in paths[:50]:
        xs = [v[0] for v in p.vertices]
        ys = [v[1] for v in p.vertices]
        ax.plot(xs, ys, alpha=0.25, color="tab:blue")
    ax.plot([0, size], [0, size], "k--", lw=0.8)
    ax.set_xlabel("e1")
    ax.set_ylabel("e2")
    ax.set_title(f"quenched paths, N={size}")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    hashes = {"results.csv": digest}
    if dump_field_flag:
        dump_field(fld, csv_path.parent / "field.bin")
        hashes["field.bin"] = "binary"
    report.write_manifest(man_path, "sample-paths",
                          _manifest_params(mu=mu, N=size, reps=reps), seed, hashes, started)
    click.echo(f"wrote {csv_path}")


@main.command("all-acceptance")
@common_options
@mc_options
@out_options
@click.option("--scale", type=float, default=None,
              help="Replica-count scale factor (1.0 = full acceptance load).")
def all_acceptance(mu, seed, plan_path, reps, threads, out, force, scale):
    """Run the full verification suite and persist a summary."""
    plan = _load_plan(plan_path)
    mu = float(_pick(mu, plan, "mu", 2.0))
    seed = int(_pick(seed, plan, "seed", 42))
    threads = int(_pick(threads, plan, "threads", os.cpu_count() or 1))
    scale = float(_pick(scale, plan, "scale", 1.0))
    if not 0 < scale <= 1:
        raise click.UsageError(f"scale must lie in (0, 1], got {scale}")
    csv_path, man_path, fig_path = _prepare("all-acceptance", out, force)
    data_path = csv_path.parent / "data.csv"
    try:
        report.ensure_writable([data_path], force)
    except FileExistsError as exc:
        raise click.UsageError(str(exc))
    started = report.timestamp()
    results = acceptance.run_acceptance(scale=scale, seed=seed, mu=mu,
                                        threads=threads, log=click.echo)
    rows = [(r.name, int(r.passed), r.detail) for r in results]
    digest = report.write_csv(csv_path, ("check", "passed", "detail"), rows)
    data_rows = []
    for r in results:
        for row in r.rows:
            data_rows.append((r.name,) + tuple(row))
    d_digest = report.write_csv(data_path, ("check", "x", "value", "extra"),
                                [row + ("",) * (4 - len(row)) for row in data_rows])
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    names = [r.name for r in results]
    ax.barh(range(len(names)), [1] * len(names),
            color=["tab:green" if r.passed else "tab:red" for r in results])
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xticks([])
    ax.set_title("verification suite")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    report.write_manifest(man_path, "all-acceptance",
                          _manifest_params(mu=mu, scale=scale, threads=threads), seed,
                          {"results.csv": digest, "data.csv": d_digest}, started)
    n_fail = sum(1 for r in results if not r.passed)
    click.echo(f"{len(results) - n_fail}/{len(results)} checks passed; wrote {csv_path}")
    if n_fail:
        sys.exit(1)


if __name__ == "__main__":
    main()
