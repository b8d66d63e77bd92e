"""Log-space dynamic programming for polymer partition functions.

All mass arithmetic is carried out with a branch-stable logaddexp on
anti-diagonal wavefronts.  The same kernel serves full-table retention,
rolling O(N)-memory sweeps with recorded values, parallelogram-constrained
sums (inside / exited via a two-layer automaton), and reverse tables.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.special import logsumexp

from .environment import RegionSpec, WeightField

__all__ = [
    "NEG_INF",
    "FreeEnergyTable",
    "AntidiagonalSegment",
    "PathConstraint",
    "DownRightPath",
    "log_partition_table",
    "log_partition_records",
    "reverse_table",
    "segment_logsum",
    "segment_logmax",
    "profile_increments",
    "crossing_argmax",
]

NEG_INF = -np.inf


@dataclass(frozen=True)
class AntidiagonalSegment:
    """Lattice points on the anti-diagonal through `center` within l-inf
    distance `half_width`."""

    center: tuple[int, int]
    half_width: int

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError(f"half_width must be >= 0, got {self.half_width}")

    def points(self) -> list[tuple[int, int]]:
        x, y = self.center
        return [(x + j, y - j) for j in range(-self.half_width, self.half_width + 1)]


@dataclass(frozen=True)
class PathConstraint:
    """Parallelogram band of half-width k around the segment [a, b].

    Membership solves p = a + u (b - a) + w (-1, 1) and requires
    0 <= u <= 1 and |w| <= k, inclusive up to `tol`.  Mode `inside`
    restricts paths to the band; `exited` keeps only paths that leave
    through a side parallel to b - a.
    """

    a: tuple[int, int]
    b: tuple[int, int]
    k: float
    mode: str = "unconstrained"
    tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("unconstrained", "inside", "exited"):
            raise ValueError(f"unknown constraint mode {self.mode!r}")
        if self.k < 0:
            raise ValueError(f"half-width must be >= 0, got {self.k}")
        if (self.b[0] - self.a[0]) + (self.b[1] - self.a[1]) == 0:
            raise ValueError("a and b lie on one anti-diagonal; parallelogram is degenerate")

    def _solve(self, px, py):
        dx = self.b[0] - self.a[0]
        dy = self.b[1] - self.a[1]
        rx = px - self.a[0]
        ry = py - self.a[1]
        u = (rx + ry) / (dx + dy)
        w = ((ry - rx) - u * (dy - dx)) / 2.0
        return u, w

    def contains(self, p: tuple[int, int]) -> bool:
        u, w = self._solve(p[0], p[1])
        return (-self.tol <= u <= 1.0 + self.tol) and abs(w) <= self.k + self.tol

    def band_mask(self, region: RegionSpec, include_u: bool = True) -> np.ndarray:
        xs = np.arange(region.lo[0], region.hi[0] + 1)[:, None]
        ys = np.arange(region.lo[1], region.hi[1] + 1)[None, :]
        u, w = self._solve(xs, ys)
        mask = np.abs(w) <= self.k + self.tol
        if include_u:
            mask &= (u >= -self.tol) & (u <= 1.0 + self.tol)
        return mask


@dataclass(frozen=True)
class DownRightPath:
    """Vertices z_0, ..., z_k with steps e1 or -e2; z_0 has the largest
    e2-coordinate."""

    vertices: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for prev, cur in zip(self.vertices, self.vertices[1:]):
            step = (cur[0] - prev[0], cur[1] - prev[1])
            if step not in ((1, 0), (0, -1)):
                raise ValueError(f"invalid down-right step {step}")

    @classmethod
    def from_steps(cls, start: tuple[int, int], steps: str) -> "DownRightPath":
        """Steps given as a string of 'R' (e1) and 'D' (-e2) characters."""
        verts = [start]
        for s in steps:
            x, y = verts[-1]
            if s == "R":
                verts.append((x + 1, y))
            elif s == "D":
                verts.append((x, y - 1))
            else:
                raise ValueError(f"unknown step {s!r}")
        return cls(tuple(verts))

    def __len__(self) -> int:
        return len(self.vertices) - 1


def _diag_slice(flat: np.ndarray, d: int, lo: int, hi: int, n2: int):
    if n2 > 1:
        return flat[d + lo * (n2 - 1) : d + hi * (n2 - 1) + 1 : n2 - 1]
    return flat[lo : hi + 1]


def _sweep(
    logw: np.ndarray,
    sources,
    *,
    band: np.ndarray | None = None,
    exited: bool = False,
    full: bool = False,
    record_points=(),
    record_diags=(),
):
    """Anti-diagonal wavefront sweep over a (n1, n2) grid.

    sources: sequence of ((i, j), init log-mass) in grid indices.  Cells
    outside `band` are dead in inside mode; in exited mode they transfer
    layer-0 (never exited) mass into layer 1.  Returns the result layer
    (layer 1 when exited).
    """
    n1, n2 = logw.shape
    ndiag = n1 + n2 - 1
    wflat = logw.ravel()
    bflat = band.ravel() if band is not None else None

    by_diag: dict[int, list] = {}
    for (i, j), init in sources:
        if not (0 <= i < n1 and 0 <= j < n2):
            raise ValueError(f"source index {(i, j)} outside grid {logw.shape}")
        by_diag.setdefault(i + j, []).append((i, init))
    want_points: dict[int, list] = {}
    for (i, j) in record_points:
        want_points.setdefault(i + j, []).append((i, j))
    record_diags = set(record_diags)

    table = np.full((n1, n2), NEG_INF) if full else None
    tflat = table.ravel() if full else None
    points: dict[tuple[int, int], float] = {}
    diags: dict[int, np.ndarray] = {}

    # State arrays are padded with one leading dead cell so the left
    # predecessor is a plain slice.
    prev0 = np.full(n1 + 1, NEG_INF)
    prev1 = np.full(n1 + 1, NEG_INF) if exited else None

    for d in range(ndiag):
        lo = max(0, d - (n2 - 1))
        hi = min(n1 - 1, d)
        wd = _diag_slice(wflat, d, lo, hi, n2)
        bd = _diag_slice(bflat, d, lo, hi, n2) if bflat is not None else None

        cur0 = np.full(n1 + 1, NEG_INF)
        up0 = prev0[lo + 1 : hi + 2]
        left0 = prev0[lo : hi + 1]
        t0 = np.logaddexp(up0, left0)
        if exited:
            cur1 = np.full(n1 + 1, NEG_INF)
            up1 = prev1[lo + 1 : hi + 2]
            left1 = prev1[lo : hi + 1]
            t1 = np.logaddexp(up1, left1)
            cur0[lo + 1 : hi + 2] = np.where(bd, t0 + wd, NEG_INF)
            cur1[lo + 1 : hi + 2] = np.where(bd, t1 + wd, np.logaddexp(t0, t1) + wd)
        else:
            core = t0 + wd
            if bd is not None:
                core = np.where(bd, core, NEG_INF)
            cur0[lo + 1 : hi + 2] = core

        # sources add their seed mass on top of any mass arriving from an
        # upstream source (relevant when one source can reach another)
        for i, init in by_diag.get(d, ()):
            in_band = bd is None or band[i, d - i]
            if exited and not in_band:
                cur1[i + 1] = np.logaddexp(cur1[i + 1], init)
            elif in_band:
                cur0[i + 1] = np.logaddexp(cur0[i + 1], init)

        out = cur1 if exited else cur0
        if full:
            _diag_slice(tflat, d, lo, hi, n2)[:] = out[lo + 1 : hi + 2]
        if d in record_diags:
            diags[d] = out[1:].copy()
        for (i, j) in want_points.get(d, ()):
            points[(i, j)] = float(out[i + 1])

        prev0 = cur0
        if exited:
            prev1 = cur1

    return {"table": table, "points": points, "diags": diags, "last": out[1:].copy()}


@dataclass
class FreeEnergyTable:
    """Log partition values from fixed sources (or to a fixed sink for
    reverse tables)."""

    region: RegionSpec
    sources: tuple
    table: np.ndarray = dc_field(repr=False, default=None)
    convention: str = "exclude"
    direction: str = "forward"

    def entry(self, p: tuple[int, int]) -> float:
        i, j = self.region.index(p)
        return float(self.table[i, j])

    def log_partition(self, p: tuple[int, int]) -> float:
        """Partition value with the empty-path convention: -inf when the
        query point equals a single source."""
        if len(self.sources) == 1 and tuple(p) == tuple(self.sources[0][0]):
            return NEG_INF
        return self.entry(p)

    @property
    def source_points(self) -> list[tuple[int, int]]:
        return [pt for pt, _ in self.sources]


def _normalize_sources(field: WeightField, source, convention: str):
    if convention not in ("exclude", "include"):
        raise ValueError(f"unknown convention {convention!r}")
    if isinstance(source, tuple) and len(source) == 2 and isinstance(source[0], (int, np.integer)):
        raw = [(tuple(source), 0.0)]
    else:
        raw = []
        for s in source:
            if len(s) == 2 and isinstance(s[0], tuple):
                raw.append((tuple(s[0]), float(s[1])))
            else:
                raw.append((tuple(s), 0.0))
    out = []
    for pt, init in raw:
        if convention == "include":
            init = init + field.log_weight(pt)
        out.append((pt, init))
    return out


def _grid_sources(field: WeightField, sources):
    return [(field.region.index(pt), init) for pt, init in sources]


def _band(field: WeightField, constraint: PathConstraint | None):
    if constraint is None or constraint.mode == "unconstrained":
        return None, False
    include_u = constraint.mode == "inside"
    return constraint.band_mask(field.region, include_u=include_u), constraint.mode == "exited"


def log_partition_table(
    field: WeightField,
    source,
    constraint: PathConstraint | None = None,
    convention: str = "exclude",
) -> FreeEnergyTable:
    """Full forward table of log Z values from a point or set source.

    Unreachable cells hold -inf; in `exited` mode the table holds the
    mass of paths that have left the parallelogram band.
    """
    sources = _normalize_sources(field, source, convention)
    band, exited = _band(field, constraint)
    res = _sweep(field.logw, _grid_sources(field, sources), band=band, exited=exited, full=True)
    return FreeEnergyTable(
        region=field.region, sources=tuple(sources), table=res["table"], convention=convention
    )


def log_partition_records(
    field: WeightField,
    source,
    *,
    record_points=(),
    record_diags=(),
    constraint: PathConstraint | None = None,
    convention: str = "exclude",
):
    """Rolling-memory sweep: returns only the requested values.

    Bit-identical to the full-table sweep; only retention differs.
    Returns (points, diags) where points maps lattice points to values and
    diags maps a diagonal level x+y to the value array indexed by x.
    """
    sources = _normalize_sources(field, source, convention)
    band, exited = _band(field, constraint)
    rp = [field.region.index(p) for p in record_points]
    offset = field.region.lo[0] + field.region.lo[1]
    rd = [d - offset for d in record_diags]
    res = _sweep(
        field.logw,
        _grid_sources(field, sources),
        band=band,
        exited=exited,
        full=False,
        record_points=rp,
        record_diags=rd,
    )
    points = {
        (i + field.region.lo[0], j + field.region.lo[1]): v
        for (i, j), v in res["points"].items()
    }
    diags = {d + offset: arr for d, arr in res["diags"].items()}
    return points, diags


def _flip_constraint(field: WeightField, constraint: PathConstraint | None):
    if constraint is None:
        return None
    lo, hi = field.region.lo, field.region.hi
    flip = lambda p: (lo[0] + hi[0] - p[0], lo[1] + hi[1] - p[1])
    return PathConstraint(
        a=flip(constraint.b), b=flip(constraint.a), k=constraint.k,
        mode=constraint.mode, tol=constraint.tol,
    )


def reverse_table(
    field: WeightField,
    sink: tuple[int, int],
    constraint: PathConstraint | None = None,
) -> FreeEnergyTable:
    """Table of log Z from each cell to a fixed sink.

    Entry(v) excludes the weight at v and includes the weight at the sink,
    matching the forward start-exclusion convention read from v.
    """
    flipped = WeightField(
        region=field.region,
        logw=field.logw[::-1, ::-1],
        mu=field.mu,
        seed=field.seed,
        replica_id=field.replica_id,
    )
    si, sj = field.region.index(sink)
    n1, n2 = field.logw.shape
    fsrc = [((n1 - 1 - si, n2 - 1 - sj), 0.0)]
    band, exited = _band(flipped, _flip_constraint(field, constraint))
    res = _sweep(flipped.logw, fsrc, band=band, exited=exited, full=True)
    tab = res["table"][::-1, ::-1] + field.logw[si, sj] - field.logw
    return FreeEnergyTable(
        region=field.region,
        sources=((tuple(sink), 0.0),),
        table=tab,
        convention="exclude",
        direction="reverse",
    )


def segment_logsum(table: FreeEnergyTable, segment: AntidiagonalSegment) -> float:
    vals = [table.entry(p) for p in segment.points()]
    return float(logsumexp(vals))


def segment_logmax(table: FreeEnergyTable, segment: AntidiagonalSegment):
    """Max entry on the segment with its leftmost argmax; (-inf, None) when
    the whole segment is unreachable."""
    best, arg = NEG_INF, None
    for p in sorted(segment.points()):
        v = table.entry(p)
        if v > best:
            best, arg = v, p
    return best, arg


def profile_increments(table: FreeEnergyTable, theta: DownRightPath) -> np.ndarray:
    vals = np.array([table.entry(z) for z in theta.vertices])
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite table entry on the profile path")
    return np.diff(vals)


def crossing_argmax(field: WeightField, N: int, r: int):
    """Maximizer of log Z_{0,p} + log Z_{p,N} over the level-r anti-diagonal.

    Uses one forward and one reverse rolling sweep; ties break toward the
    smallest e1-coordinate.  Returns (argmax point, gap to runner-up).
    """
    if not 0 < r < N:
        raise ValueError(f"level r must lie in (0, {N}), got {r}")
    scores, i_lo = _crossing_scores(field, N, r)
    order = np.argsort(-scores, kind="stable")
    best = int(order[0])
    gap = float(scores[best] - scores[order[1]]) if len(scores) > 1 else float("inf")
    i = i_lo + best
    return (i, 2 * r - i), gap


def _crossing_scores(field: WeightField, N: int, r: int):
    region = field.region
    if not (region.contains((0, 0)) and region.contains((N, N))):
        raise ValueError("field region must contain (0,0) and (N,N)")
    _, fdiags = log_partition_records(field, (0, 0), record_diags=[2 * r])
    fwd = fdiags[2 * r]

    flipped = WeightField(
        region=region, logw=field.logw[::-1, ::-1], mu=field.mu,
        seed=field.seed, replica_id=field.replica_id,
    )
    n1, n2 = field.logw.shape
    si, sj = region.index((N, N))
    fsrc = [((n1 - 1 - si, n2 - 1 - sj), 0.0)]
    lvl = (n1 - 1 - si) + (n2 - 1 - sj) + (2 * N - 2 * r)
    res = _sweep(flipped.logw, fsrc, record_diags=[lvl])
    rev_flipped = res["diags"][lvl]

    i_lo = max(0, 2 * r - N)
    i_hi = min(N, 2 * r)
    ii = np.arange(i_lo, i_hi + 1)
    gi = ii - region.lo[0]
    gj = (2 * r - ii) - region.lo[1]
    lw_sink = field.logw[si, sj]
    lw_p = field.logw[gi, gj]
    rev = rev_flipped[n1 - 1 - gi] + lw_sink - lw_p
    scores = fwd[gi] + rev
    return scores, i_lo
