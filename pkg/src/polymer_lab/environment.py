"""Reproducible random environments: i.i.d. inverse-gamma weight fields.

Weights are stored as log-values.  Every lattice row of a replica has its
own counter-based stream derived from (master seed, stream tag, replica,
row), so a field is regenerable slab-by-slab and the result never depends
on traversal order.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RegionSpec",
    "WeightField",
    "MEMORY_CAP_CELLS",
    "sample_weight_field",
    "forced_field",
    "dump_field",
    "load_field",
]

MEMORY_CAP_CELLS = 1 << 26

# Stream tags keep bulk and boundary randomness disjoint.
STREAM_BULK = 0
STREAM_EAST = 1
STREAM_NORTH = 2

_MAGIC = b"IGPF"
_HEADER = struct.Struct("<4sI4id")


@dataclass(frozen=True)
class RegionSpec:
    """Closed rectangle of lattice points given by its corner points."""

    lo: tuple[int, int]
    hi: tuple[int, int]

    def __post_init__(self):
        if self.lo[0] > self.hi[0] or self.lo[1] > self.hi[1]:
            raise ValueError(f"corners not ordered: {self.lo} .. {self.hi}")

    @property
    def nx(self) -> int:
        return self.hi[0] - self.lo[0] + 1

    @property
    def ny(self) -> int:
        return self.hi[1] - self.lo[1] + 1

    @property
    def area(self) -> int:
        return self.nx * self.ny

    def contains(self, p: tuple[int, int]) -> bool:
        return self.lo[0] <= p[0] <= self.hi[0] and self.lo[1] <= p[1] <= self.hi[1]

    def index(self, p: tuple[int, int]) -> tuple[int, int]:
        if not self.contains(p):
            raise ValueError(f"point {p} outside region {self.lo}..{self.hi}")
        return p[0] - self.lo[0], p[1] - self.lo[1]


@dataclass(frozen=True)
class WeightField:
    """Dense grid of log-weights over a region, axis 0 along e1."""

    region: RegionSpec
    logw: np.ndarray = field(repr=False)
    mu: float
    seed: int
    replica_id: int

    def log_weight(self, p: tuple[int, int]) -> float:
        i, j = self.region.index(p)
        return float(self.logw[i, j])


def _words(value: int) -> tuple[int, int]:
    v = value & 0xFFFFFFFFFFFFFFFF
    return (v >> 32) & 0xFFFFFFFF, v & 0xFFFFFFFF


def row_rng(seed: int, replica_id: int, stream: int, row: int) -> np.random.Generator:
    """Deterministic generator for one lattice row of one replica."""
    key = (stream, *_words(replica_id), *_words(row))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def sample_weight_field(
    mu: float,
    region: RegionSpec,
    seed: int,
    replica_id: int = 0,
    cap: int = MEMORY_CAP_CELLS,
) -> WeightField:
    """I.i.d. inverse-gamma(mu) weights: gamma variates, then reciprocal.

    log Y = -log G with G ~ Gamma(mu, 1), drawn row by row from the
    per-row streams.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if region.area > cap:
        raise MemoryError(f"region has {region.area} cells, cap is {cap}")
    logw = np.empty((region.nx, region.ny))
    for i, x in enumerate(range(region.lo[0], region.hi[0] + 1)):
        g = row_rng(seed, replica_id, STREAM_BULK, x).gamma(mu, size=region.ny)
        logw[i, :] = -np.log(g)
    return WeightField(region=region, logw=logw, mu=mu, seed=seed, replica_id=replica_id)


def forced_field(region: RegionSpec, constant: float) -> WeightField:
    """Constant-weight field; constant 1 gives pure path counting."""
    if not constant > 0:
        raise ValueError(f"constant must be positive, got {constant}")
    logw = np.full((region.nx, region.ny), np.log(constant))
    return WeightField(region=region, logw=logw, mu=float("nan"), seed=0, replica_id=0)


def dump_field(fld: WeightField, path) -> None:
    """Binary fixture dump: 32-byte header, then row-major little-endian log-weights."""
    header = _HEADER.pack(
        _MAGIC,
        1,
        fld.region.lo[0],
        fld.region.lo[1],
        fld.region.hi[0],
        fld.region.hi[1],
        fld.mu,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(fld.logw, dtype="<f8").tobytes())


def load_field(path) -> WeightField:
    with open(path, "rb") as fh:
        magic, version, x0, y0, x1, y1, mu = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC or version != 1:
            raise ValueError(f"not a version-1 field dump: {path}")
        region = RegionSpec((x0, y0), (x1, y1))
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(region.nx, region.ny)
    return WeightField(
        region=region, logw=data.astype(np.float64), mu=mu, seed=0, replica_id=0
    )
