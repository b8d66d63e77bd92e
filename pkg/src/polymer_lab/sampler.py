"""Sampling from the quenched polymer measure by backward decomposition.

One forward table serves unlimited draws and all sinks.  A checkpointed
mode retains only every ceil(D/16)-th anti-diagonal and regenerates the
slabs in between while walking backward, trading time for memory with
bit-identical results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dp import NEG_INF, _diag_slice, log_partition_table
from .environment import WeightField

__all__ = ["PolymerPath", "QuenchedSampler", "sample_path", "midpoint_displacement"]


@dataclass(frozen=True)
class PolymerPath:
    """Up-right vertex sequence from source to sink."""

    vertices: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for prev, cur in zip(self.vertices, self.vertices[1:]):
            step = (cur[0] - prev[0], cur[1] - prev[1])
            if step not in ((1, 0), (0, 1)):
                raise ValueError(f"invalid up-right step {step}")

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def step_string(self) -> str:
        out = []
        for prev, cur in zip(self.vertices, self.vertices[1:]):
            out.append("R" if cur[0] > prev[0] else "U")
        return "".join(out)

    def run_length_encoded(self) -> str:
        s = self.step_string()
        out = []
        i = 0
        while i < len(s):
            j = i
            while j < len(s) and s[j] == s[i]:
                j += 1
            out.append(f"{j - i}{s[i]}")
            i = j
        return "".join(out)


def _plain_step(prev: np.ndarray, d: int, wflat: np.ndarray, n1: int, n2: int) -> np.ndarray:
    lo = max(0, d - (n2 - 1))
    hi = min(n1 - 1, d)
    wd = _diag_slice(wflat, d, lo, hi, n2)
    cur = np.full(n1 + 1, NEG_INF)
    cur[lo + 1 : hi + 2] = np.logaddexp(prev[lo + 1 : hi + 2], prev[lo : hi + 1]) + wd
    return cur


class QuenchedSampler:
    """Backward sampler over a fixed environment and source.

    mode "full" retains the whole forward table; mode "checkpoint" keeps
    one anti-diagonal every ceil(D/16) levels and replays slabs on demand.
    """

    def __init__(self, field: WeightField, source=(0, 0), mode: str = "full"):
        if mode not in ("full", "checkpoint"):
            raise ValueError(f"unknown sampler mode {mode!r}")
        self.field = field
        self.source = tuple(source)
        self.mode = mode
        self._si, self._sj = field.region.index(self.source)
        n1, n2 = field.logw.shape
        self._shape = (n1, n2)
        self._wflat = field.logw.ravel()
        if mode == "full":
            self._table = log_partition_table(field, self.source).table
        else:
            ndiag = n1 + n2 - 1
            self._stride = max(1, math.ceil(ndiag / 16))
            self._checkpoints: dict[int, np.ndarray] = {}
            prev = np.full(n1 + 1, NEG_INF)
            for d in range(ndiag):
                cur = _plain_step(prev, d, self._wflat, n1, n2)
                if d == self._si + self._sj:
                    cur[self._si + 1] = 0.0
                if d % self._stride == 0:
                    self._checkpoints[d] = cur.copy()
                prev = cur
            self._slab: dict[int, np.ndarray] = {}

    def _diag_array(self, d: int) -> np.ndarray:
        """Padded value array of diagonal d (checkpoint mode)."""
        if d in self._slab:
            return self._slab[d]
        n1, n2 = self._shape
        d0 = (d // self._stride) * self._stride
        prev = self._checkpoints[d0]
        self._slab = {d0: prev}
        for dd in range(d0 + 1, d0 + self._stride):
            if dd >= n1 + n2 - 1:
                break
            cur = _plain_step(prev, dd, self._wflat, n1, n2)
            if dd == self._si + self._sj:
                cur[self._si + 1] = 0.0
            self._slab[dd] = cur
            prev = cur
        return self._slab[d]

    def entry(self, i: int, j: int) -> float:
        n1, n2 = self._shape
        if not (0 <= i < n1 and 0 <= j < n2):
            return NEG_INF
        if self.mode == "full":
            return float(self._table[i, j])
        return float(self._diag_array(i + j)[i + 1])


def sample_path(
    sampler: QuenchedSampler, sink: tuple[int, int], rng: np.random.Generator
) -> PolymerPath:
    """One draw from the quenched measure between the sampler source and sink."""
    i, j = sampler.field.region.index(sink)
    if not np.isfinite(sampler.entry(i, j)):
        raise ValueError(f"sink {sink} has non-finite partition value")
    si, sj = sampler._si, sampler._sj
    rev = [(i, j)]
    while (i, j) != (si, sj):
        la = sampler.entry(i - 1, j) if i > si else NEG_INF
        lb = sampler.entry(i, j - 1) if j > sj else NEG_INF
        if la == NEG_INF and lb == NEG_INF:
            raise ValueError("walk reached an unreachable cell")
        if lb == NEG_INF:
            take_a = True
        elif la == NEG_INF:
            take_a = False
        else:
            p_a = np.exp(la - np.logaddexp(la, lb))
            take_a = rng.random() < p_a
        i, j = (i - 1, j) if take_a else (i, j - 1)
        rev.append((i, j))
    x0, y0 = sampler.field.region.lo
    return PolymerPath(tuple((i + x0, j + y0) for i, j in reversed(rev)))


def midpoint_displacement(path: PolymerPath, level: int) -> int:
    """Signed anti-diagonal offset (positive toward e1) at the first vertex
    on or past l1-level 2*level."""
    for x, y in path.vertices:
        if x + y >= 2 * level:
            return (x - y) // 2
    raise ValueError(f"path does not reach l1-level {2 * level}")
