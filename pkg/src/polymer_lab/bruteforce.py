"""Exhaustive path enumeration, the independent oracle for small grids.

Deliberately naive: masses are accumulated path by path with logsumexp so
the result shares no code with the wavefront recursion it cross-checks.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.special import logsumexp

from .dp import PathConstraint

__all__ = ["iter_paths", "path_log_mass", "brute_log_partition", "brute_path_measure"]


def iter_paths(u: tuple[int, int], v: tuple[int, int]):
    """All up-right vertex sequences from u to v."""
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx < 0 or dy < 0:
        return
    n = dx + dy
    for e1_positions in combinations(range(n), dx):
        e1_set = set(e1_positions)
        x, y = u
        path = [(x, y)]
        for step in range(n):
            if step in e1_set:
                x += 1
            else:
                y += 1
            path.append((x, y))
        yield tuple(path)


def path_log_mass(logw_at, path, include_start: bool = False) -> float:
    start = 0 if include_start else 1
    return float(sum(logw_at(p) for p in path[start:]))


def _keep(path, constraint: PathConstraint | None) -> bool:
    if constraint is None or constraint.mode == "unconstrained":
        return True
    inside = all(constraint.contains(p) for p in path)
    return inside if constraint.mode == "inside" else not inside


def brute_log_partition(
    logw_at,
    u: tuple[int, int],
    v: tuple[int, int],
    constraint: PathConstraint | None = None,
    include_start: bool = False,
) -> float:
    """log of the summed path masses from u to v; -inf for an empty path set."""
    masses = [
        path_log_mass(logw_at, p, include_start)
        for p in iter_paths(u, v)
        if _keep(p, constraint)
    ]
    if not masses:
        return -np.inf
    return float(logsumexp(masses))


def brute_path_measure(logw_at, u, v, include_start: bool = False):
    """Quenched measure over all paths from u to v as a dict path -> probability."""
    paths = list(iter_paths(u, v))
    masses = np.array([path_log_mass(logw_at, p, include_start) for p in paths])
    probs = np.exp(masses - logsumexp(masses))
    return dict(zip(paths, probs))
