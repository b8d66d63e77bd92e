"""Closed-form quantities of the inverse-gamma polymer limit shape.

Everything in this module is a deterministic pure function of the shape
parameter mu and the boundary parameter rho: polygamma functions, the
characteristic direction, the limiting free energy per half l1-unit, the
slope map and its inverse, and off-diagonal limit values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

__all__ = [
    "ModelShape",
    "Direction2",
    "polygamma",
    "characteristic_direction",
    "shape_f",
    "diagonal_shape_value",
    "slope_map",
    "inverse_slope",
    "shape_at",
]

# Bernoulli numbers B_2 .. B_16; the B_18 tail term at x = 12 is below 1e-18.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_ASYMPTOTIC_CUTOFF = 12.0


@dataclass(frozen=True)
class ModelShape:
    """Shape parameter mu > 0 with an optional boundary parameter rho in (0, mu)."""

    mu: float
    rho: float | None = None

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.rho is not None and not 0 < self.rho < self.mu:
            raise ValueError(f"rho must lie in (0, {self.mu}), got {self.rho}")


@dataclass(frozen=True)
class Direction2:
    """Unit l1 direction in the closed first quadrant."""

    e1: float
    e2: float

    def __post_init__(self):
        if self.e1 < 0 or self.e2 < 0 or abs(self.e1 + self.e2 - 1.0) > 1e-12:
            raise ValueError(f"not a unit l1 direction: ({self.e1}, {self.e2})")

    def slope(self) -> float:
        return self.e2 / self.e1


def polygamma(order: int, x: float) -> float:
    """Polygamma function of order 0, 1 or 2 at x > 0.

    Upward recurrence shifts the argument to at least 12, then the
    Bernoulli asymptotic series is summed.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"unsupported polygamma order {order}")
    x = float(x)
    if not x > 0:
        raise ValueError(f"polygamma argument must be positive, got {x}")

    shift = 0.0
    while x < _ASYMPTOTIC_CUTOFF:
        if order == 0:
            shift -= 1.0 / x
        elif order == 1:
            shift += 1.0 / (x * x)
        else:
            shift -= 2.0 / (x * x * x)
        x += 1.0

    inv = 1.0 / x
    inv2 = inv * inv
    if order == 0:
        total = math.log(x) - 0.5 * inv
        p = inv2
        for n, b in enumerate(_BERNOULLI, start=1):
            total -= b * p / (2 * n)
            p *= inv2
    elif order == 1:
        total = inv + 0.5 * inv2
        p = inv2 * inv
        for b in _BERNOULLI:
            total += b * p
            p *= inv2
    else:
        total = -inv2 - inv2 * inv
        p = inv2 * inv2
        for n, b in enumerate(_BERNOULLI, start=1):
            total -= (2 * n + 1) * b * p
            p *= inv2
    return shift + total


def _check_rho(mu: float, rho: float) -> None:
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not 0 < rho < mu:
        raise ValueError(f"rho must lie in (0, {mu}), got {rho}")


def characteristic_direction(mu: float, rho: float) -> Direction2:
    """Direction in which the rho-boundary stationary model is critical."""
    _check_rho(mu, rho)
    a = polygamma(1, rho)
    b = polygamma(1, mu - rho)
    return Direction2(a / (a + b), b / (a + b))


def shape_f(mu: float, rho: float) -> float:
    """Limiting free energy per half l1-unit in the direction of rho."""
    _check_rho(mu, rho)
    a = polygamma(1, rho)
    b = polygamma(1, mu - rho)
    return (-a * polygamma(0, mu - rho) - b * polygamma(0, rho)) / (a + b)


def diagonal_shape_value(mu: float) -> float:
    """Shape value in the diagonal direction, -psi0(mu/2)."""
    return -polygamma(0, mu / 2.0)


def slope_map(mu: float, rho: float, z: float) -> float:
    """Slope of the characteristic direction at boundary parameter rho + z."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not 0 < rho + z < mu:
        raise ValueError(f"rho + z must lie in (0, {mu}), got {rho + z}")
    return polygamma(1, mu - rho - z) / polygamma(1, rho + z)


def inverse_slope(mu: float, m: float) -> float:
    """Solve slope_map(mu, mu/2, z) = m for z by bracketed root finding.

    The slope map is strictly increasing in z, so the root is unique.  The
    residual is verified to be below 1e-12 relative to max(1, m).
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not m > 0:
        raise ValueError(f"slope must be positive, got {m}")
    if m == 1.0:
        return 0.0
    half = mu / 2.0
    edge = half * (1.0 - 1e-13)

    def g(z: float) -> float:
        return slope_map(mu, half, z) - m

    if g(-edge) > 0 or g(edge) < 0:
        raise ArithmeticError(f"slope {m} outside the invertible window for mu={mu}")
    z = brentq(g, -edge, edge, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    if abs(g(z)) > 1e-12 * max(1.0, m):
        raise ArithmeticError(f"inverse slope did not converge for m={m}, mu={mu}")
    return z


def shape_at(mu: float, p: tuple[float, float]) -> float:
    """Limit shape value at a point with strictly positive coordinates.

    Writes p as |p|_1 times a characteristic direction and evaluates the
    directional shape value there; positively homogeneous of degree 1.
    """
    p1, p2 = p
    if not (p1 > 0 and p2 > 0):
        raise ValueError(f"point must have strictly positive coordinates, got {p}")
    z = inverse_slope(mu, p2 / p1)
    return (p1 + p2) * shape_f(mu, mu / 2.0 + z)
