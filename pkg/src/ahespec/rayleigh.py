"""Rayleigh quotients of radial test functions and the hyperbolic upper bound.

The upper bound uses the test function ``e^{-nt/2} sin(pi t / R)`` on the
hyperbolic ball.  After the substitution ``theta = pi t / R`` its Rayleigh
quotient is ``F(R) / G(R)`` with

    F(R) = int_0^pi (1 - e^{-2 R theta / pi})^n (-(n/2) sin theta + (pi/R) cos theta)^2
    G(R) = int_0^pi (1 - e^{-2 R theta / pi})^n sin^2 theta

and ``G = pi/2 - (pi^3/4) S(n) R^{-3} + O(R^{-4})`` where
``S(n) = sum_k C(n,k) (-1)^{k+1} / k^3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .models import DomainError, DomainSpec, RadialFunction, WarpedModel
from .quadrature import adaptive_gauss

__all__ = [
    "BoundaryConditionError",
    "HALF_PI",
    "UpperBoundReport",
    "expansion_sum",
    "g_deficit",
    "g_expansion_check",
    "paper_upper_bound",
    "rayleigh_quotient",
    "sin2_exp_integral",
    "upper_bound_test_function",
]

QUAD_RTOL = 1e-11

#: limit of ``int_0^pi e^{-r theta} sin^2 theta`` as ``r -> 0+``
HALF_PI = 0.5 * math.pi


class BoundaryConditionError(ValueError):
    pass


@dataclass(frozen=True)
class UpperBoundReport:
    R: float
    quotient_FG: float
    three_term: float
    F_value: float
    G_value: float


def rayleigh_quotient(model: WarpedModel, spec: DomainSpec, f: RadialFunction) -> float:
    """``int f'^2 w^n / int f^2 w^n`` over the ball or band."""
    a, b = model.interval(spec)
    probe = np.linspace(a, b, 257)
    scale = float(np.max(np.abs(f.value(probe))))
    if not scale > 0.0 or not math.isfinite(scale):
        raise BoundaryConditionError("test function vanishes identically (zero denominator)")
    ends = [b] if model.is_ball else [a, b]
    for e in ends:
        v = abs(float(f.value(np.array([e]))[0])) / scale
        if v >= 1e-12:
            raise BoundaryConditionError(
                f"test function does not vanish at the Dirichlet endpoint t={e}: |f|/max|f| = {v:.3e}"
            )
    n = model.fiber_dim

    def density(t):
        return np.exp(n * model.log_w(t)) if n else np.ones_like(t)

    def num(t):
        return f.derivative(t) ** 2 * density(t)

    def den(t):
        return f.value(t) ** 2 * density(t)

    top = adaptive_gauss(num, a, b, rtol=QUAD_RTOL)
    bottom = adaptive_gauss(den, a, b, rtol=QUAD_RTOL)
    if not bottom > 0.0:
        raise BoundaryConditionError("zero denominator in Rayleigh quotient")
    return top / bottom


def upper_bound_test_function(n: int, R: float) -> RadialFunction:
    """``f(t) = e^{-nt/2} sin(pi t / R)`` with its derivative."""
    k = math.pi / R

    def fn(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-0.5 * n * t)
        s, c = np.sin(k * t), np.cos(k * t)
        return e * s, e * (-0.5 * n * s + k * c)

    return RadialFunction(fn, f"exp(-{n}t/2) sin(pi t/{R:g})")


def _weight(n: int, R: float, theta):
    # (1 - e^{-2 R theta / pi})^n
    return (-np.expm1(-2.0 * R * theta / math.pi)) ** n


def _layer(R: float):
    # the weight rises from 0 to 1 over theta ~ pi / R
    return [p * math.pi / R for p in (0.5, 2.0, 8.0) if p / R < 1.0]


def F_integral(n: int, R: float) -> float:
    k = math.pi / R

    def integrand(th):
        return _weight(n, R, th) * (-0.5 * n * np.sin(th) + k * np.cos(th)) ** 2

    return adaptive_gauss(integrand, 0.0, math.pi, rtol=QUAD_RTOL, breakpoints=_layer(R))


def G_integral(n: int, R: float) -> float:
    def integrand(th):
        return _weight(n, R, th) * np.sin(th) ** 2

    return adaptive_gauss(integrand, 0.0, math.pi, rtol=QUAD_RTOL, breakpoints=_layer(R))


def g_deficit(n: int, R: float) -> float:
    """``pi/2 - G(R)`` integrated directly to avoid cancellation."""

    def integrand(th):
        # 1 - (1 - e^{-x})^n = -expm1(n log1p(-e^{-x}))
        x = 2.0 * R * th / math.pi
        with np.errstate(divide="ignore"):
            inner = n * np.log1p(-np.exp(-x))
        return -np.expm1(inner) * np.sin(th) ** 2

    return adaptive_gauss(integrand, 0.0, math.pi, rtol=QUAD_RTOL, breakpoints=_layer(R))


def expansion_sum(n: int) -> float:
    """``S(n) = sum_{k=1}^n C(n,k) (-1)^{k+1} / k^3``, accumulated exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = Fraction(0)
    for k in range(1, n + 1):
        total += Fraction((-1) ** (k + 1) * math.comb(n, k), k**3)
    return total.numerator / total.denominator


def sin2_exp_integral(r: float) -> float:
    """Closed form of ``int_0^pi e^{-r theta} sin^2 theta d theta`` for ``r > 0``.

    The ``r -> 0`` limit is :data:`HALF_PI`.
    """
    if not r > 0:
        raise DomainError(f"sin2_exp_integral requires r > 0, got {r!r}")
    return -2.0 * math.expm1(-math.pi * r) / (r * (r * r + 4.0))


def paper_upper_bound(n: int, R: float) -> UpperBoundReport:
    """Quotient ``F/G`` and its three-term expansion for the hyperbolic ball."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if R < 1:
        raise ValueError("R must be >= 1")
    F = F_integral(n, R)
    G = G_integral(n, R)
    three = n * n / 4 + math.pi**2 / R**2 + (n * n * math.pi**2 / 8) * expansion_sum(n) / R**3
    return UpperBoundReport(R=float(R), quotient_FG=F / G, three_term=three, F_value=F, G_value=G)


def g_expansion_check(n: int, R: float) -> float:
    """Scaled remainder ``(pi/2 - G(R)) R^3 - (pi^3/4) S(n)``; tends to 0 like ``R^-2``."""
    if R < 10:
        raise ValueError("R must be >= 10")
    return g_deficit(n, R) * R**3 - (math.pi**3 / 4) * expansion_sum(n)
