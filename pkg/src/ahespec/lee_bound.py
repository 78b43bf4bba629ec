"""Barta-type lower bound on the hyperbolic ball from the test function

    psi = u^{-n/2} sin(a ln(eps u)),    u = cosh t,

on ``F_eps = {u < 1/eps}``.  On the model ``u = cosh(dist to center)``
satisfies ``Delta u = (n+1) u``, ``1 - |du|^2/u^2 = sech^2 t`` and
``F_eps`` is exactly the geodesic ball of radius ``arccosh(1/eps)``.

Wherever ``psi > 0`` one has the exact identity

    -Delta psi / psi = n^2/4 + a^2
        + sech^2 t [n(n+2)/4 - (n+1) a cot(a ln(eps u)) - a^2]

so nonnegativity of the bracket on the ball gives
``lambda_1 >= n^2/4 + a^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import DomainError

__all__ = [
    "BoundNotCertifiedError",
    "LeeParameters",
    "ball_lower_bound",
    "bracket_margin",
    "cotangent_floor",
    "default_cn",
    "identity_residual",
    "lee_eigenfunction",
    "lee_eigenfunction_residual",
    "phi_identity_residual",
    "pointwise_lower_bound_check",
    "psi",
    "psi_split",
    "richardson_order",
]


class BoundNotCertifiedError(RuntimeError):
    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


def default_cn(n: int) -> float:
    """Smallest admissible ``c_n = 4 pi (n+1) / (n (n+2))``."""
    return 4.0 * math.pi * (n + 1) / (n * (n + 2))


@dataclass(frozen=True)
class LeeParameters:
    epsilon: float
    c_n: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.c_n < default_cn(self.n) * (1 - 1e-15):
            raise ValueError(
                f"c_n={self.c_n!r} is below the admissible minimum {default_cn(self.n)!r}"
            )
        top = math.pi + self.c_n / self.log_eps
        if not (0.0 < top < math.pi) or not self.a < 0.0:
            raise ValueError(
                f"epsilon={self.epsilon!r} too large for c_n={self.c_n!r}: the phase "
                f"a ln(eps u) must stay in (0, pi), but its maximum is {top!r}"
            )

    @classmethod
    def for_dimension(cls, n: int, epsilon: float, c_n: float | None = None) -> "LeeParameters":
        return cls(epsilon=epsilon, c_n=default_cn(n) if c_n is None else c_n, n=n)

    @property
    def log_eps(self) -> float:
        return math.log(self.epsilon)

    @property
    def a(self) -> float:
        L = self.log_eps
        return math.pi / L + self.c_n / (L * L)

    @property
    def t_max(self) -> float:
        """Radius of ``F_eps`` on the model, ``arccosh(1/eps)``."""
        return math.acosh(1.0 / self.epsilon)

    @property
    def bound(self) -> float:
        return self.n * self.n / 4.0 + self.a**2


def lee_eigenfunction(t):
    """``(u, u', u'')`` for ``u = cosh t``."""
    t = np.asarray(t, dtype=float)
    return np.cosh(t), np.sinh(t), np.cosh(t)


def lee_eigenfunction_residual(n: int, t) -> np.ndarray:
    """``(u'' + n coth(t) u' - (n+1) u) / u`` with closed-form derivatives.

    Divided by ``u`` since ``u`` grows like ``e^t`` and the absolute residual
    is dominated by rounding of ``cosh t`` itself.
    """
    t = np.asarray(t, dtype=float)
    u, du, d2u = lee_eigenfunction(t)
    return (d2u + n * du / np.tanh(t) - (n + 1) * u) / u


def _phase(params: LeeParameters, t):
    # a ln(eps cosh t), using log cosh t = |t| - ln 2 + log1p(e^{-2|t|})
    t = np.abs(np.asarray(t, dtype=float))
    log_u = t - math.log(2.0) + np.log1p(np.exp(-2.0 * t))
    return params.a * (params.log_eps + log_u), log_u


def _check_inside(params: LeeParameters, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t >= params.t_max):
        raise DomainError(
            f"point outside F_eps: need 0 <= t < {params.t_max!r} (cosh t < 1/eps)"
        )


def psi(params: LeeParameters, t):
    """``cosh(t)^{-n/2} sin(a ln(eps cosh t))`` on ``F_eps``."""
    _check_inside(params, t)
    phase, log_u = _phase(params, t)
    out = np.exp(-0.5 * params.n * log_u) * np.sin(phase)
    return float(out) if np.ndim(out) == 0 else out


def psi_split(params: LeeParameters, t: float) -> float:
    """Second evaluation path: ``phi(t) * h(u)`` with plain math calls."""
    _check_inside(params, t)
    u = math.cosh(t)
    phi = u ** (-params.n / 2.0)
    h = math.sin(params.a * math.log(params.epsilon * u))
    return phi * h


def _psi_unchecked(params: LeeParameters, t):
    phase, log_u = _phase(params, t)
    return np.exp(-0.5 * params.n * log_u) * np.sin(phase)


def bracket_margin(params: LeeParameters, t):
    """``sech^2 t [n(n+2)/4 - (n+1) a cot(a ln(eps u)) - a^2]``."""
    n, a = params.n, params.a
    phase, _ = _phase(params, t)
    s = np.sin(phase)
    if np.any(s == 0.0):
        raise DomainError("cot evaluated at a multiple of pi")
    bracket = n * (n + 2) / 4.0 - (n + 1) * a * np.cos(phase) / s - a * a
    return bracket / np.cosh(t) ** 2


def _closed_form(params: LeeParameters, t):
    n, a = params.n, params.a
    return n * n / 4.0 + a * a + bracket_margin(params, t)


def identity_residual(params: LeeParameters, t: float, h_step: float) -> float:
    """``-Delta psi / psi`` by central differences minus its closed form."""
    if not 1e-6 < h_step < 1e-2:
        raise ValueError("h_step must lie in (1e-6, 1e-2)")
    if not (2 * h_step <= t <= params.t_max - 2 * h_step):
        raise DomainError("t must be interior to F_eps with margin 2*h_step")
    n = params.n
    pm, p0, pp = _psi_unchecked(params, np.array([t - h_step, t, t + h_step]))
    d1 = (pp - pm) / (2 * h_step)
    d2 = (pp - 2 * p0 + pm) / h_step**2
    lap = d2 + n / math.tanh(t) * d1
    return float(-lap / p0 - _closed_form(params, t))


def richardson_order(params: LeeParameters, t: float, h_step: float) -> tuple[float, float, float]:
    """Residuals at ``h`` and ``h/2`` and the observed convergence order."""
    r1 = identity_residual(params, t, h_step)
    r2 = identity_residual(params, t, h_step / 2)
    return r1, r2, math.log2(abs(r1) / abs(r2))


def phi_identity_residual(n: int, t, h_step: float | None = None):
    """``-Delta phi / phi - n^2/4 - n(n+2)/4 sech^2 t`` for ``phi = cosh^{-n/2}``.

    Closed form when ``h_step`` is None, else central differences.
    """
    t = np.asarray(t, dtype=float)
    target = n * n / 4.0 + n * (n + 2) / 4.0 / np.cosh(t) ** 2
    if h_step is None:
        # phi'/phi = -(n/2) tanh, phi''/phi = (n/2)^2 tanh^2 - (n/2) sech^2
        th = np.tanh(t)
        sech2 = 1.0 / np.cosh(t) ** 2
        lap_over = (0.25 * n * n * th * th - 0.5 * n * sech2) + n / th * (-0.5 * n * th)
        return -lap_over - target

    def phi(x):
        return np.cosh(x) ** (-n / 2.0)

    pm, p0, pp = phi(t - h_step), phi(t), phi(t + h_step)
    lap = (pp - 2 * p0 + pm) / h_step**2 + n / np.tanh(t) * (pp - pm) / (2 * h_step)
    return -lap / p0 - target


def cotangent_floor(params: LeeParameters, u):
    """``-a cot(a ln(eps u)) - (-a cot(pi + c_n / ln eps))``; nonnegative on ``[1, 1/eps)``."""
    a = params.a
    u = np.asarray(u, dtype=float)
    lhs = -a / np.tan(a * np.log(params.epsilon * u))
    rhs = -a / math.tan(math.pi + params.c_n / params.log_eps)
    return lhs - rhs


def pointwise_lower_bound_check(params: LeeParameters, grid_points: int = 10_000) -> float:
    """Minimum of :func:`bracket_margin` over a uniform grid of ``[0, t_max)``."""
    t = np.linspace(0.0, params.t_max, grid_points + 1)[:-1]
    return float(np.min(bracket_margin(params, t)))


def ball_lower_bound(n: int, R: float, c_n: float | None = None, grid_points: int = 10_000) -> float:
    """Certified ``n^2/4 + a^2`` for the hyperbolic ball of radius ``R``.

    Uses ``eps = 1/cosh R`` so that ``F_eps`` is the ball itself.
    """
    params = LeeParameters.for_dimension(n, 1.0 / math.cosh(R), c_n)
    margin = pointwise_lower_bound_check(params, grid_points)
    if not margin >= 0.0:
        raise BoundNotCertifiedError(
            f"bound not certified at R={R!r}: pointwise margin {margin!r} < 0", margin
        )
    return params.bound
