"""Rotationally symmetric model geometries ``dt^2 + w(t)^2 g_fiber``.

Every consumer works with the radial reduction of the Laplace-Beltrami
operator, ``f'' + drift(t) f'`` with ``drift = n w'/w``, and with the radial
volume density ``w^n``.  Fiber volume constants are dropped everywhere since
they cancel in every quotient computed by this package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "DomainKind",
    "DomainSpec",
    "ModelError",
    "RadialFunction",
    "Warping",
    "WarpedModel",
    "drift_coefficient",
    "volume_density",
]

_LOG2 = math.log(2.0)


class ModelError(ValueError):
    """Invalid model construction (bad pairing, bad fiber dimension)."""


class DomainError(ValueError):
    """Evaluation requested outside the domain where a quantity is defined."""


class Warping(enum.Enum):
    SINH = "sinh"
    LINEAR = "linear"
    EXP = "exp"
    COSH = "cosh"


class DomainKind(enum.Enum):
    BALL = "ball"
    BAND = "band"


_NATURAL_DOMAIN = {
    Warping.SINH: DomainKind.BALL,
    Warping.LINEAR: DomainKind.BALL,
    Warping.EXP: DomainKind.BAND,
    Warping.COSH: DomainKind.BAND,
}


@dataclass(frozen=True)
class DomainSpec:
    """Geodesic radius of a ball, or half-width of a band."""

    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not math.isfinite(r) or r <= 0.0:
            raise DomainError(f"radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class WarpedModel:
    """Warped product ``dt^2 + w(t)^2 g_N`` with an ``n``-dimensional fiber.

    The domain kind is fixed by the warping: ``sinh`` and ``linear`` close up
    smoothly at ``t = 0`` and carry geodesic balls, ``exp`` and ``cosh`` are
    defined on the whole line and carry symmetric bands ``(-R, R) x N``.
    """

    fiber_dim: int
    warping: Warping
    domain_kind: DomainKind | None = None

    def __post_init__(self):
        warping = Warping(self.warping)
        object.__setattr__(self, "warping", warping)
        n = self.fiber_dim
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
            raise ModelError(f"fiber_dim must be a nonnegative integer, got {n!r}")
        object.__setattr__(self, "fiber_dim", int(n))
        natural = _NATURAL_DOMAIN[warping]
        kind = natural if self.domain_kind is None else DomainKind(self.domain_kind)
        if kind is not natural:
            raise ModelError(
                f"{warping.value} warping pairs only with the {natural.value} domain, "
                f"not {kind.value}"
            )
        object.__setattr__(self, "domain_kind", kind)
        if warping is Warping.COSH and n != 2:
            raise ModelError(f"cosh warping is only supported with fiber_dim=2, got {n}")

    @classmethod
    def from_name(cls, name: str, n: int) -> "WarpedModel":
        """Parse selectors like ``sinh-ball`` or ``exp-band``."""
        warping, sep, kind = name.strip().lower().partition("-")
        try:
            w = Warping(warping)
        except ValueError:
            raise ModelError(f"unknown warping {warping!r} in model name {name!r}") from None
        try:
            k = DomainKind(kind) if sep else None
        except ValueError:
            raise ModelError(f"unknown domain kind {kind!r} in model name {name!r}") from None
        return cls(n, w, k)

    @property
    def name(self) -> str:
        return f"{self.warping.value}-{self.domain_kind.value}"

    @property
    def is_ball(self) -> bool:
        return self.domain_kind is DomainKind.BALL

    def interval(self, spec: DomainSpec) -> tuple[float, float]:
        R = spec.radius
        return (0.0, R) if self.is_ball else (-R, R)

    # Closed-form warping functions; all accept scalars or arrays.

    def w(self, t):
        wp = self.warping
        if wp is Warping.SINH:
            return np.sinh(t)
        if wp is Warping.LINEAR:
            return np.asarray(t, dtype=float) * 1.0
        if wp is Warping.EXP:
            return np.exp(t)
        return np.cosh(t)

    def dw(self, t):
        wp = self.warping
        if wp is Warping.SINH:
            return np.cosh(t)
        if wp is Warping.LINEAR:
            return np.ones_like(np.asarray(t, dtype=float))
        if wp is Warping.EXP:
            return np.exp(t)
        return np.sinh(t)

    def d2w(self, t):
        wp = self.warping
        if wp is Warping.SINH:
            return np.sinh(t)
        if wp is Warping.LINEAR:
            return np.zeros_like(np.asarray(t, dtype=float))
        if wp is Warping.EXP:
            return np.exp(t)
        return np.cosh(t)

    def log_w(self, t):
        """``log w(t)``, stable for large ``|t|``."""
        t = np.asarray(t, dtype=float)
        wp = self.warping
        with np.errstate(divide="ignore"):
            if wp is Warping.SINH:
                a = np.abs(t)
                return a - _LOG2 + np.log(-np.expm1(-2.0 * a))
            if wp is Warping.LINEAR:
                return np.log(np.abs(t))
        if wp is Warping.EXP:
            return t * 1.0
        a = np.abs(t)
        return a - _LOG2 + np.log1p(np.exp(-2.0 * a))

    def log_derivative(self, t):
        """``w'(t)/w(t)``, no domain checks."""
        wp = self.warping
        if wp is Warping.SINH:
            return 1.0 / np.tanh(t)
        if wp is Warping.LINEAR:
            return 1.0 / np.asarray(t, dtype=float)
        if wp is Warping.EXP:
            return np.ones_like(np.asarray(t, dtype=float))
        return np.tanh(t)

    def potential(self, t):
        """Potential ``q`` of the Liouville normal form.

        With ``f = w^{-n/2} v`` the radial equation ``f'' + drift f' + lam f = 0``
        becomes ``v'' + (lam - q) v = 0`` where
        ``q = (n/2) w''/w + n(n-2)/4 (w'/w)^2``.
        """
        n = self.fiber_dim
        wp = self.warping
        ld = self.log_derivative(t)
        if wp is Warping.LINEAR:
            second = 0.0
        else:
            # w''/w == 1 for sinh, exp and cosh
            second = 1.0
        return 0.5 * n * second + 0.25 * n * (n - 2) * ld * ld

    def scalar_potential(self):
        """Scalar-only version of :meth:`potential` for ODE right-hand sides."""
        n = self.fiber_dim
        base = 0.0 if self.warping is Warping.LINEAR else 0.5 * n
        quad = 0.25 * n * (n - 2)
        wp = self.warping
        if quad == 0.0 or wp is Warping.EXP:
            const = base + quad

            def q(t):
                return const

        elif wp is Warping.SINH:

            def q(t):
                c = 1.0 / math.tanh(t)
                return base + quad * c * c

        elif wp is Warping.LINEAR:

            def q(t):
                return quad / (t * t)

        else:

            def q(t):
                c = math.tanh(t)
                return base + quad * c * c

        return q


def _check_open(model: WarpedModel, t) -> None:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("non-finite radial coordinate")
    if model.is_ball and np.any(t <= 0.0):
        raise DomainError(
            f"{model.name}: drift is singular at the center; need t > 0, got min t = {t.min()!r}"
        )


def drift_coefficient(model: WarpedModel, t):
    """First-order coefficient ``n w'(t)/w(t)`` of the radial Laplacian."""
    _check_open(model, t)
    out = model.fiber_dim * model.log_derivative(t)
    return float(out) if np.ndim(out) == 0 else out


def volume_density(model: WarpedModel, t):
    """Radial volume weight ``w(t)^n``."""
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise DomainError("non-finite radial coordinate")
    if model.is_ball and np.any(t_arr < 0.0):
        raise DomainError(f"{model.name}: radial coordinate must be >= 0")
    out = model.w(t_arr) ** model.fiber_dim
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RadialFunction:
    """Radial scalar field ``t -> (f(t), f'(t))``.

    ``func`` must accept numpy arrays and return a pair of arrays.
    """

    func: Callable
    tag: str = ""

    def __call__(self, t):
        return self.func(t)

    def value(self, t):
        return self.func(t)[0]

    def derivative(self, t):
        return self.func(t)[1]

    @classmethod
    def from_callables(cls, f, df, tag: str = "") -> "RadialFunction":
        return cls(lambda t: (f(t), df(t)), tag)
