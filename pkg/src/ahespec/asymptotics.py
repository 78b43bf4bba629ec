"""Least-squares fits of ``lambda_1(R) ~ c0 + c2 R^-2 + c3 R^-3`` and the
two-term verdicts for each model family."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .models import DomainSpec, Warping, WarpedModel
from .radial_solver import EigenvalueError, first_eigenvalue

__all__ = [
    "ExpansionFit",
    "FitError",
    "TwoTermReport",
    "expansion_targets",
    "fit_expansion",
    "scaled_residuals",
    "two_term_report",
]

CONDITION_WARN = 1e12


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class ExpansionFit:
    powers: tuple[int, ...]
    coefficients: tuple[float, ...]
    residual_norm: float
    condition_estimate: float
    sample_count: int

    def coefficient(self, power: int) -> float:
        if power not in self.powers:
            return 0.0
        return self.coefficients[self.powers.index(power)]

    @property
    def c0(self) -> float:
        return self.coefficient(0)

    @property
    def c2(self) -> float:
        return self.coefficient(2)

    @property
    def c3(self) -> float:
        return self.coefficient(3)


def fit_expansion(samples, powers=(0, 2, 3)) -> ExpansionFit:
    """Fit ``lambda(R) = sum_p c_p R^-p`` by Householder QR least squares."""
    powers = tuple(sorted(set(int(p) for p in powers)))
    if not set(powers) <= {0, 2, 3} or not {0, 2} <= set(powers):
        raise FitError(f"powers must be a subset of {{0, 2, 3}} containing 0 and 2, got {powers}")
    R = np.array([float(s[0]) for s in samples])
    lam = np.array([float(s[1]) for s in samples])
    if len(R) < 4 or len(R) < len(powers) + 1:
        raise FitError(f"need at least {max(4, len(powers) + 1)} samples, got {len(R)}")
    if not np.all(np.isfinite(lam)) or not np.all(np.isfinite(R)) or np.any(R <= 0):
        raise FitError("samples must have finite lambda and positive finite R")
    if len(np.unique(R)) != len(R):
        raise FitError("rank-deficient design: duplicated radii")
    A = R[:, None] ** (-np.array(powers, dtype=float))[None, :]
    Q, Rt = np.linalg.qr(A)
    diag = np.abs(np.diag(Rt))
    if np.any(diag <= np.finfo(float).eps * diag.max() * len(R)):
        raise FitError("rank-deficient design matrix")
    coef = np.linalg.solve(Rt, Q.T @ lam)
    resid = lam - A @ coef
    sv = np.linalg.svd(A, compute_uv=False)
    cond = float(sv[0] / sv[-1])
    if cond > CONDITION_WARN:
        warnings.warn(f"ill-conditioned fit: condition estimate {cond:.3e}", RuntimeWarning, stacklevel=2)
    return ExpansionFit(
        powers=powers,
        coefficients=tuple(float(c) for c in coef),
        residual_norm=float(np.sqrt(np.mean(resid**2))),
        condition_estimate=cond,
        sample_count=len(R),
    )


def _first_bessel_zero(order: float) -> float:
    # j_{order,1} lies in (order, order + 2 sqrt(order + 1) + 2)
    lo = max(order, 0.0) + 1e-9
    hi = order + 2.0 * math.sqrt(order + 1.0) + 2.5
    return brentq(lambda x: jv(order, x), lo, hi, xtol=1e-15, rtol=1e-15)


def expansion_targets(model: WarpedModel) -> tuple[float, float]:
    """Expected ``(c0, c2)`` of ``lambda_1(R)`` for the model family."""
    n = model.fiber_dim
    if model.warping is Warping.SINH:
        return n * n / 4.0, math.pi**2
    if model.warping is Warping.LINEAR:
        # Euclidean ball: lambda_1 = j^2 / R^2 with j the first zero of J_{(n-1)/2}
        return 0.0, _first_bessel_zero(0.5 * (n - 1)) ** 2
    if model.warping is Warping.EXP:
        return n * n / 4.0, math.pi**2 / 4.0
    return 1.0, math.pi**2 / 4.0


def scaled_residuals(model: WarpedModel, samples) -> list[float]:
    """``(lambda - c0_target - c2_target / R^2) R^3`` for each sample."""
    c0, c2 = expansion_targets(model)
    return [(lam - c0 - c2 / R**2) * R**3 for R, lam in samples]


@dataclass(frozen=True)
class TwoTermReport:
    model: str
    n: int
    samples: tuple[tuple[float, float], ...]
    fit: ExpansionFit
    target_c0: float
    target_c2: float
    c0_tol: float
    c2_rel_tol: float
    scaled_residuals: tuple[float, ...] = field(default=())

    @property
    def c0_pass(self) -> bool:
        return abs(self.fit.c0 - self.target_c0) <= self.c0_tol

    @property
    def c2_pass(self) -> bool:
        return abs(self.fit.c2 - self.target_c2) <= self.c2_rel_tol * abs(self.target_c2)

    @property
    def max_scaled_residual(self) -> float:
        return max(abs(s) for s in self.scaled_residuals)

    @property
    def passed(self) -> bool:
        return self.c0_pass and self.c2_pass


def _solve_one(args):
    model, R, tol = args
    try:
        return first_eigenvalue(model, DomainSpec(R), tol).lam
    except EigenvalueError as exc:
        raise type(exc)(f"radius R={R!r}: {exc}") from exc


def two_term_report(
    model: WarpedModel,
    radii,
    tol: float = 1e-10,
    c0_tol: float = 1e-4,
    c2_rel_tol: float = 0.05,
    executor: Executor | None = None,
) -> TwoTermReport:
    """Sweep the solver over ``radii``, fit ``{0, 2, 3}`` and compare with targets."""
    radii = sorted(float(r) for r in radii)
    if len(radii) < 5:
        raise FitError(f"need at least 5 radii, got {len(radii)}")
    if radii[-1] < 2 * radii[0]:
        raise FitError("radius range must span at least a factor of 2")
    jobs = [(model, R, tol) for R in radii]
    mapper = executor.map if executor is not None else map
    lams = []
    for R, lam in zip(radii, mapper(_solve_one, jobs)):
        lams.append(lam)
    samples = tuple(zip(radii, lams))
    fit = fit_expansion(samples, (0, 2, 3))
    c0, c2 = expansion_targets(model)
    return TwoTermReport(
        model=model.name,
        n=model.fiber_dim,
        samples=samples,
        fit=fit,
        target_c0=c0,
        target_c2=c2,
        c0_tol=c0_tol,
        c2_rel_tol=c2_rel_tol,
        scaled_residuals=tuple(scaled_residuals(model, samples)),
    )
