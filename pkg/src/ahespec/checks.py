"""Named numerical checks run by ``ahespec verify``.

Each check returns a :class:`CheckResult` with the measured quantity, the
threshold it is compared against and a verdict.  The registry keys are part
of the command-line interface.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .lee_bound import (
    LeeParameters,
    ball_lower_bound,
    identity_residual,
    lee_eigenfunction_residual,
    pointwise_lower_bound_check,
)
from .models import DomainSpec, Warping, WarpedModel
from .quadrature import adaptive_gauss
from .radial_solver import first_eigenvalue
from .rayleigh import g_expansion_check, paper_upper_bound, sin2_exp_integral

__all__ = ["CHECKS", "CheckResult", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return asdict(self)


def closed_form_integral() -> tuple[float, float, bool, str]:
    worst = 0.0
    for r in (0.5, 1.0, 2.0, 10.0, 100.0):
        quad = adaptive_gauss(lambda th: np.exp(-r * th) * np.sin(th) ** 2, 0.0, math.pi, rtol=1e-14)
        worst = max(worst, abs(sin2_exp_integral(r) / quad - 1.0))
    return worst, 1e-10, worst < 1e-10, "max relative error at r in {0.5, 1, 2, 10, 100}"


def g_coefficient() -> tuple[float, float, bool, str]:
    worst_ratio = 0.0
    for n in (1, 2, 3):
        res = [abs(g_expansion_check(n, R)) for R in (50.0, 100.0, 200.0)]
        worst_ratio = max(worst_ratio, res[1] / res[0], res[2] / res[1])
    return (
        worst_ratio,
        1.0,
        worst_ratio < 1.0,
        "largest ratio of successive |scaled remainder| along R = 50, 100, 200 for n = 1, 2, 3",
    )


def lee_eigenfunction_check() -> tuple[float, float, bool, str]:
    t = np.linspace(0.01, 30.0, 10_000)
    worst = max(float(np.max(np.abs(lee_eigenfunction_residual(n, t)))) for n in (2, 3, 4))
    return worst, 1e-10, worst < 1e-10, "max |Delta u - (n+1) u| / u, u = cosh t, t in [0.01, 30], n = 2, 3, 4"


def identity_check() -> tuple[float, float, bool, str]:
    worst = 0.0
    ratios = []
    for n, eps, t in ((2, 1e-3, 2.0), (3, 1e-4, 5.0)):
        p = LeeParameters.for_dimension(n, eps)
        r1 = identity_residual(p, t, 1e-3)
        r2 = identity_residual(p, t, 5e-4)
        worst = max(worst, abs(r1))
        ratios.append(abs(r1) / abs(r2))
    ok = worst < 1e-5 and all(3.0 <= q <= 5.0 for q in ratios)
    ratio_txt = ", ".join(f"{q:.3f}" for q in ratios)
    return worst, 1e-5, ok, f"max residual at h = 1e-3; halving ratios {ratio_txt} (need 3..5)"


def pointwise_check(epsilon: float | None = None) -> tuple[float, float, bool, str]:
    eps_list = (1e-3, 1e-4) if epsilon is None else (epsilon,)
    worst = math.inf
    notes = []
    for n in (2, 3):
        for eps in eps_list:
            try:
                params = LeeParameters.for_dimension(n, eps)
            except ValueError as exc:
                return math.nan, 0.0, False, f"n={n} eps={eps:g}: {exc}"
            m = pointwise_lower_bound_check(params, 10_000)
            notes.append(f"n={n} eps={eps:g}: {m:.3e}")
            worst = min(worst, m)
    return worst, 0.0, worst >= 0.0, "min margin over 10^4 grid; " + "; ".join(notes)


def exact_bands() -> tuple[float, float, bool, str]:
    worst = 0.0
    for warping, dims in ((Warping.EXP, (2, 3)), (Warping.COSH, (2,))):
        for n in dims:
            for R in (2.0, 5.0, 10.0):
                lam = first_eigenvalue(WarpedModel(n, warping), DomainSpec(R), 1e-10).lam
                c0 = n * n / 4 if warping is Warping.EXP else 1.0
                worst = max(worst, abs(lam - (c0 + math.pi**2 / (4 * R * R))))
    return worst, 1e-8, worst < 1e-8, "max |lambda - exact| over exp n=2,3 and cosh n=2 bands, R = 2, 5, 10"


def sandwich() -> tuple[float, float, bool, str]:
    slack = math.inf
    for n in (2, 3):
        for R in (10.0, 20.0, 40.0):
            lam = first_eigenvalue(WarpedModel(n, Warping.SINH), DomainSpec(R), 1e-10).lam
            lo = ball_lower_bound(n, R)
            hi = paper_upper_bound(n, R).quotient_FG
            slack = min(slack, lam - lo, hi - lam)
    return slack, -1e-9, slack >= -1e-9, "min of (lambda - lower, upper - lambda), sinh ball n = 2, 3, R = 10, 20, 40"


CHECKS: dict[str, Callable[..., tuple[float, float, bool, str]]] = {
    "eq3.4-closedform": closed_form_integral,
    "eq3.5-coefficient": g_coefficient,
    "lemma4.1-eigenfunction": lee_eigenfunction_check,
    "eq4.7-identity": identity_check,
    "eq4.11-pointwise": pointwise_check,
    "sec5-exact-bands": exact_bands,
    "sandwich": sandwich,
}


def run_checks(only=None, epsilon: float | None = None) -> list[CheckResult]:
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    out = []
    for name in names:
        fn = CHECKS[name]
        measured, threshold, ok, detail = fn(epsilon) if name == "eq4.11-pointwise" else fn()
        out.append(CheckResult(name, float(measured), float(threshold), bool(ok), detail))
    return out
