"""First Dirichlet eigenvalue of balls and bands in warped-product models.

Two independent routes:

* :func:`first_eigenvalue` shoots the radial equation
  ``f'' + n (w'/w) f' + lam f = 0`` in Pruefer-angle form and root-finds the
  endpoint angle against ``pi``.
* :func:`fd_oracle` discretizes the self-adjoint form ``-(w^n f')'/w^n`` on a
  uniform mesh and returns the smallest eigenvalue of the resulting symmetric
  tridiagonal matrix by Sturm-sequence bisection.

The shooting route works with ``v = w^{n/2} f`` so the exponential decay of
the eigenfunction is factored out of the integrated variables; the angle
``theta = atan2(v, v')`` obeys ``theta' = cos^2 + (lam - q) sin^2`` with ``q``
from :meth:`WarpedModel.potential`, and ``theta`` crosses multiples of ``pi``
only upward, once per interior zero of ``f``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigvalsh_tridiagonal

from .models import DomainSpec, WarpedModel

__all__ = [
    "EigenEstimate",
    "EigenvalueError",
    "IntegrationError",
    "BracketError",
    "NotAnEigenvalueError",
    "MeshError",
    "first_eigenvalue",
    "fd_oracle",
    "shoot",
    "eigenfunction_samples",
    "default_ceiling",
    "sturm_count",
]

RTOL = 1e-12
ATOL = 1e-14
#: endpoint angles this close to a multiple of pi count as a zero at R, not inside
ENDPOINT_ANGLE_SLACK = 1e-8


class EigenvalueError(RuntimeError):
    pass


class IntegrationError(EigenvalueError):
    pass


class BracketError(EigenvalueError):
    pass


class NotAnEigenvalueError(EigenvalueError):
    pass


class MeshError(EigenvalueError):
    pass


@dataclass(frozen=True)
class EigenEstimate:
    lambda_low: float
    lambda_high: float
    endpoint_residual: float
    zero_count: tuple[int, int]

    @property
    def lam(self) -> float:
        return 0.5 * (self.lambda_low + self.lambda_high)

    @property
    def width(self) -> float:
        return self.lambda_high - self.lambda_low


def default_ceiling(model: WarpedModel) -> float:
    n = model.fiber_dim
    return n * n / 4.0 + math.pi**2 + 10.0


def _start(model: WarpedModel, spec: DomainSpec, lam: float):
    """Initial point and Pruefer state ``(t0, theta0, log r0, log-scale of f)``."""
    n = model.fiber_dim
    if model.is_ball:
        t0 = max(1e-6, 1e-8 * spec.radius)
        # regular solution of f'' + (n/t) f' + lam f = 0 near the center
        f0 = 1.0 - lam * t0 * t0 / (2.0 * (n + 1))
        df0 = -lam * t0 / (n + 1)
        # v = w^{n/2} f, v' = w^{n/2} (f' + (n/2)(w'/w) f); common factor w^{n/2} dropped
        vs = f0
        dvs = df0 + 0.5 * n * float(model.log_derivative(t0)) * f0
        theta0 = math.atan2(vs, dvs)
        log_r0 = 0.5 * n * float(model.log_w(t0)) + math.log(math.hypot(vs, dvs))
        return t0, theta0, log_r0
    t0 = -spec.radius
    # f(-R) = 0, f'(-R) = 1  =>  v = 0, v' = w^{n/2}
    return t0, 0.0, 0.5 * n * float(model.log_w(t0))


def _rhs(model: WarpedModel, lam: float):
    q = model.scalar_potential()

    def rhs(t, y):
        # y = (theta, log r, d theta / d lam)
        s, c = math.sin(y[0]), math.cos(y[0])
        k = lam - q(t)
        return [c * c + k * s * s, (1.0 - k) * s * c, 2.0 * (k - 1.0) * s * c * y[2] + s * s]

    return rhs


def _integrate(model: WarpedModel, spec: DomainSpec, lam: float, t_eval=None):
    t0, theta0, log_r0 = _start(model, spec, lam)
    t1 = spec.radius
    sol = solve_ivp(
        _rhs(model, lam),
        (t0, t1),
        [theta0, log_r0, 0.0],
        method="DOP853",
        rtol=RTOL,
        atol=ATOL,
        t_eval=t_eval,
    )
    if sol.status != 0:
        raise IntegrationError(
            f"{model.name} n={model.fiber_dim} R={spec.radius} lam={lam!r}: {sol.message}"
        )
    return sol


def _zero_count(theta_end: float, slack: float = 0.0) -> int:
    # an angle within ``slack`` of k pi is the Dirichlet zero at the far end
    x = theta_end - slack
    if x <= math.pi:
        return 0
    return int(math.ceil(x / math.pi)) - 1


def _endpoint_angle(model: WarpedModel, spec: DomainSpec, lam: float) -> tuple[float, float]:
    """Endpoint angle and its derivative with respect to ``lam``."""
    y = _integrate(model, spec, lam).y[:, -1]
    return float(y[0]), float(y[2])


def shoot(model: WarpedModel, spec: DomainSpec, lam: float) -> tuple[float, int]:
    """Integrate from the regular end and return ``(endpoint value, zero count)``.

    The endpoint value is ``sin(theta(R))``: the far-end value of the solution
    normalized by its Pruefer amplitude.  Zero count is the number of interior
    sign changes and is nondecreasing in ``lam``.
    """
    theta, _ = _endpoint_angle(model, spec, float(lam))
    return math.sin(theta), _zero_count(theta, ENDPOINT_ANGLE_SLACK)


def _initial_bracket(model: WarpedModel, spec: DomainSpec, g, ceiling: float):
    """Bracket ``[lo, hi]`` with ``g(lo) <= 0 < g(hi)`` around the first crossing.

    The search starts from ``q(end) + (pi / length)^2``, the eigenvalue of the
    normal-form equation with the potential frozen at its far-end value, and
    expands geometrically.  ``lam = 0`` is always below the first eigenvalue.
    """
    a, b = model.interval(spec)
    scale = (math.pi / (b - a)) ** 2
    guess = min(float(model.scalar_potential()(b)) + scale, ceiling)
    if guess <= 0.0:
        guess = scale
    if g(guess)[0] > 0.0:
        hi, lo = guess, 0.0
        k = 1.0
        while guess - k * scale > 0.0:
            x = guess - k * scale
            if g(x)[0] <= 0.0:
                lo = x
                break
            hi = x
            k *= 2.0
        return lo, hi
    lo = guess
    k = 1.0
    while True:
        x = min(guess + k * scale, ceiling)
        if g(x)[0] > 0.0:
            return lo, x
        if x >= ceiling:
            raise BracketError(
                f"{model.name} n={model.fiber_dim} R={spec.radius}: no eigenvalue below the "
                f"search ceiling {ceiling!r}"
            )
        lo = x
        k *= 2.0


def first_eigenvalue(
    model: WarpedModel,
    spec: DomainSpec,
    tol: float = 1e-10,
    ceiling: float | None = None,
) -> EigenEstimate:
    """Bracket the first Dirichlet eigenvalue to width ``<= tol``.

    The endpoint angle is increasing in ``lam``, is below ``pi`` at
    ``lam = 0`` for every model here, and equals ``pi`` exactly at the first
    eigenvalue.  The crossing is located by Newton steps on
    ``theta(R; lam) - pi`` (the lam-derivative is integrated alongside),
    falling back to bisection whenever a step leaves the current bracket.
    The final bracket is certified by evaluating both ends.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    ceiling = default_ceiling(model) if ceiling is None else float(ceiling)
    floor_tol = 64 * np.finfo(float).eps * max(1.0, ceiling)
    if tol < floor_tol:
        warnings.warn(
            f"tol={tol!r} is below achievable integration accuracy; using {floor_tol!r}",
            RuntimeWarning,
            stacklevel=2,
        )
        tol = floor_tol

    def g(lam):
        theta, dtheta = _endpoint_angle(model, spec, lam)
        return theta - math.pi, dtheta

    lo, hi = _initial_bracket(model, spec, g, ceiling)
    x = 0.5 * (lo + hi)
    gx, dgx = g(x)
    for _ in range(200):
        if gx > 0.0:
            hi = x
        else:
            lo = x
        step_ok = dgx > 0.0
        if step_ok:
            x_new = x - gx / dgx
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol / 8 or hi - lo < tol / 2:
            x = x_new
            break
        x = x_new
        gx, dgx = g(x)
    else:  # pragma: no cover
        raise BracketError("root search did not converge")
    root = x

    half = tol / 4
    for _ in range(60):
        a, b = max(root - half, 0.0), root + half
        ga, gb = g(a)[0], g(b)[0]
        if ga < 0.0 < gb:
            break
        half *= 2
    else:  # pragma: no cover - angle is monotone in lam
        raise BracketError("could not certify bracket around the located root")
    if b - a > tol:
        warnings.warn(
            f"bracket width {b - a!r} exceeds tol={tol!r}; integration accuracy limits it",
            RuntimeWarning,
            stacklevel=2,
        )
    return EigenEstimate(
        lambda_low=a,
        lambda_high=b,
        endpoint_residual=math.sin(g(0.5 * (a + b))[0] + math.pi),
        zero_count=(_zero_count(ga + math.pi), _zero_count(gb + math.pi)),
    )


def eigenfunction_samples(
    model: WarpedModel,
    spec: DomainSpec,
    lam: float,
    grid_points: int,
    threshold: float = 1e-6,
) -> list[tuple[float, float]]:
    """Samples of the first eigenfunction on a uniform grid over the closed domain.

    Values are normalized to maximum 1.  Dirichlet endpoints are reported as
    exactly 0.  Raises :class:`NotAnEigenvalueError` if ``lam`` does not make
    the endpoint residual small or the solution has interior zeros.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    n = model.fiber_dim
    lo, hi = model.interval(spec)
    grid = np.linspace(lo, hi, grid_points)
    t0, _, _ = _start(model, spec, lam)
    inner = grid[(grid > t0) & (grid < hi)]
    t_eval = np.concatenate([inner, [hi]])
    sol = _integrate(model, spec, lam, t_eval=t_eval)
    theta_end = sol.y[0, -1]
    residual = math.sin(theta_end)
    # near an eigenvalue theta(R) is close to a multiple of pi; the first one is pi
    if abs(residual) > threshold or round(theta_end / math.pi) != 1:
        raise NotAnEigenvalueError(
            f"lam={lam!r} is not the first eigenvalue of {model.name} R={spec.radius}: "
            f"endpoint residual {residual:.3e}, endpoint angle {theta_end / math.pi:.6f} pi"
        )
    theta, log_r = sol.y[0, :-1], sol.y[1, :-1]
    # f = r sin(theta) w^{-n/2}
    log_f = log_r + np.log(np.sin(theta)) - 0.5 * n * model.log_w(inner)
    values = dict(zip(inner.tolist(), log_f.tolist()))
    out = []
    ref = None
    if model.is_ball:
        # f(0) in the same normalization: the series start has f(0) = 1 while
        # log_r0 was taken with f(t0) = 1 - lam t0^2 / (2(n+1))
        t0, theta0, log_r0 = _start(model, spec, lam)
        f0 = 1.0 - lam * t0 * t0 / (2.0 * (n + 1))
        ref = log_r0 + math.log(math.sin(theta0)) - 0.5 * n * float(model.log_w(t0)) - math.log(f0)
    logs = []
    for t in grid:
        if t in values:
            logs.append(values[t])
        elif model.is_ball and t <= t0:
            logs.append(ref)
        else:
            logs.append(None)
    top = max(v for v in logs if v is not None)
    for t, lv in zip(grid, logs):
        out.append((float(t), 0.0 if lv is None else math.exp(lv - top)))
    return out


def _half_cell_mass(model: WarpedModel, h: float) -> float:
    """``int_0^{h/2} w^n dt`` for the center cell of a ball mesh."""
    x, w = np.polynomial.legendre.leggauss(12)
    t = 0.25 * h * (x + 1.0)
    return float(0.25 * h * np.sum(w * model.w(t) ** model.fiber_dim))


def _fd_matrix(model: WarpedModel, spec: DomainSpec, mesh_points: int):
    """Diagonal and off-diagonal of the symmetrized finite-volume operator."""
    n = model.fiber_dim
    lo, hi = model.interval(spec)
    h = (hi - lo) / mesh_points
    nodes = lo + h * np.arange(mesh_points + 1)
    if model.is_ball:
        # unknowns at t_0 = 0 .. t_{N-1}; natural condition at the center
        free = nodes[:-1]
        log_mass = np.empty(len(free))
        log_mass[1:] = math.log(h) + n * model.log_w(free[1:])
        log_mass[0] = math.log(_half_cell_mass(model, h))
        half = free + 0.5 * h
        log_flux_right = n * model.log_w(half)
        diag = np.exp(log_flux_right - math.log(h) - log_mass)
        diag[1:] += np.exp(log_flux_right[:-1] - math.log(h) - log_mass[1:])
        off = -np.exp(
            log_flux_right[:-1] - math.log(h) - 0.5 * (log_mass[:-1] + log_mass[1:])
        )
    else:
        free = nodes[1:-1]
        log_mass = math.log(h) + n * model.log_w(free)
        log_flux = n * model.log_w(nodes[:-1] + 0.5 * h)
        diag = np.exp(log_flux[:-1] - math.log(h) - log_mass) + np.exp(
            log_flux[1:] - math.log(h) - log_mass
        )
        off = -np.exp(
            log_flux[1:-1] - math.log(h) - 0.5 * (log_mass[:-1] + log_mass[1:])
        )
    return diag, off


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    tiny = np.finfo(float).tiny
    off2 = off * off
    for i in range(1, len(diag)):
        if d == 0.0:
            d = tiny
        d = diag[i] - x - off2[i - 1] / d
        if d < 0:
            count += 1
    return count


def fd_oracle(model: WarpedModel, spec: DomainSpec, mesh_points: int = 20000) -> float:
    """Smallest eigenvalue of the second-order finite-volume discretization."""
    if mesh_points < 100:
        raise MeshError("mesh_points must be >= 100")
    diag, off = _fd_matrix(model, spec, int(mesh_points))
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))) or np.any(diag <= 0):
        raise MeshError(
            f"{model.name} R={spec.radius}: mesh of {mesh_points} cells gives a degenerate "
            "operator (non-finite or non-positive pivots)"
        )
    lam = eigvalsh_tridiagonal(
        diag, off, select="i", select_range=(0, 0), lapack_driver="stebz"
    )[0]
    if not math.isfinite(lam) or lam <= 0:
        raise MeshError(f"mesh too coarse: smallest discrete eigenvalue {lam!r}")
    return float(lam)
