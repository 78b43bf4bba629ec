"""Command-line front end.

Subcommands ``eigen``, ``sweep``, ``verify`` and ``fit``; every subcommand
writes CSV or JSON to standard output or ``--out``.  Exit codes: 0 success,
1 failed check or verdict, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from . import __version__
from .asymptotics import FitError, scaled_residuals, two_term_report
from .checks import CHECKS, run_checks
from .lee_bound import BoundNotCertifiedError, ball_lower_bound
from .models import DomainError, DomainSpec, ModelError, Warping, WarpedModel
from .radial_solver import EigenvalueError, fd_oracle, first_eigenvalue
from .rayleigh import paper_upper_bound

OUTPUT_DIR_ENV = "AHESPEC_OUTPUT_DIR"

EIGEN_COLUMNS = ("model", "n", "R", "lambda", "lambda_low", "lambda_high", "oracle_lambda")
SWEEP_COLUMNS = (
    "model",
    "n",
    "R",
    "lambda",
    "lambda_low",
    "lambda_high",
    "lower_bound",
    "upper_bound",
    "scaled_residual",
    "status",
)
FIT_COLUMNS = (
    "model",
    "n",
    "radii",
    "c0",
    "c2",
    "c3",
    "residual_norm",
    "condition_estimate",
    "sample_count",
    "target_c0",
    "target_c2",
    "c0_pass",
    "c2_pass",
    "scaled_residuals",
    "max_scaled_residual",
    "passed",
)
VERIFY_COLUMNS = ("name", "measured", "threshold", "passed", "detail")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: str | None = None
    n: int | None = None
    radii: tuple[float, ...] = ()
    tol: float = 1e-10
    format: str = "csv"
    out: str | None = None
    mesh: int = 20000
    jobs: int = 1
    oracle: bool = False
    only: tuple[str, ...] = ()
    epsilon: float | None = None
    metadata: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        d["only"] = list(self.only)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["radii"] = tuple(float(r) for r in d.get("radii", ()))
        d["only"] = tuple(d.get("only", ()))
        return cls(**d)

    def warped_model(self) -> WarpedModel:
        return WarpedModel.from_name(self.model, self.n)


# ---------------------------------------------------------------- formatting


def _num(x):
    """Shortest round-trip representation; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(rows: list[dict], columns, fmt: str, single: bool = False) -> str:
    if fmt == "json":
        payload = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(payload[0] if single else payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        cells = []
        for c in columns:
            v = r.get(c)
            if isinstance(v, (list, tuple)):
                v = ";".join(_num(x) for x in v)
            cells.append(_num(v))
        writer.writerow(cells)
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = cfg.out
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- commands


def cmd_eigen(cfg: RunConfig) -> int:
    model = cfg.warped_model()
    R = cfg.radii[0]
    spec = DomainSpec(R)
    est = first_eigenvalue(model, spec, cfg.tol)
    oracle = fd_oracle(model, spec, cfg.mesh) if cfg.oracle else None
    row = {
        "model": model.name,
        "n": model.fiber_dim,
        "R": R,
        "lambda": est.lam,
        "lambda_low": est.lambda_low,
        "lambda_high": est.lambda_high,
        "oracle_lambda": oracle,
    }
    _emit(render([row], EIGEN_COLUMNS, cfg.format, single=True), cfg)
    return EXIT_OK


def sweep_row(model: WarpedModel, R: float, tol: float) -> dict:
    row = {c: None for c in SWEEP_COLUMNS}
    row.update(model=model.name, n=model.fiber_dim, R=R)
    try:
        est = first_eigenvalue(model, DomainSpec(R), tol)
    except (EigenvalueError, DomainError) as exc:
        row["status"] = f"failed: {exc}"
        return row
    row.update(lambda_low=est.lambda_low, lambda_high=est.lambda_high)
    row["lambda"] = est.lam
    row["scaled_residual"] = scaled_residuals(model, [(R, est.lam)])[0]
    if model.warping is Warping.SINH and model.fiber_dim >= 1:
        try:
            row["lower_bound"] = ball_lower_bound(model.fiber_dim, R)
        except (BoundNotCertifiedError, ValueError):
            pass
        if R >= 1:
            row["upper_bound"] = paper_upper_bound(model.fiber_dim, R).quotient_FG
    row["status"] = "ok"
    return row


def _sweep_job(args):
    model, R, tol = args
    return sweep_row(model, R, tol)


def _map(fn, jobs, n_workers: int):
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_sweep(cfg: RunConfig) -> int:
    model = cfg.warped_model()
    radii = sorted(cfg.radii)
    rows = _map(_sweep_job, [(model, R, cfg.tol) for R in radii], cfg.jobs)
    _emit(render(rows, SWEEP_COLUMNS, cfg.format), cfg)
    return EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    results = run_checks(cfg.only, cfg.epsilon)
    rows = [r.to_dict() for r in results]
    if cfg.format == "json":
        payload = {
            "checks": [{c: _json_value(r[c]) for c in VERIFY_COLUMNS} for r in rows],
            "passed": all(r.passed for r in results),
        }
        _emit(json.dumps(payload, indent=2) + "\n", cfg)
    else:
        _emit(render(rows, VERIFY_COLUMNS, "csv"), cfg)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"check failed: {r.name}: measured {r.measured!r} vs threshold {r.threshold!r} ({r.detail})", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_fit(cfg: RunConfig) -> int:
    model = cfg.warped_model()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rep = two_term_report(model, cfg.radii, cfg.tol, executor=pool)
    else:
        rep = two_term_report(model, cfg.radii, cfg.tol)
    row = {
        "model": rep.model,
        "n": rep.n,
        "radii": [s[0] for s in rep.samples],
        "c0": rep.fit.c0,
        "c2": rep.fit.c2,
        "c3": rep.fit.c3,
        "residual_norm": rep.fit.residual_norm,
        "condition_estimate": rep.fit.condition_estimate,
        "sample_count": rep.fit.sample_count,
        "target_c0": rep.target_c0,
        "target_c2": rep.target_c2,
        "c0_pass": rep.c0_pass,
        "c2_pass": rep.c2_pass,
        "scaled_residuals": list(rep.scaled_residuals),
        "max_scaled_residual": rep.max_scaled_residual,
        "passed": rep.passed,
    }
    _emit(render([row], FIT_COLUMNS, cfg.format, single=True), cfg)
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"eigen": cmd_eigen, "sweep": cmd_sweep, "verify": cmd_verify, "fit": cmd_fit}


# ---------------------------------------------------------------- parsing


def _radius_list(text: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise argparse.ArgumentTypeError("empty radius list")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid radius list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ahespec",
        description="First Dirichlet eigenvalues of balls and bands in warped-product models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="PATH", help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV} if set)")
    common.add_argument("--tol", type=float, default=1e-10, help="eigenvalue bracket width (default 1e-10)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for radius sweeps")
    common.add_argument("--metadata", action="store_true", help="write a run-metadata JSON line to stderr")

    model_args = argparse.ArgumentParser(add_help=False)
    model_args.add_argument("--model", required=True, help="sinh-ball, linear-ball, exp-band or cosh-band")
    model_args.add_argument("--n", type=int, required=True, help="fiber dimension")

    p = sub.add_parser("eigen", parents=[common, model_args], help="first eigenvalue at one radius")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="also run the finite-difference oracle")
    p.add_argument("--mesh", type=int, default=20000, help="oracle mesh cells")

    p = sub.add_parser("sweep", parents=[common, model_args], help="eigenvalues and bounds over radii")
    p.add_argument("--radii", type=_radius_list, required=True, help="comma- or space-separated radii")

    p = sub.add_parser("verify", parents=[common], help="run the named numerical checks")
    p.add_argument("--only", action="append", choices=sorted(CHECKS), default=[])
    p.add_argument("--epsilon", type=float, help="epsilon for the pointwise lower-bound check")

    p = sub.add_parser("fit", parents=[common, model_args], help="fit c0 + c2/R^2 + c3/R^3 over radii")
    p.add_argument("--radii", type=_radius_list, required=True)
    return parser


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    radii = ()
    if getattr(ns, "radius", None) is not None:
        radii = (ns.radius,)
    elif getattr(ns, "radii", None) is not None:
        radii = tuple(ns.radii)
    cfg = RunConfig(
        subcommand=ns.subcommand,
        model=getattr(ns, "model", None),
        n=getattr(ns, "n", None),
        radii=radii,
        tol=ns.tol,
        format=ns.format,
        out=ns.out,
        mesh=getattr(ns, "mesh", 20000),
        jobs=ns.jobs,
        oracle=getattr(ns, "oracle", False),
        only=tuple(getattr(ns, "only", ()) or ()),
        epsilon=getattr(ns, "epsilon", None),
        metadata=ns.metadata,
    )
    try:
        validate(cfg)
    except (UsageError, ModelError, DomainError) as exc:
        parser.error(str(exc))
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.model is not None:
        cfg.warped_model()
    for R in cfg.radii:
        DomainSpec(R)
    if not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if cfg.subcommand == "eigen" and cfg.mesh < 100:
        raise UsageError("--mesh must be >= 100")
    if cfg.subcommand == "sweep" and len(cfg.radii) < 2:
        raise UsageError("sweep needs at least 2 radii")
    if cfg.subcommand == "fit":
        if len(cfg.radii) < 5:
            raise UsageError("fit needs at least 5 radii")
        if len(set(cfg.radii)) != len(cfg.radii):
            raise UsageError("fit radii must be distinct")
        if max(cfg.radii) < 2 * min(cfg.radii):
            raise UsageError("fit radii must span at least a factor of 2")
    if cfg.epsilon is not None and not 0 < cfg.epsilon < 1:
        raise UsageError("--epsilon must lie in (0, 1)")


def main(argv=None) -> int:
    cfg = parse_config(argv)
    started = time.time()
    try:
        code = COMMANDS[cfg.subcommand](cfg)
    except (EigenvalueError, FitError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_FAIL
    if cfg.metadata:
        meta = {
            "version": __version__,
            "config": cfg.to_dict(),
            "started": started,
            "elapsed_s": time.time() - started,
            "exit_code": code,
        }
        print(json.dumps(meta), file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
