"""Command-line entry point.

Exit status: 0 success, 1 error (one-line diagnostic on stderr), 2 the
stability criterion is not satisfied (result inconclusive).  Set
``FHALANAY_LOG`` to a logging level name (e.g. ``INFO``) for progress logs.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .config import HalanaySimInput, load_any_system, load_halanay, load_neutral, load_system
from .errors import ConfigError, HalanayError, InfeasibleError, MeshError
from .halanay import build_envelope, char_fn, check_feasibility, lambda0
from .linear import StabilityReport, analyze
from .mittag_leffler import MLQuery
from .neutral import contractivity_analyze, dissipativity_analyze
from .simulate import (
    MeshConfig,
    Trajectory,
    check_envelope,
    simulate_coupled,
    simulate_halanay_comparison,
)

log = logging.getLogger("fhalanay")

LOG_ENV = "FHALANAY_LOG"
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
COMMANDS = ("ml", "halanay", "linsys", "nfde", "simulate")


@dataclass(frozen=True)
class RunConfig:
    """Parsed command line."""

    command: str
    action: str | None = None
    input_path: str | None = None
    tol: float = 1e-10
    dt: float | None = None
    T_end: float | None = None
    auto_mesh: bool = False
    simulate: bool = False
    report_path: str | None = None
    csv_path: str | None = None
    alpha: float | None = None
    beta: float | None = None
    x: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ConfigError(f"--tol must be positive, got {self.tol!r}")
        if self.dt is not None and not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError(f"--dt must be positive, got {self.dt!r}")
        if self.T_end is not None and self.dt is not None and not self.T_end > self.dt:
            raise ConfigError(f"--T must exceed --dt, got T={self.T_end!r}, dt={self.dt!r}")
        if self.input_path is not None and not Path(self.input_path).is_file():
            raise ConfigError(f"{self.input_path}: file not found")


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_report(report: dict) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot write ({exc.strerror})") from None


def _emit(report: dict, cfg: RunConfig) -> None:
    text = dump_report(report)
    if cfg.report_path:
        _write_text(cfg.report_path, text)
    sys.stdout.write(text)


Bound = Callable[[np.ndarray], np.ndarray]


def emit_plotdata(traj: Trajectory, bounds: Sequence[Bound | tuple[str, Bound]], path) -> None:
    """Write ``t``, the states, then the bounds as CSV with 12 significant digits.

    ``bounds`` holds callables of the time array or ``(label, callable)``
    pairs; unlabelled bounds are named ``bound_1, bound_2, ...``.
    """
    t = traj.times
    cols = [t[:, None], traj.samples]
    header = ["t", *traj.labels]
    for i, b in enumerate(bounds, 1):
        label, fn = b if isinstance(b, tuple) else (f"bound_{i}", b)
        vals = np.asarray(fn(t), dtype=float).reshape(-1)
        if vals.shape[0] != t.shape[0]:
            raise ValueError(f"bound {label!r} has {vals.shape[0]} values for {t.shape[0]} times")
        header.append(label)
        cols.append(vals[:, None])
    table = np.hstack(cols)
    lines = [",".join(header)]
    lines.extend(",".join("%.12g" % v for v in row) for row in table)
    _write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------- commands


def _mesh(cfg: RunConfig, delays) -> MeshConfig:
    if cfg.auto_mesh:
        mesh = MeshConfig.auto(cfg.dt, cfg.T_end, delays)
        if mesh.dt != cfg.dt:
            log.info("auto-mesh: dt %r -> %r", cfg.dt, mesh.dt)
    else:
        mesh = MeshConfig(cfg.dt, cfg.T_end)
    try:
        mesh.delay_steps(*delays)
    except MeshError as exc:
        raise MeshError(f"{exc} (or pass --auto-mesh)", exc.suggested_dt) from None
    return mesh


def _cmd_ml(cfg: RunConfig) -> int:
    value = MLQuery(cfg.alpha, cfg.beta, cfg.x).evaluate()
    sys.stdout.write("%.15g\n" % value)
    return EXIT_OK


def _cmd_halanay(cfg: RunConfig) -> int:
    inp = load_halanay(cfg.input_path)
    p = inp.params
    feas = check_feasibility(p)
    report = {
        "params": p.to_dict(),
        "feasible": feas.feasible,
        "margin": feas.margin,
        "margin_exact": str(feas.margin_exact) if feas.margin_exact is not None else None,
        "violations": list(feas.violations),
        "sup_u0": inp.sup_u0,
        "sup_v0": inp.sup_v0,
    }
    if not feas.feasible:
        report["verdict"] = "infeasible"
        _emit(report, cfg)
        return EXIT_INCONCLUSIVE
    env = build_envelope(p, inp.sup_u0, inp.sup_v0, cfg.tol)
    report.update(
        verdict="feasible",
        lambda0=lambda0(p),
        lambda_star=env.lambda_star,
        residual=char_fn(env.params, env.lambda_star),
        envelope=env.to_dict(),
    )
    _emit(report, cfg)
    return EXIT_OK


def _simulation_summary(rep: StabilityReport, x: Trajectory, y: Trajectory, mesh: MeshConfig) -> dict:
    out = {"dt": mesh.dt, "T_end": mesh.T_end, "steps": mesh.steps}
    if rep.feasible:
        for name, traj, bound in (("x", x, rep.x_bound), ("y", y, rep.y_bound)):
            chk = check_envelope(traj.norm_inf(), bound)
            out[f"{name}_envelope"] = {
                "passed": chk.passed,
                "max_ratio": chk.max_ratio,
                "violations": len(chk.violations),
            }
    return out


def _cmd_linsys(cfg: RunConfig) -> int:
    system = load_system(cfg.input_path)
    rep = analyze(system, cfg.tol)
    report = rep.to_dict()
    if cfg.simulate:
        mesh = _mesh(cfg, system.delays)
        log.info("simulating %d steps at dt=%r", mesh.steps, mesh.dt)
        x, y = simulate_coupled(system, mesh)
        report["simulation"] = _simulation_summary(rep, x, y, mesh)
        if cfg.csv_path:
            bounds = [("u_bound", rep.x_bound), ("v_bound", rep.y_bound)] if rep.feasible else []
            emit_plotdata(Trajectory.join(x, y), bounds, cfg.csv_path)
    _emit(report, cfg)
    return EXIT_OK if rep.feasible else EXIT_INCONCLUSIVE


def _cmd_nfde(cfg: RunConfig) -> int:
    inp = load_neutral(cfg.input_path, cfg.action)
    if cfg.action == "contract":
        rep = contractivity_analyze(inp.params, cfg.tol, M1=inp.M)
    else:
        rep = dissipativity_analyze(inp.params, cfg.tol, M2=inp.M)
    _emit(rep.to_dict(), cfg)
    return EXIT_OK if rep.feasible else EXIT_INCONCLUSIVE


def _cmd_simulate(cfg: RunConfig) -> int:
    system = load_any_system(cfg.input_path)
    if isinstance(system, HalanaySimInput):
        p = system.params
        mesh = _mesh(cfg, (p.tau1, p.tau2, p.tau3))
        u, v = simulate_halanay_comparison(p, system.phi, system.psi, mesh)
        traj = Trajectory.join(u, v)
    else:
        mesh = _mesh(cfg, system.delays)
        x, y = simulate_coupled(system, mesh)
        traj = Trajectory.join(x, y)
    emit_plotdata(traj, [], cfg.csv_path)
    _emit({"dt": mesh.dt, "T_end": mesh.T_end, "steps": mesh.steps, "columns": ["t", *traj.labels],
           "csv": str(cfg.csv_path)}, cfg)
    return EXIT_OK


_DISPATCH = {
    "ml": _cmd_ml,
    "halanay": _cmd_halanay,
    "linsys": _cmd_linsys,
    "nfde": _cmd_nfde,
    "simulate": _cmd_simulate,
}


def run(cfg: RunConfig) -> int:
    """Execute a parsed command and return its exit status.

    Library errors propagate; ``main`` turns them into exit status 1.
    """
    return _DISPATCH[cfg.command](cfg)


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fhalanay", description="Fractional Halanay stability toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ml_p = sub.add_parser("ml", help="Mittag-Leffler evaluation")
    ml_sub = ml_p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = ml_sub.add_parser("eval", help="print E_{alpha,beta}(x) with 15 significant digits")
    ev.add_argument("--alpha", type=float, required=True)
    ev.add_argument("--beta", type=float, default=1.0)
    ev.add_argument("--x", type=float, required=True)

    def common(p, input_flag):
        p.add_argument(input_flag, dest="input_path", required=True)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", dest="report_path", help="also write the JSON report here")

    def mesh_flags(p, dt_default=None, T_default=None):
        p.add_argument("--dt", type=float, default=dt_default, required=dt_default is None)
        p.add_argument("--T", dest="T_end", type=float, default=T_default, required=T_default is None)
        p.add_argument("--auto-mesh", action="store_true", help="lower dt to the nearest commensurate step")

    hal = sub.add_parser("halanay", help="coupled Halanay inequality")
    hal_sub = hal.add_subparsers(dest="action", required=True, parser_class=_Parser)
    common(hal_sub.add_parser("solve", help="feasibility, decay rate and envelope"), "--params")

    lin = sub.add_parser("linsys", help="coupled linear fractional delay systems")
    lin_sub = lin.add_subparsers(dest="action", required=True, parser_class=_Parser)
    an = lin_sub.add_parser("analyze", help="stability criterion and envelopes")
    common(an, "--system")
    an.add_argument("--simulate", action="store_true", help="simulate and check the envelopes")
    mesh_flags(an, 0.01, 200.0)
    an.add_argument("--csv", dest="csv_path", help="trajectory CSV (with --simulate)")

    nf = sub.add_parser("nfde", help="neutral fractional delay equations")
    nf_sub = nf.add_subparsers(dest="action", required=True, parser_class=_Parser)
    common(nf_sub.add_parser("contract", help="contractivity analysis"), "--params")
    common(nf_sub.add_parser("dissipate", help="dissipativity analysis"), "--params")

    sim = sub.add_parser("simulate", help="simulate a linear system or a Halanay comparison system")
    sim.add_argument("--system", dest="input_path", required=True)
    mesh_flags(sim)
    sim.add_argument("--out", dest="csv_path", required=True, help="trajectory CSV")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if fields["command"] == "linsys" and not fields.get("simulate"):
        fields.pop("dt", None)
        fields.pop("T_end", None)
    return RunConfig(**fields)


def _setup_logging() -> None:
    level_name = os.environ.get(LOG_ENV, "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except InfeasibleError as exc:
        print(f"fhalanay: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (HalanayError, OverflowError) as exc:
        print(f"fhalanay: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
