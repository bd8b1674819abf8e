"""Command-line front end.

Every command writes ``<out>/<command>.json`` with the shape::

    {"schema_version": 1, "command": ..., "model": {...},
     "checks": [{"name", "status", "residual", "details"}, ...],
     "details": {...}, "elapsed_ms": ...}

Numeric commands also write the final grid state as CSV plus a JSON header.
Exit status is 0 when every check passes, 1 when a check fails, and 2 when
the configuration or an expression is rejected (no report is written then).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence

from .errors import KvnError
from .model import PhaseSpaceModel
from .parser import parse, pretty, to_poly, to_superspace
from .poly import Poly
from .report import Report

SCHEMA_VERSION = 1
HO_SOURCE = "1/2*q_1^2 + 1/2*p_1^2"

COMMANDS = (
    "verify-algebra",
    "superfield-expand",
    "action-check",
    "check-symmetries",
    "picture-change",
    "propagate",
    "kernel-check",
    "interference",
)


class ConfigError(KvnError):
    """Run configuration rejected before any computation."""


@dataclass
class GridConfig:
    q_min: float = -8.0
    q_max: float = 8.0
    p_min: float = -8.0
    p_max: float = 8.0
    n_q: int = 256
    n_p: int = 256


@dataclass
class RunConfig:
    dof: int = 1
    hamiltonian: str = HO_SOURCE
    grid: GridConfig = field(default_factory=GridConfig)
    t_final: float = 2 * math.pi
    dt: float = 2 * math.pi / 256
    order: int = 5
    center: list[float] = field(default_factory=lambda: [2.0, 0.0])
    center1: list[float] | None = None
    sigma: float = 0.5
    phase: list[float] = field(default_factory=lambda: [0.0, 0.0])
    observables: list[str] = field(default_factory=list)
    superfield_observables: bool = False
    norm_tolerance: float = 1e-6
    error_tolerance: float = 1e-3
    out: str = "."

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


_FLOAT_KEYS = {"t_final", "dt", "sigma", "norm_tolerance", "error_tolerance"}
_PAIR_KEYS = {"center", "center1", "phase"}


def _type_error(key: str, want: str, got: Any) -> ConfigError:
    return ConfigError(f"config key {key!r}: expected {want}, got {got!r}")


def _number(key: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _type_error(key, "a finite number", v)
    return float(v)


def _integer(key: str, v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise _type_error(key, "an integer", v)
    return v


def load_config(data: dict[str, Any]) -> RunConfig:
    """Validate a decoded JSON config; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    for key, v in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key == "grid":
            if not isinstance(v, dict):
                raise _type_error(key, "an object", v)
            g = GridConfig()
            gknown = {f.name for f in fields(GridConfig)}
            for gk, gv in v.items():
                if gk not in gknown:
                    raise ConfigError(f"unknown config key 'grid.{gk}'")
                conv = _integer if gk in ("n_q", "n_p") else _number
                setattr(g, gk, conv(f"grid.{gk}", gv))
            cfg.grid = g
        elif key in ("dof", "order"):
            setattr(cfg, key, _integer(key, v))
        elif key in _FLOAT_KEYS:
            setattr(cfg, key, _number(key, v))
        elif key in _PAIR_KEYS:
            if v is None and key == "center1":
                cfg.center1 = None
                continue
            if not isinstance(v, list) or len(v) != 2:
                raise _type_error(key, "a pair of numbers", v)
            setattr(cfg, key, [_number(key, x) for x in v])
        elif key == "observables":
            if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
                raise _type_error(key, "a list of strings", v)
            cfg.observables = list(v)
        elif key == "superfield_observables":
            if not isinstance(v, bool):
                raise _type_error(key, "a boolean", v)
            cfg.superfield_observables = v
        else:  # hamiltonian, out
            if not isinstance(v, str):
                raise _type_error(key, "a string", v)
            setattr(cfg, key, v)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.dof < 1:
        raise ConfigError(f"dof must be at least 1, got {cfg.dof}")
    if cfg.order not in (1, 3, 5):
        raise ConfigError(f"order must be 1, 3 or 5, got {cfg.order}")
    if cfg.dt <= 0:
        raise ConfigError(f"dt must be positive, got {cfg.dt}")
    if cfg.t_final < 0:
        raise ConfigError(f"t_final must be nonnegative, got {cfg.t_final}")
    if cfg.sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {cfg.sigma}")


# ---------------------------------------------------------------------------
# commands


def _model(cfg: RunConfig) -> PhaseSpaceModel:
    H = to_poly(parse(cfg.hamiltonian, cfg.dof), cfg.dof)
    return PhaseSpaceModel(cfg.dof, H)


def _grid(cfg: RunConfig):
    from .propagator import PhaseSpaceGrid

    return PhaseSpaceGrid(**asdict(cfg.grid))


def cmd_verify_algebra(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .superops import verify_charge_algebra

    return verify_charge_algebra(model)


def cmd_superfield_expand(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .superfield import THETA_SECTORS, build_superfield, check_berezin_identity, evaluate_on_superfield, superfield_eom

    Phi = build_superfield(model)
    HPhi = evaluate_on_superfield(model.H, Phi)
    report = Report()
    report.extend(check_berezin_identity(model))
    report.extend(superfield_eom(model))
    report.details = {
        "superfield": [str(x) for x in Phi.components],
        "H(Phi)": {s or "1": str(HPhi.theta_component(s)) for s in THETA_SECTORS},
    }
    return report


def cmd_action_check(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .superfield import check_action_identity

    report = Report()
    report.extend(check_action_identity(model, kinetic=True), "with kinetic term: ")
    report.extend(check_action_identity(model, kinetic=False), "potential only: ")
    return report


def cmd_check_symmetries(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .superfield import build_superfield, evaluate_on_superfield
    from .superspace import Fields
    from .symmetries import check_generators, check_local_symmetries, classify_observable

    if not cfg.observables:
        report = Report()
        report.extend(check_local_symmetries(model))
        report.extend(check_generators(model))
        return report
    report = Report()
    fields_ = Fields(cfg.dof)
    verdicts = {}
    for src in cfg.observables:
        ast = parse(src, cfg.dof)
        if cfg.superfield_observables:
            expr = evaluate_on_superfield(to_poly(ast, cfg.dof), build_superfield(model, fields_))
        else:
            expr = to_superspace(ast, cfg.dof, fields_)
        v = classify_observable(expr, model)
        label = pretty(ast)
        verdicts[label] = str(v)
        name = f"observable {label}: " + ("ACCEPTED" if v.accepted else f"REJECTED by {v.failing}")
        report.add(
            name,
            v.accepted,
            "0" if v.accepted else str(v.residual),
            {"verdict": "ACCEPTED" if v.accepted else "REJECTED", "failing": v.failing, "reduced": str(v.reduced)},
        )
    report.details = {"verdicts": verdicts}
    return report


def cmd_picture_change(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .symmetries import check_generators, check_picture_change

    sources = cfg.observables or [f"q_{k}" for k in range(1, cfg.dof + 1)] + [
        f"p_{k}" for k in range(1, cfg.dof + 1)
    ] + ["q_1^2", cfg.hamiltonian]
    report = Report()
    for src in sources:
        G = to_poly(parse(src, cfg.dof), cfg.dof)
        report.extend(check_picture_change(G, model, pretty(parse(src, cfg.dof))))
    report.extend(check_generators(model))
    return report


def _export(state, out: Path, stem: str) -> dict[str, str]:
    from .propagator import write_csv, write_header

    csv_path = out / f"{stem}.csv"
    header_path = out / f"{stem}.header.json"
    write_csv(state, csv_path)
    write_header(state, header_path)
    return {"csv": csv_path.name, "header": header_path.name}


def cmd_propagate(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .propagator import exact_gaussian, gaussian_state, propagate, relative_l2_error

    grid = _grid(cfg)
    psi0 = gaussian_state(grid, tuple(cfg.center), cfg.sigma, tuple(cfg.phase))
    psi = propagate(psi0, model, cfg.t_final, cfg.dt, cfg.order)
    report = Report(details=dict(psi.meta))
    drift = psi.meta["norm_drift"]
    report.add(f"norm drift < {cfg.norm_tolerance:g}", drift < cfg.norm_tolerance, drift)
    ref = exact_gaussian(model, grid, tuple(cfg.center), cfg.sigma, cfg.t_final, tuple(cfg.phase))
    if ref is not None:
        err = relative_l2_error(psi, ref)
        report.add(f"L2 error vs exact characteristics < {cfg.error_tolerance:g}", err < cfg.error_tolerance, err)
    report.details["files"] = _export(psi, out, "propagate")
    return report


def cmd_kernel_check(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .propagator import kernel_delta_check

    return kernel_delta_check(model, _grid(cfg), tuple(cfg.center), cfg.sigma, cfg.t_final, cfg.dt, cfg.order)


def cmd_interference(cfg: RunConfig, model: PhaseSpaceModel, out: Path) -> Report:
    from .propagator import default_observables, superposition_demo

    if cfg.center1 is None:
        raise ConfigError("interference needs 'center1'")
    if cfg.observables:
        obs: dict[str, Poly] = {}
        for src in cfg.observables:
            ast = parse(src, cfg.dof)
            obs[pretty(ast)] = to_poly(ast, cfg.dof)
    else:
        obs = default_observables(model)
    return superposition_demo(model, _grid(cfg), tuple(cfg.center), tuple(cfg.center1), cfg.sigma, obs, cfg.order)


HANDLERS: dict[str, Callable[[RunConfig, PhaseSpaceModel, Path], Report]] = {
    "verify-algebra": cmd_verify_algebra,
    "superfield-expand": cmd_superfield_expand,
    "action-check": cmd_action_check,
    "check-symmetries": cmd_check_symmetries,
    "picture-change": cmd_picture_change,
    "propagate": cmd_propagate,
    "kernel-check": cmd_kernel_check,
    "interference": cmd_interference,
}


def run(command: str, cfg: RunConfig) -> tuple[int, dict[str, Any]]:
    """Execute one command; returns (exit status, report dict) and writes
    the report under ``cfg.out``."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    validate(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    model = _model(cfg)
    report = HANDLERS[command](cfg, model, out)
    elapsed = (time.perf_counter() - start) * 1000.0
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": model.to_dict(),
        "checks": [c.to_dict() for c in report.checks],
        "details": report.details,
        "elapsed_ms": round(elapsed, 3),
    }
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    (out / f"{command}.json").write_text(text)
    return (0 if report.passed else 1), json.loads(text)


def _json_default(x: Any) -> Any:
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return str(x)


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kvnlab", description="KvN superspace checks and phase-space simulations.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run config")
        p.add_argument("--out", help="output directory")
        p.add_argument("--dof", type=int)
        p.add_argument("--hamiltonian")
        p.add_argument("--observable", action="append", dest="observables", help="repeatable")
        if name == "check-symmetries":
            p.add_argument("--superfield", action="store_true", help="evaluate observables on the superfield")
        if name in ("propagate", "kernel-check", "interference"):
            p.add_argument("--t-final", type=float)
            p.add_argument("--dt", type=float)
            p.add_argument("--sigma", type=float)
            p.add_argument("--order", type=int)
            p.add_argument("--center", type=float, nargs=2)
            p.add_argument("--center1", type=float, nargs=2)
            p.add_argument("--n", type=int, help="grid points per axis")
            p.add_argument("--half-width", type=float, help="square grid [-w, w]^2")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    over = {
        "out": args.out,
        "dof": args.dof,
        "hamiltonian": args.hamiltonian,
        "observables": args.observables,
        "t_final": getattr(args, "t_final", None),
        "dt": getattr(args, "dt", None),
        "sigma": getattr(args, "sigma", None),
        "order": getattr(args, "order", None),
        "center": getattr(args, "center", None),
        "center1": getattr(args, "center1", None),
    }
    if getattr(args, "superfield", False):
        over["superfield_observables"] = True
    data.update({k: v for k, v in over.items() if v is not None})
    n = getattr(args, "n", None)
    w = getattr(args, "half_width", None)
    if n is not None or w is not None:
        grid = dict(data.get("grid", {})) if isinstance(data.get("grid", {}), dict) else {}
        if n is not None:
            grid.update(n_q=n, n_p=n)
        if w is not None:
            grid.update(q_min=-w, q_max=w, p_min=-w, p_max=w)
        data["grid"] = grid
    return load_config(data)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        status, doc = run(args.command, cfg)
    except KvnError as exc:
        print(f"kvnlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    passed = sum(c["status"] == "pass" for c in doc["checks"])
    print(f"{args.command}: {passed}/{len(doc['checks'])} checks passed -> {Path(cfg.out) / (args.command + '.json')}")
    for c in doc["checks"]:
        if c["status"] == "fail":
            print(f"  FAIL {c['name']}: {c['residual']}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
