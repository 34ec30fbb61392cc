"""
Command-line entry point.

Subcommands: equilibria, spectrum, series-check, stability-map,
critical-mass, integrate, serve. Data goes to --out or stdout, log records
to stderr. Exit codes come from the exception hierarchy (0 success,
2 validation, 3 convergence, 4 bracketing, 5 close approach).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from app.core.config import settings
from app.core.exceptions import CloseApproachError, LibrationError, ParameterError
from app.rtbp.dynamics import PhaseState
from app.rtbp.equilibria import refine_equilibrium, triangular_closed_form
from app.rtbp.integrator import integrate
from app.rtbp.normalization import stability_verdict
from app.rtbp.params import SystemParams, make_params
from app.rtbp.series import series_audit
from app.rtbp.sweep import critical_mass, run_sweep
from app.schemas.equilibrium import Branch
from app.schemas.sweep import GridSpec, parse_axis
from app.utils.logging import setup_logging

logger = logging.getLogger(__name__)

COMMANDS = (
    "equilibria",
    "spectrum",
    "series-check",
    "stability-map",
    "critical-mass",
    "integrate",
    "serve",
)


class RunConfig(BaseModel):
    """Validated run configuration: config-file values overridden by flags."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal[COMMANDS]  # type: ignore[valid-type]
    mu: Optional[float] = None
    q1: float = 1.0
    a2: float = 0.0
    w1: Optional[float] = None
    cd: Optional[float] = None
    branch: Literal["l4", "l5"] = "l4"
    grid: List[str] = []
    out: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None
    tol: Optional[float] = None
    t_end: float = 100.0
    workers: Optional[int] = None
    state: Optional[Tuple[float, float, float, float]] = None
    offset: float = 0.0
    stride: Optional[float] = None
    bracket: Tuple[float, float] = (1e-5, 0.5)
    log_level: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000

    @field_validator("branch", mode="before")
    @classmethod
    def _lower(cls, value: Any) -> Any:
        return value.lower() if isinstance(value, str) else value

    @property
    def branch_enum(self) -> Branch:
        return Branch(self.branch.upper())

    def params(self) -> SystemParams:
        if self.mu is None:
            raise ParameterError("mu out of range: --mu is required")
        return make_params(self.mu, q1=self.q1, a2=self.a2, w1=self.w1, cd=self.cd)


def _floats(count: int) -> Callable[[str], Tuple[float, ...]]:
    def parse(text: str) -> Tuple[float, ...]:
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--mu", type=float, help="mass ratio of the oblate primary")
    common.add_argument("--q1", type=float, help="radiation factor of the bigger primary")
    common.add_argument("--a2", type=float, help="oblateness coefficient")
    common.add_argument("--w1", type=float, help="Poynting-Robertson drag parameter")
    common.add_argument("--cd", type=float, help="dimensionless light speed (W1 from q1)")
    common.add_argument("--branch", choices=["l4", "l5", "L4", "L5"])
    common.add_argument("--grid", action="append", help="axis=min:max:count, repeatable")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--tol", type=float)
    common.add_argument("--t-end", dest="t_end", type=float)
    common.add_argument("--workers", type=int)
    common.add_argument("--state", type=_floats(4), help="x,y,vx,vy")
    common.add_argument("--offset", type=float, help="x offset from the equilibrium")
    common.add_argument("--stride", type=float, help="sample spacing in time")
    common.add_argument("--bracket", type=_floats(2), help="lo,hi")
    common.add_argument("--log-level", dest="log_level")
    common.add_argument("--host")
    common.add_argument("--port", type=int)

    parser = argparse.ArgumentParser(
        prog="libration",
        description=settings.DESCRIPTION,
        allow_abbrev=False,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], allow_abbrev=False)
    return parser


def load_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse flags, merge them over the optional JSON config file and validate."""
    namespace = vars(build_parser().parse_args(argv))
    values: Dict[str, Any] = {}
    config_path = namespace.pop("config", None)
    if config_path is not None:
        try:
            values.update(json.loads(Path(config_path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"config out of range: cannot read {config_path}: {exc}") from exc
        values.pop("command", None)
    values.update(namespace)
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = error["loc"][0] if error["loc"] else "config"
        raise ParameterError(f"{field} out of range: {error['msg']}") from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logger.info(f"wrote {out}")


def _frame_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(float_format="%.17g", lineterminator="\n", index=False)


def cmd_equilibria(cfg: RunConfig) -> None:
    params = cfg.params()
    closed = triangular_closed_form(params, cfg.branch_enum)
    refined = refine_equilibrium(params, closed)
    difference = (refined.x_star - closed.x_star, refined.y_star - closed.y_star)
    if cfg.format == "csv":
        frame = pd.DataFrame([p.model_dump(mode="json") for p in (closed, refined)])
        _emit(_frame_text(frame), cfg.out)
        return
    payload = {
        "params": params.as_dict(),
        "closed_form": closed.model_dump(mode="json"),
        "refined": refined.model_dump(mode="json"),
        "difference": list(difference),
    }
    _emit(json.dumps(payload, indent=2), cfg.out)


def cmd_spectrum(cfg: RunConfig) -> None:
    report = stability_verdict(cfg.params(), cfg.branch_enum)
    _emit(report.to_json(), cfg.out)


def cmd_series_check(cfg: RunConfig) -> None:
    params = cfg.params()
    point = refine_equilibrium(params, triangular_closed_form(params, cfg.branch_enum))
    audit = series_audit(params, point)
    if audit.mismatch_count:
        logger.info(f"series audit recorded {audit.mismatch_count} mismatches")
    _emit(audit.to_json(), cfg.out)


def _grid_spec(cfg: RunConfig) -> GridSpec:
    if not cfg.grid:
        raise ParameterError("grid out of range: at least one --grid axis is required")
    axes = [parse_axis(text) for text in cfg.grid]
    fixed: Dict[str, float] = {"q1": cfg.q1, "a2": cfg.a2, "w1": cfg.w1 or 0.0}
    if cfg.mu is not None:
        fixed["mu"] = cfg.mu
        if cfg.cd is not None:
            fixed["w1"] = cfg.params().w1
    try:
        return GridSpec(axes=axes, fixed=fixed)
    except ValidationError as exc:
        raise ParameterError(f"grid out of range: {exc.errors()[0]['msg']}") from exc


def cmd_stability_map(cfg: RunConfig) -> None:
    result = run_sweep(_grid_spec(cfg), workers=cfg.workers)
    if cfg.format == "json":
        _emit(result.model_dump_json(indent=2), cfg.out)
    else:
        _emit(result.to_csv(), cfg.out)


def cmd_critical_mass(cfg: RunConfig) -> None:
    if cfg.cd is not None:
        raise ParameterError("cd out of range: critical-mass needs w1 directly")
    w1 = cfg.w1 or 0.0
    found = critical_mass(cfg.q1, cfg.a2, w1, bracket=cfg.bracket, tol=cfg.tol)
    logger.info(f"mu_c = {found.mu_c:.17g}")
    payload = {
        "q1": cfg.q1,
        "a2": cfg.a2,
        "w1": w1,
        "mu_c": found.mu_c,
        "iterations": found.iterations,
        "bracket": list(found.bracket),
    }
    _emit(json.dumps(payload, indent=2), cfg.out)


def cmd_integrate(cfg: RunConfig) -> None:
    params = cfg.params()
    if cfg.state is not None:
        initial = PhaseState(*cfg.state)
    else:
        point = refine_equilibrium(params, triangular_closed_form(params, cfg.branch_enum))
        initial = PhaseState(point.x_star + cfg.offset, point.y_star, 0.0, 0.0)
    try:
        trajectory = integrate(params, initial, cfg.t_end, tol=cfg.tol, stride=cfg.stride)
    except CloseApproachError as exc:
        if exc.trajectory is not None:
            _emit(exc.trajectory.to_csv(), cfg.out)
        raise
    if cfg.format == "json":
        _emit(trajectory.to_frame().to_json(orient="records", double_precision=15), cfg.out)
    else:
        _emit(trajectory.to_csv(), cfg.out)


def cmd_serve(cfg: RunConfig) -> None:
    import uvicorn

    uvicorn.run("app.main:app", host=cfg.host, port=cfg.port, log_level=(cfg.log_level or "info").lower())


HANDLERS: Dict[str, Callable[[RunConfig], None]] = {
    "equilibria": cmd_equilibria,
    "spectrum": cmd_spectrum,
    "series-check": cmd_series_check,
    "stability-map": cmd_stability_map,
    "critical-mass": cmd_critical_mass,
    "integrate": cmd_integrate,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = load_config(argv)
    except LibrationError as exc:
        setup_logging()
        logger.error(str(exc))
        return exc.exit_code

    setup_logging(level=cfg.log_level)
    try:
        HANDLERS[cfg.command](cfg)
    except LibrationError as exc:
        logger.error(f"{cfg.command} failed: {exc}")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
