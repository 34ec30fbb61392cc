"""
Stability maps over parameter grids and the critical mass ratio.
"""

import logging
import multiprocessing as mp
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import BracketError, LibrationError, ParameterError
from app.rtbp.normalization import stability_verdict
from app.rtbp.params import make_params
from app.schemas.stability import Verdict
from app.schemas.sweep import GridSpec, SweepResult, SweepRow

logger = logging.getLogger(__name__)


def evaluate_cell(cell: Dict[str, float]) -> SweepRow:
    """One grid cell; failures are reported in the row."""
    try:
        params = make_params(cell["mu"], q1=cell["q1"], a2=cell["a2"], w1=cell["w1"])
        report = stability_verdict(params)
    except (LibrationError, np.linalg.LinAlgError) as exc:
        logger.warning(f"sweep cell {cell} failed: {exc}")
        return SweepRow(**cell, verdict="error", error=str(exc))
    return SweepRow(
        **cell,
        verdict=report.verdict.value,
        D=report.discriminant_D,
        omega1=report.omega1,
        omega2=report.omega2,
        n_resonances=len(report.resonances),
    )


def run_sweep(grid: GridSpec, workers: Optional[int] = None) -> SweepResult:
    """Evaluate every cell; rows come back in grid order whatever the worker count."""
    workers = settings.SWEEP_WORKERS if workers is None else workers
    cells = list(grid.cells())
    logger.info(f"sweeping {len(cells)} cells")
    if workers == 1 or len(cells) == 1:
        rows = [evaluate_cell(cell) for cell in cells]
    else:
        with mp.Pool(workers) as pool:
            rows = pool.map(evaluate_cell, cells)
    return SweepResult(grid=grid, rows=rows)


@dataclass(frozen=True)
class CriticalMass:
    mu_c: float
    iterations: int
    bracket: Tuple[float, float]


def _is_stable(mu: float, q1: float, a2: float, w1: float) -> bool:
    params = make_params(mu, q1=q1, a2=a2, w1=w1)
    return stability_verdict(params).verdict is Verdict.STABLE


def critical_mass(
    q1: float = 1.0,
    a2: float = 0.0,
    w1: float = 0.0,
    bracket: Tuple[float, float] = (1e-5, 0.5),
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> CriticalMass:
    """Bisect the mass ratio at which the verdict leaves `stable`."""
    tol = settings.CRITICAL_MASS_TOL if tol is None else tol
    max_iter = settings.CRITICAL_MASS_MAX_ITER if max_iter is None else max_iter
    lo, hi = map(float, bracket)
    if not 0.0 < lo < hi <= 0.5:
        raise ParameterError(f"bracket out of range: need 0 < lo < hi <= 0.5, got {bracket}")

    stable_lo = _is_stable(lo, q1, a2, w1)
    if stable_lo == _is_stable(hi, q1, a2, w1):
        raise BracketError("no transition in bracket")

    iterations = 0
    while hi - lo >= tol and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if _is_stable(mid, q1, a2, w1) == stable_lo:
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug(f"bisection {iterations}: [{lo:.12g}, {hi:.12g}]")

    mu_c = 0.5 * (lo + hi)
    logger.info(f"critical mass {mu_c:.12g} after {iterations} bisections")
    return CriticalMass(mu_c=mu_c, iterations=iterations, bracket=(lo, hi))
