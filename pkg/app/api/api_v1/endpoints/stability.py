"""
Stability API endpoints.
"""

import logging
from typing import Any, Dict, Optional

from fastapi import APIRouter, HTTPException, Query

from app.core.exceptions import BracketError, LibrationError
from app.rtbp.equilibria import refine_equilibrium, triangular_closed_form
from app.rtbp.normalization import stability_verdict
from app.rtbp.params import SystemParams, make_params
from app.rtbp.series import series_audit
from app.rtbp.sweep import critical_mass
from app.schemas.equilibrium import Branch
from app.schemas.response import ResponseModel

logger = logging.getLogger(__name__)

router = APIRouter()


def _http_error(action: str, exc: LibrationError) -> HTTPException:
    logger.error(f"{action} error: {exc}")
    status_code = 422 if exc.exit_code == 2 or isinstance(exc, BracketError) else 500
    return HTTPException(status_code=status_code, detail=f"Failed to {action}: {exc}")


def _params(mu: float, q1: float, a2: float, w1: Optional[float], cd: Optional[float]) -> SystemParams:
    return make_params(mu, q1=q1, a2=a2, w1=w1, cd=cd)


@router.get("/equilibria", response_model=ResponseModel[Dict[str, Any]])
def get_equilibria(
    mu: float = Query(..., description="mass ratio of the oblate primary"),
    q1: float = 1.0,
    a2: float = 0.0,
    w1: Optional[float] = None,
    cd: Optional[float] = None,
    branch: Branch = Branch.L4,
) -> Dict[str, Any]:
    """
    Closed-form and Newton-refined triangular point.
    """
    try:
        params = _params(mu, q1, a2, w1, cd)
        closed = triangular_closed_form(params, branch)
        refined = refine_equilibrium(params, closed)
        return ResponseModel(
            success=True,
            message="Equilibrium located successfully",
            params=params.as_dict(),
            data={
                "closed_form": closed.model_dump(mode="json"),
                "refined": refined.model_dump(mode="json"),
            },
        ).model_dump()
    except LibrationError as e:
        raise _http_error("locate equilibrium", e)


@router.get("/spectrum", response_model=ResponseModel[Dict[str, Any]])
def get_spectrum(
    mu: float = Query(...),
    q1: float = 1.0,
    a2: float = 0.0,
    w1: Optional[float] = None,
    cd: Optional[float] = None,
    branch: Branch = Branch.L4,
) -> Dict[str, Any]:
    """
    Stability report of the triangular point.
    """
    try:
        params = _params(mu, q1, a2, w1, cd)
        report = stability_verdict(params, branch)
        return ResponseModel(
            success=True,
            message=f"Equilibrium is {report.verdict.value}",
            params=params.as_dict(),
            data=report.model_dump(mode="json", by_alias=True),
        ).model_dump()
    except LibrationError as e:
        raise _http_error("compute spectrum", e)


@router.get("/series-check", response_model=ResponseModel[Dict[str, Any]])
def get_series_check(
    mu: float = Query(...),
    q1: float = 1.0,
    a2: float = 0.0,
    w1: Optional[float] = None,
    cd: Optional[float] = None,
    branch: Branch = Branch.L4,
) -> Dict[str, Any]:
    """
    Printed expansion audited against the jet expansion.
    """
    try:
        params = _params(mu, q1, a2, w1, cd)
        point = refine_equilibrium(params, triangular_closed_form(params, branch))
        audit = series_audit(params, point)
        return ResponseModel(
            success=True,
            message=f"Series audit recorded {audit.mismatch_count} mismatches",
            params=params.as_dict(),
            data=audit.model_dump(mode="json"),
        ).model_dump()
    except LibrationError as e:
        raise _http_error("audit series", e)


@router.get("/critical-mass", response_model=ResponseModel[Dict[str, Any]])
def get_critical_mass(
    q1: float = 1.0,
    a2: float = 0.0,
    w1: float = 0.0,
    lo: float = 1e-5,
    hi: float = 0.5,
) -> Dict[str, Any]:
    """
    Mass ratio at which the triangular point stops being stable.
    """
    try:
        found = critical_mass(q1, a2, w1, bracket=(lo, hi))
        return ResponseModel(
            success=True,
            message="Critical mass located successfully",
            data={
                "q1": q1,
                "a2": a2,
                "w1": w1,
                "mu_c": found.mu_c,
                "iterations": found.iterations,
                "bracket": list(found.bracket),
            },
        ).model_dump()
    except LibrationError as e:
        raise _http_error("locate critical mass", e)
