"""
Triangular equilibrium points: the first-order closed form and a
Newton-refined root of the zero-velocity equations of motion.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    ClosedFormError,
    ConvergenceError,
    SingularityError,
    SingularJacobianError,
)
from app.rtbp.dynamics import static_accelerations
from app.rtbp.params import SystemParams
from app.schemas.equilibrium import Branch, EquilibriumPoint, Method

logger = logging.getLogger(__name__)

# Newton keeps iterating below the residual tolerance until steps are this small.
STEP_FLOOR = 1e-14
MAX_HALVINGS = 30

PointLike = Union[EquilibriumPoint, Tuple[float, float]]


def _xy(point: PointLike) -> Tuple[float, float]:
    if isinstance(point, EquilibriumPoint):
        return point.x_star, point.y_star
    x, y = point
    return float(x), float(y)


def equilibrium_residual(params: SystemParams, point: PointLike) -> Tuple[float, float]:
    """Zero-velocity right-hand sides (R1, R2); both vanish at an equilibrium."""
    x, y = _xy(point)
    r1, r2 = static_accelerations(params, x, y)
    return float(r1), float(r2)


def _residual_vector(params: SystemParams, p: np.ndarray) -> np.ndarray:
    return np.array(static_accelerations(params, p[0], p[1]), dtype=float)


def triangular_closed_form(
    params: SystemParams, branch: Branch = Branch.L4
) -> EquilibriumPoint:
    """
    First-order coordinates in W1 and A2, exact in q1:

        x* = x0 - n W1 [(1-mu)(1 - 5/2 A2) + mu (1 - A2/2) d^2/2] / (3 mu (1-mu) y0)
                - d^2 A2 / 2
        y* = y0 {1 - n W1 d^2 [2mu - 1 - mu (1 - 3/2 A2) d^2/2 + 7 (1-mu) A2/2]
                     / (3 mu (1-mu) y0^3)
                 - d^2 (1 - d^2/2) A2 / y0^2}^(1/2)

    with x0 = d^2/2 - mu, y0 = +-d (1 - d^2/4)^(1/2), d = q1^(1/3). The x0
    factor is multiplied through, so mu = 1/2 needs no special case.
    """
    mu, a2, w1, n = params.mu, params.a2, params.w1, params.n
    d2 = params.delta**2
    x0 = d2 / 2.0 - mu
    y0 = branch.sign * params.delta * np.sqrt(1.0 - d2 / 4.0)

    denom = 3.0 * mu * (1.0 - mu) * y0
    if denom == 0.0:
        raise ClosedFormError("closed form invalid at this parameter (mu (1-mu) y0 = 0)")

    x_star = (
        x0
        - n * w1 * ((1.0 - mu) * (1.0 - 2.5 * a2) + mu * (1.0 - a2 / 2.0) * d2 / 2.0) / denom
        - d2 * a2 / 2.0
    )
    bracket = (
        1.0
        - n
        * w1
        * d2
        * (2.0 * mu - 1.0 - mu * (1.0 - 1.5 * a2) * d2 / 2.0 + 7.0 * (1.0 - mu) * a2 / 2.0)
        / (denom * y0**2)
        - d2 * (1.0 - d2 / 2.0) * a2 / y0**2
    )
    if not bracket > 0.0:
        raise ClosedFormError(
            f"closed form invalid at this parameter (y bracket = {bracket:.3g})"
        )
    y_star = y0 * np.sqrt(bracket)

    r1, r2 = equilibrium_residual(params, (x_star, y_star))
    return EquilibriumPoint(
        x_star=float(x_star),
        y_star=float(y_star),
        branch=branch,
        residual_norm=max(abs(r1), abs(r2)),
        method=Method.CLOSED_FORM,
    )


def _jacobian(params: SystemParams, p: np.ndarray, step: float) -> np.ndarray:
    jac = np.empty((2, 2))
    for j in range(2):
        dp = np.zeros(2)
        dp[j] = step
        jac[:, j] = (_residual_vector(params, p + dp) - _residual_vector(params, p - dp)) / (
            2.0 * step
        )
    return jac


def refine_equilibrium(
    params: SystemParams,
    initial: EquilibriumPoint,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    step: Optional[float] = None,
) -> EquilibriumPoint:
    """
    Damped Newton iteration on the zero-velocity residual.

    The Jacobian comes from central differences; a step is halved until the
    max-norm residual decreases. Iteration stops once the residual is within
    `tol` and the last accepted step is at the rounding floor (or no step
    improves the residual any more).
    """
    tol = settings.NEWTON_TOL if tol is None else tol
    max_iter = settings.NEWTON_MAX_ITER if max_iter is None else max_iter
    step = settings.FD_STEP if step is None else step

    p = np.array([initial.x_star, initial.y_star], dtype=float)
    residual = _residual_vector(params, p)
    norm = float(np.max(np.abs(residual)))
    last_step = np.inf
    iterations = 0

    while iterations < max_iter:
        if norm == 0.0 or (norm <= tol and last_step <= STEP_FLOOR):
            break
        jac = _jacobian(params, p, step)
        try:
            delta = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                "singular Jacobian in equilibrium refinement", p, norm
            ) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularJacobianError("singular Jacobian in equilibrium refinement", p, norm)

        scale = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS):
            trial = p + scale * delta
            try:
                trial_residual = _residual_vector(params, trial)
            except SingularityError:
                scale /= 2.0
                continue
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm < norm:
                accepted = True
                break
            scale /= 2.0

        if not accepted:
            # rounding floor: no step reduces the residual any further
            break

        last_step = float(np.max(np.abs(scale * delta)))
        p, residual, norm = trial, trial_residual, trial_norm
        iterations += 1
        logger.debug(f"Newton iteration {iterations}: residual={norm:.3e} step={last_step:.3e}")

    if norm > tol:
        raise ConvergenceError(
            f"equilibrium refinement did not converge (residual {norm:.3e})", p, norm
        )

    return EquilibriumPoint(
        x_star=float(p[0]),
        y_star=float(p[1]),
        branch=initial.branch,
        residual_norm=norm,
        method=Method.REFINED,
        iterations=iterations,
    )


def refined_point(params: SystemParams, branch: Branch = Branch.L4) -> EquilibriumPoint:
    """Closed form followed by Newton refinement."""
    return refine_equilibrium(params, triangular_closed_form(params, branch))


def triangular_points(params: SystemParams) -> Tuple[EquilibriumPoint, EquilibriumPoint]:
    """Refined L4 and L5."""
    return refined_point(params, Branch.L4), refined_point(params, Branch.L5)
