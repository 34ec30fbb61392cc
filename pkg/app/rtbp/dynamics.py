"""
Force function, equations of motion, Lagrangian and Hamiltonian of the
planar problem in the rotating frame, plus the velocity <-> momentum charts.

All functions accept scalars or numpy arrays for the state components, so a
batch of states can be evaluated in one call.
"""

from typing import NamedTuple, Tuple, Union

import numpy as np

from app.core.exceptions import SingularityError
from app.rtbp.params import SystemParams


class PhaseState(NamedTuple):
    """Velocity chart (x, y, x', y')."""

    x: float
    y: float
    vx: float
    vy: float


class CanonicalState(NamedTuple):
    """Momentum chart (x, y, px, py)."""

    x: float
    y: float
    px: float
    py: float


State = Union[PhaseState, CanonicalState]


def _distances_sq(params: SystemParams, x, y) -> Tuple[np.ndarray, np.ndarray]:
    r1sq = (x + params.mu) ** 2 + y**2
    r2sq = (x + params.mu - 1.0) ** 2 + y**2
    if np.any(np.asarray(r1sq) <= 0.0):
        raise SingularityError("state at the radiating primary (r1 = 0)")
    if np.any(np.asarray(r2sq) <= 0.0):
        raise SingularityError("state at the oblate primary (r2 = 0)")
    return r1sq, r2sq


def _arctan(params: SystemParams, x, y):
    # quadrant-aware and continuous around both triangular points
    return np.arctan2(y, x + params.mu)


def _static_potential(params: SystemParams, x, y):
    """Gravity, radiation and oblateness part of U (no centrifugal, no drag)."""
    r1sq, r2sq = _distances_sq(params, x, y)
    r1 = np.sqrt(r1sq)
    r2 = np.sqrt(r2sq)
    mu = params.mu
    return (1.0 - mu) * params.q1 / r1 + mu / r2 + 0.5 * mu * params.a2 / (r2 * r2sq)


def force_function(params: SystemParams, state: PhaseState):
    """U = n^2/2 r^2 + gravity + oblateness + W1 {radial-velocity term - n arctan}."""
    x, y, vx, vy = state
    r1sq, _ = _distances_sq(params, x, y)
    n = params.n
    drag = params.w1 * (
        ((x + params.mu) * vx + y * vy) / (2.0 * r1sq) - n * _arctan(params, x, y)
    )
    return 0.5 * n**2 * (x**2 + y**2) + _static_potential(params, x, y) + drag


def static_accelerations(params: SystemParams, x, y):
    """Right-hand sides of the equations of motion at zero velocity."""
    mu, q1, a2, w1, n = params.mu, params.q1, params.a2, params.w1, params.n
    r1sq, r2sq = _distances_sq(params, x, y)
    r1_3 = r1sq * np.sqrt(r1sq)
    r2_3 = r2sq * np.sqrt(r2sq)
    r2_5 = r2_3 * r2sq
    dx1 = x + mu
    dx2 = x + mu - 1.0
    rhs1 = (
        n**2 * x
        - (1.0 - mu) * q1 * dx1 / r1_3
        - mu * dx2 / r2_3
        - 1.5 * mu * a2 * dx2 / r2_5
        + n * w1 * y / r1sq
    )
    rhs2 = (
        n**2 * y
        - (1.0 - mu) * q1 * y / r1_3
        - mu * y / r2_3
        - 1.5 * mu * a2 * y / r2_5
        - n * w1 * dx1 / r1sq
    )
    return rhs1, rhs2


def eom_rhs(params: SystemParams, state: PhaseState):
    """Accelerations (x'', y'') including Coriolis and the velocity drag terms."""
    x, y, vx, vy = state
    mu, w1, n = params.mu, params.w1, params.n
    rhs1, rhs2 = static_accelerations(params, x, y)
    r1sq = (x + mu) ** 2 + y**2
    radial = ((x + mu) * vx + y * vy) / r1sq
    drag_x = -w1 / r1sq * ((x + mu) * radial + vx)
    drag_y = -w1 / r1sq * (y * radial + vy)
    return 2.0 * n * vy + rhs1 + drag_x, -2.0 * n * vx + rhs2 + drag_y


def vector_field(params: SystemParams, t: float, z: np.ndarray) -> np.ndarray:
    """First-order system (x', y', x'', y'') for z of shape (4,) or (4, N)."""
    x, y, vx, vy = z
    ax, ay = eom_rhs(params, PhaseState(x, y, vx, vy))
    return np.array([vx, vy, ax, ay])


def lagrangian(params: SystemParams, state: PhaseState):
    x, y, vx, vy = state
    kinetic = 0.5 * (vx**2 + vy**2)
    gyroscopic = params.n * (x * vy - vx * y)
    return kinetic + gyroscopic + force_function(params, state)


def to_momenta(params: SystemParams, state: PhaseState) -> CanonicalState:
    x, y, vx, vy = state
    r1sq, _ = _distances_sq(params, x, y)
    w = params.w1 / (2.0 * r1sq)
    return CanonicalState(
        x, y, vx - params.n * y + w * (x + params.mu), vy + params.n * x + w * y
    )


def from_momenta(params: SystemParams, state: CanonicalState) -> PhaseState:
    x, y, px, py = state
    r1sq, _ = _distances_sq(params, x, y)
    w = params.w1 / (2.0 * r1sq)
    return PhaseState(
        x, y, px + params.n * y - w * (x + params.mu), py - params.n * x - w * y
    )


def hamiltonian(params: SystemParams, state: State):
    """
    H = 1/2 (x'^2 + y'^2) - n^2/2 r^2 - gravity - oblateness + n W1 arctan.

    A CanonicalState is first mapped to velocities through the momenta chart.
    """
    if isinstance(state, CanonicalState):
        state = from_momenta(params, state)
    x, y, vx, vy = state
    return (
        0.5 * (vx**2 + vy**2)
        - 0.5 * params.n**2 * (x**2 + y**2)
        - _static_potential(params, x, y)
        + params.n * params.w1 * _arctan(params, x, y)
    )


def time_reversed(state: PhaseState) -> PhaseState:
    """Reversing symmetry of the drag-free problem: (x, -y, -x', y')."""
    x, y, vx, vy = state
    return PhaseState(x, -y, -vx, vy)
