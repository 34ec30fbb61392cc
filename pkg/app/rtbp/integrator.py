"""
Direct integration of the velocity-form equations of motion with an
adaptive Dormand-Prince 5(4) pair, sampled on a fixed grid through the
dense-output interpolant.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from app.core.config import settings
from app.core.exceptions import CloseApproachError, ParameterError, StepUnderflowError
from app.rtbp.dynamics import PhaseState, hamiltonian, vector_field
from app.rtbp.normalization import linearize_eom
from app.rtbp.params import SystemParams
from app.schemas.equilibrium import EquilibriumPoint

logger = logging.getLogger(__name__)

TOL_RANGE = (1e-14, 1e-6)
CSV_COLUMNS = ["t", "x", "y", "vx", "vy", "H"]

Event = Callable[[float, np.ndarray], float]


class Status(str, Enum):
    COMPLETED = "completed"
    CLOSE_APPROACH = "close_approach"
    STEP_UNDERFLOW = "step_underflow"
    SATURATED = "saturated"


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: SystemParams
    tolerances: Tuple[float, float]
    status: Status = Status.COMPLETED

    def __len__(self) -> int:
        return len(self.times)

    @property
    def samples(self) -> List[Tuple[float, PhaseState]]:
        return [(float(t), PhaseState(*map(float, z))) for t, z in zip(self.times, self.states)]

    @property
    def final_state(self) -> PhaseState:
        return PhaseState(*map(float, self.states[-1]))

    def energies(self) -> np.ndarray:
        if len(self) == 0:
            return np.empty(0)
        return np.asarray(hamiltonian(self.params, PhaseState(*self.states.T)), dtype=float)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.states, columns=CSV_COLUMNS[1:5])
        frame.insert(0, "t", self.times)
        frame["H"] = self.energies()
        return frame

    def to_csv(self, path_or_buf=None) -> Optional[str]:
        return self.to_frame().to_csv(
            path_or_buf, float_format="%.17g", lineterminator="\n", index=False
        )


def _primary_distances(params: SystemParams, z: np.ndarray) -> Tuple[float, float]:
    x, y = z[0], z[1]
    return float(np.hypot(x + params.mu, y)), float(np.hypot(x + params.mu - 1.0, y))


def _terminal(fn: Event, direction: float) -> Event:
    fn.terminal = True  # type: ignore[attr-defined]
    fn.direction = direction  # type: ignore[attr-defined]
    return fn


def _sample_grid(t_end: float, stride: float) -> np.ndarray:
    count = max(int(round(t_end / stride)), 1)
    return np.linspace(0.0, t_end, count + 1)


def _run(
    params: SystemParams,
    initial: Sequence[float],
    t_end: float,
    tol: float,
    stride: float,
    radius: float,
    extra_events: Sequence[Event] = (),
) -> Tuple[Trajectory, Optional[int]]:
    """Integrate and sample; returns the trajectory and the index of the event that stopped it."""
    y0 = np.asarray(initial, dtype=float)
    tolerances = (tol, tol)
    if min(_primary_distances(params, y0)) < radius:
        partial = Trajectory(np.array([0.0]), y0[None, :], params, tolerances, Status.CLOSE_APPROACH)
        return partial, 0

    events = [
        _terminal(lambda t, z: _primary_distances(params, z)[0] - radius, -1.0),
        _terminal(lambda t, z: _primary_distances(params, z)[1] - radius, -1.0),
        *extra_events,
    ]
    solution = solve_ivp(
        lambda t, z: vector_field(params, t, z),
        (0.0, t_end),
        y0,
        method="RK45",
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=events,
    )

    grid = _sample_grid(t_end, stride)
    t_stop = float(solution.t[-1])
    fired = None
    status = Status.COMPLETED
    if solution.status == 1:
        fired = next(i for i, hits in enumerate(solution.t_events) if len(hits))
        status = Status.CLOSE_APPROACH if fired < 2 else Status.SATURATED
    elif solution.status == -1:
        status = Status.STEP_UNDERFLOW
        logger.warning(f"integration stopped at t={t_stop:.6g}: {solution.message}")

    if status == Status.COMPLETED:
        times = grid
    else:
        times = grid[grid < t_stop]
        if times.size == 0 or t_stop > times[-1]:
            times = np.append(times, t_stop)

    if solution.sol is None:
        times, states = np.array([0.0]), y0[None, :]
    else:
        states = solution.sol(times).T
        states[0] = y0
    return Trajectory(times, states, params, tolerances, status), fired


def integrate(
    params: SystemParams,
    initial: Union[PhaseState, Sequence[float]],
    t_end: float,
    tol: Optional[float] = None,
    stride: Optional[float] = None,
    close_radius: Optional[float] = None,
) -> Trajectory:
    """
    Integrate (x, y, x', y') from t = 0 to `t_end`.

    Samples lie on a fixed grid of spacing `stride`. A close approach to
    either primary (distance below `close_radius`) raises CloseApproachError
    and step-size collapse raises StepUnderflowError; both carry the samples
    reached so far.
    """
    tol = settings.INTEGRATOR_TOL if tol is None else tol
    stride = settings.SAMPLE_STRIDE if stride is None else stride
    close_radius = settings.CLOSE_APPROACH_RADIUS if close_radius is None else close_radius
    if not t_end > 0:
        raise ParameterError(f"t_end out of range: must be positive, got {t_end}")
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ParameterError(f"tol out of range: must lie in {TOL_RANGE}, got {tol}")
    if not stride > 0:
        raise ParameterError(f"stride out of range: must be positive, got {stride}")

    trajectory, _ = _run(params, initial, t_end, tol, stride, close_radius)
    if trajectory.status == Status.CLOSE_APPROACH:
        t_stop = trajectory.times[-1]
        logger.warning(f"close approach to a primary at t={t_stop:.6g}")
        raise CloseApproachError(f"close approach to a primary at t={t_stop:.6g}", trajectory)
    if trajectory.status == Status.STEP_UNDERFLOW:
        raise StepUnderflowError(
            f"step size underflow at t={trajectory.times[-1]:.6g}", trajectory
        )
    logger.debug(f"integrated to t={t_end} with {len(trajectory)} samples")
    return trajectory


def energy_drift(trajectory: Trajectory) -> float:
    """max |H(t) - H(0)| over the samples."""
    energies = trajectory.energies()
    if energies.size == 0:
        return 0.0
    return float(np.max(np.abs(energies - energies[0])))


@dataclass(frozen=True)
class GrowthEstimate:
    rate: float
    growing: bool
    samples_used: int
    t_saturation: Optional[float] = None


def unstable_direction(params: SystemParams, point: EquilibriumPoint) -> np.ndarray:
    """Unit real part of the eigenvector with the largest real part of the linearization."""
    matrix = linearize_eom(params, point).matrix
    values, vectors = np.linalg.eig(matrix)
    v = vectors[:, int(np.argmax(values.real))]
    d = v.real if np.linalg.norm(v.real) > 1e-8 else v.imag
    return d / np.linalg.norm(d)


def growth_rate(
    params: SystemParams,
    point: EquilibriumPoint,
    perturbation_size: float = 1e-6,
    t_window: float = 200.0,
    direction: Optional[Sequence[float]] = None,
    stride: float = 0.05,
    tol: Optional[float] = None,
    saturation: Optional[float] = None,
    threshold: Optional[float] = None,
) -> GrowthEstimate:
    """
    e-folding rate of a small displacement from the equilibrium.

    The rate is the least-squares slope of log|z(t) - z*| over the samples
    taken before the displacement reaches `saturation`.
    """
    saturation = settings.GROWTH_SATURATION if saturation is None else saturation
    threshold = settings.GROWTH_THRESHOLD if threshold is None else threshold
    tol = settings.INTEGRATOR_TOL if tol is None else tol
    if not 1e-8 <= perturbation_size <= 1e-4:
        raise ParameterError(
            f"perturbation_size out of range: must lie in [1e-8, 1e-4], got {perturbation_size}"
        )

    d = unstable_direction(params, point) if direction is None else np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    center = np.array([point.x_star, point.y_star, 0.0, 0.0])

    saturated = _terminal(lambda t, z: np.linalg.norm(z - center) - saturation, 1.0)
    trajectory, fired = _run(
        params,
        center + perturbation_size * d,
        t_window,
        tol,
        stride,
        settings.CLOSE_APPROACH_RADIUS,
        extra_events=[saturated],
    )
    if trajectory.status == Status.CLOSE_APPROACH:
        raise CloseApproachError("close approach during growth measurement", trajectory)

    distance = np.linalg.norm(trajectory.states - center, axis=1)
    mask = (distance > 0.0) & (distance < saturation)
    if mask.sum() < 2:
        return GrowthEstimate(rate=0.0, growing=False, samples_used=int(mask.sum()))

    slope = float(np.polyfit(trajectory.times[mask], np.log(distance[mask]), 1)[0])
    t_saturation = float(trajectory.times[-1]) if trajectory.status == Status.SATURATED else None
    estimate = GrowthEstimate(
        rate=slope,
        growing=slope > threshold,
        samples_used=int(mask.sum()),
        t_saturation=t_saturation,
    )
    if not estimate.growing:
        logger.info(f"no exponential growth detected (rate {slope:.3e})")
    return estimate
