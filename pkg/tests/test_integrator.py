import io

import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import CloseApproachError, ParameterError
from app.rtbp.dynamics import PhaseState, time_reversed
from app.rtbp.equilibria import refined_point
from app.rtbp.integrator import (
    CSV_COLUMNS,
    Status,
    energy_drift,
    growth_rate,
    integrate,
    unstable_direction,
)
from app.rtbp.normalization import linearize_eom
from app.rtbp.params import make_params


def _start(point, offset=0.0):
    return PhaseState(point.x_star + offset, point.y_star, 0.0, 0.0)


def test_rest_at_l4_stays(classical, classical_l4):
    trajectory = integrate(classical, _start(classical_l4), 50.0, tol=1e-12, stride=1.0)
    assert trajectory.status == Status.COMPLETED
    displacement = trajectory.states - np.array([classical_l4.x_star, classical_l4.y_star, 0.0, 0.0])
    assert np.max(np.abs(displacement)) < 1e-8


def test_sample_grid(classical, classical_l4):
    trajectory = integrate(classical, _start(classical_l4, 1e-4), 10.0, stride=0.5)
    assert len(trajectory) == 21
    np.testing.assert_allclose(trajectory.times, np.linspace(0.0, 10.0, 21))
    assert trajectory.samples[0][1] == _start(classical_l4, 1e-4)


def test_energy_conserved_without_drag(classical, classical_l4):
    trajectory = integrate(classical, _start(classical_l4, 1e-4), 100.0, tol=1e-12)
    assert energy_drift(trajectory) < 1e-9


def test_drag_dissipates_energy(classical, classical_l4):
    dragged = make_params(0.01, w1=1e-3)
    point = refined_point(dragged)
    conservative = energy_drift(integrate(classical, _start(classical_l4, 1e-3), 100.0, tol=1e-12))
    trajectory = integrate(dragged, _start(point, 1e-3), 100.0, tol=1e-12)
    energies = trajectory.energies()
    assert energies[-1] < energies[0]
    assert np.all(np.diff(energies) < 1e-12)
    assert energy_drift(trajectory) > 100.0 * max(conservative, 1e-12)


def test_drift_shrinks_with_tolerance(classical, classical_l4):
    drifts = [
        energy_drift(integrate(classical, _start(classical_l4, 1e-3), 50.0, tol=tol))
        for tol in (1e-9, 1e-10, 1e-11, 1e-12)
    ]
    for looser, tighter in zip(drifts, drifts[1:]):
        assert tighter <= 1.5 * looser + 1e-14


def test_weak_drag_drift_is_one_signed():
    dragged = make_params(0.01, w1=1e-4)
    trajectory = integrate(dragged, _start(refined_point(dragged), 1e-4), 100.0, tol=1e-12)
    drift = trajectory.energies() - trajectory.energies()[0]
    assert np.all(drift[1:] < 1e-12)
    assert drift[-1] < -1e-12
    assert energy_drift(trajectory) > 1e-12


def test_repeated_run_gives_identical_csv(perturbed, perturbed_l4):
    start = _start(perturbed_l4, 1e-4)
    first = integrate(perturbed, start, 20.0, stride=0.5).to_csv()
    second = integrate(perturbed, start, 20.0, stride=0.5).to_csv()
    assert first == second


def test_status_values_are_strings():
    assert Status.COMPLETED == "completed"
    assert Status("close_approach") is Status.CLOSE_APPROACH
    assert [status.value for status in Status] == [
        "completed",
        "close_approach",
        "step_underflow",
        "saturated",
    ]


def test_time_reversal(classical, classical_l4):
    start = _start(classical_l4, 1e-3)
    forward = integrate(classical, start, 10.0, tol=1e-12).final_state
    back = integrate(classical, time_reversed(forward), 10.0, tol=1e-12).final_state
    np.testing.assert_allclose(
        back,
        time_reversed(start),
        atol=1e-7,
    )


def test_close_approach_keeps_partial_trajectory(classical):
    mu = classical.mu
    start = PhaseState(1.0 - mu + 0.05, 0.0, 0.0, 0.0)
    with pytest.raises(CloseApproachError) as info:
        integrate(classical, start, 10.0, close_radius=1e-3)
    trajectory = info.value.trajectory
    assert trajectory.status == Status.CLOSE_APPROACH
    assert 0.0 < trajectory.times[-1] < 10.0
    last = trajectory.final_state
    assert np.hypot(last.x - (1.0 - mu), last.y) == pytest.approx(1e-3, rel=1e-3)
    assert info.value.exit_code == 5


def test_start_inside_close_radius(classical):
    start = PhaseState(1.0 - classical.mu + 1e-7, 0.0, 0.0, 0.0)
    with pytest.raises(CloseApproachError) as info:
        integrate(classical, start, 10.0)
    assert len(info.value.trajectory) == 1


def test_csv_layout(classical, classical_l4):
    text = integrate(classical, _start(classical_l4, 1e-4), 1.0, stride=0.25).to_csv()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    frame = pd.read_csv(io.StringIO(text))
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == 5


@pytest.mark.parametrize(
    "kwargs",
    [{"t_end": 0.0}, {"t_end": 1.0, "tol": 1e-3}, {"t_end": 1.0, "tol": 1e-16}, {"t_end": 1.0, "stride": 0.0}],
)
def test_integrate_rejects_bad_input(classical, classical_l4, kwargs):
    with pytest.raises(ParameterError):
        integrate(classical, _start(classical_l4), **kwargs)


def test_growth_rate_matches_linearization():
    params = make_params(0.05)
    point = refined_point(params)
    expected = linearize_eom(params, point).max_real_part
    estimate = growth_rate(params, point)
    assert estimate.growing
    assert estimate.t_saturation is not None
    assert estimate.rate == pytest.approx(expected, rel=0.05)
    assert estimate.rate == pytest.approx(0.1819, rel=0.05)


def test_no_growth_when_stable(classical, classical_l4):
    estimate = growth_rate(classical, classical_l4, threshold=1e-2)
    assert not estimate.growing
    assert estimate.t_saturation is None
    assert abs(estimate.rate) < 1e-2


def test_unstable_direction_is_unit(classical):
    params = make_params(0.05)
    d = unstable_direction(params, refined_point(params))
    assert np.linalg.norm(d) == pytest.approx(1.0)


def test_growth_rate_rejects_perturbation_size(classical, classical_l4):
    with pytest.raises(ParameterError):
        growth_rate(classical, classical_l4, perturbation_size=1e-2)
