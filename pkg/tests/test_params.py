import numpy as np
import pytest

from app.core.exceptions import ParameterError
from app.rtbp.params import make_params, mean_motion, radiation_factor


def test_cd_route_gives_drag_parameter():
    params = make_params(0.25, q1=0.98, a2=0.0, cd=1.0)
    assert params.w1 == pytest.approx(0.015, abs=1e-15)


def test_cd_route_matches_direct_w1_bit_for_bit():
    via_cd = make_params(0.25, q1=0.98, a2=1e-3, cd=3.7)
    direct = make_params(0.25, q1=0.98, a2=1e-3, w1=via_cd.w1)
    assert via_cd == direct
    assert via_cd.as_dict() == direct.as_dict()


def test_classical_limit_derived_values():
    params = make_params(0.1)
    assert params.n == 1.0
    assert params.delta == 1.0
    assert params.w1 == 0.0


def test_derived_values_are_exact():
    params = make_params(0.1, q1=0.9, a2=0.02)
    assert params.n**2 == pytest.approx(1.0 + 1.5 * 0.02, rel=1e-15)
    assert params.delta**3 == pytest.approx(0.9, rel=1e-15)


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"mu": 0.6}, "mu"),
        ({"mu": 0.0}, "mu"),
        ({"mu": 0.1, "q1": 0.0}, "q1"),
        ({"mu": 0.1, "q1": 1.2}, "q1"),
        ({"mu": 0.1, "a2": -1e-3}, "a2"),
        ({"mu": 0.1, "w1": -1e-3}, "w1"),
    ],
)
def test_out_of_range_names_field(kwargs, field):
    with pytest.raises(ParameterError, match=f"{field} out of range"):
        make_params(**kwargs)


def test_nan_is_rejected():
    with pytest.raises(ParameterError):
        make_params(float("nan"))


def test_w1_and_cd_are_exclusive():
    with pytest.raises(ParameterError):
        make_params(0.1, q1=0.9, w1=0.01, cd=1.0)


def test_cd_must_be_positive():
    with pytest.raises(ParameterError, match="cd out of range"):
        make_params(0.1, q1=0.9, cd=0.0)


def test_replace_revalidates():
    params = make_params(0.1, q1=0.99)
    assert params.replace(mu=0.2).mu == 0.2
    assert params.replace(a2=0.02).n == pytest.approx(mean_motion(0.02))
    with pytest.raises(ParameterError):
        params.replace(mu=0.7)


def test_params_are_immutable():
    params = make_params(0.1)
    with pytest.raises(Exception):
        params.mu = 0.2


@pytest.mark.parametrize(
    "a2, expected",
    [(0.0, 1.0), (0.02, np.sqrt(1.03)), (2.0 / 3.0, np.sqrt(2.0))],
)
def test_mean_motion(a2, expected):
    assert mean_motion(a2) == pytest.approx(expected, rel=1e-15)
    assert mean_motion(0.02) == pytest.approx(1.0148891565, rel=1e-10)


def test_mean_motion_increasing():
    values = [mean_motion(a2) for a2 in np.linspace(0.0, 0.1, 11)]
    assert np.all(np.diff(values) > 0)


def test_radiation_factor():
    assert radiation_factor(1.0, 1.0, efficiency=0.0) == 1.0
    assert radiation_factor(0.01, 1.4) == pytest.approx(0.996, abs=1e-14)


def test_radiation_factor_nonpositive():
    with pytest.raises(ParameterError, match="nonpositive q"):
        radiation_factor(5.6e-5, 1.0)


def test_radiation_factor_rejects_bad_grain():
    with pytest.raises(ParameterError):
        radiation_factor(0.0, 1.0)
    with pytest.raises(ParameterError):
        radiation_factor(1.0, 1.0, efficiency=-1.0)
