import io
import json

import pandas as pd
import pytest

from app.cli import load_config, main
from app.core.exceptions import ParameterError
from app.rtbp.integrator import CSV_COLUMNS
from tests.conftest import ROUTH_MU


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_equilibria_json(capsys):
    code, out = _run(capsys, "equilibria", "--mu", "0.2")
    assert code == 0
    payload = json.loads(out)
    assert payload["closed_form"]["x_star"] == pytest.approx(0.3, abs=1e-15)
    assert payload["refined"]["x_star"] == pytest.approx(0.3, abs=1e-12)
    assert payload["refined"]["branch"] == "L4"


def test_equilibria_csv_l5(capsys):
    code, out = _run(capsys, "equilibria", "--mu", "0.2", "--branch", "L5", "--format", "csv")
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert len(frame) == 2
    assert (frame["y_star"] < 0).all()


def test_invalid_mass_ratio_exits_2(capsys):
    code, out = _run(capsys, "equilibria", "--mu", "0.6")
    assert code == 2
    assert out == ""


def test_missing_mass_ratio_exits_2(capsys):
    code, _ = _run(capsys, "spectrum")
    assert code == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["spectrum", "--mass", "0.1"])
    assert info.value.code == 2


def test_spectrum(capsys):
    code, out = _run(capsys, "spectrum", "--mu", "0.01")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "stable"
    assert payload["D"] > 0
    assert payload["omega1"] == pytest.approx(0.9633222, abs=1e-7)


def test_series_check(capsys, tmp_path):
    target = tmp_path / "audit.json"
    code, out = _run(capsys, "series-check", "--mu", "0.01", "--out", str(target))
    assert code == 0
    assert out == ""
    payload = json.loads(target.read_text())
    assert not payload["entries"]["x y"]["match"]


def test_stability_map(capsys, tmp_path):
    target = tmp_path / "map.csv"
    code, _ = _run(
        capsys, "stability-map", "--grid", "mu=0.01:0.05:5", "--workers", "1", "--out", str(target)
    )
    assert code == 0
    frame = pd.read_csv(target)
    assert frame["verdict"].tolist() == ["stable", "stable", "stable", "unstable", "unstable"]


def test_stability_map_needs_grid(capsys):
    code, _ = _run(capsys, "stability-map", "--mu", "0.01")
    assert code == 2


def test_critical_mass(capsys):
    code, out = _run(capsys, "critical-mass")
    assert code == 0
    assert json.loads(out)["mu_c"] == pytest.approx(ROUTH_MU, abs=1e-8)


def test_critical_mass_without_transition_exits_4(capsys):
    code, out = _run(capsys, "critical-mass", "--bracket", "1e-5,0.03")
    assert code == 4
    assert out == ""


def test_integrate_close_approach_exits_5(capsys, tmp_path):
    target = tmp_path / "orbit.csv"
    code, _ = _run(
        capsys, "integrate", "--mu", "0.01", "--state=0.9900001,0,0,0", "--out", str(target)
    )
    assert code == 5
    frame = pd.read_csv(target)
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == 1


def test_integrate_from_offset(capsys):
    code, out = _run(
        capsys, "integrate", "--mu", "0.01", "--offset", "1e-4", "--t-end", "2", "--stride", "0.5"
    )
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert frame["t"].tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]


def test_config_file_merged_under_flags(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"mu": 0.3, "q1": 0.99, "branch": "L5"}))
    cfg = load_config(["spectrum", "--config", str(config), "--mu", "0.02"])
    assert cfg.mu == 0.02
    assert cfg.q1 == 0.99
    assert cfg.branch == "l5"


def test_config_file_rejects_unknown_key(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"mass": 0.3}))
    with pytest.raises(ParameterError, match="out of range"):
        load_config(["spectrum", "--config", str(config)])


@pytest.mark.parametrize(
    "argv",
    [
        ["integrate", "--mu", "0.01", "--q1", "0.99", "--w1", "1e-4"]
        + ["--offset", "1e-4", "--t-end", "5"],
        ["stability-map", "--grid", "mu=0.01:0.05:5", "--grid", "q1=0.98:1:3", "--workers", "2"],
    ],
)
def test_repeated_runs_write_identical_bytes(capsys, tmp_path, argv):
    outputs = []
    for name in ("first.csv", "second.csv"):
        target = tmp_path / name
        code, _ = _run(capsys, *argv, "--out", str(target))
        assert code == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0]
