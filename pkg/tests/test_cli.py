import json
import math

import mpmath
import pytest

from lowred.cli import main
from lowred.harness import worst_case_fixture
from lowred.measurement import CIRCLE, MeasurementVector
from lowred.polyspace import Polynomial, rho


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds(capsys):
    code, out, _ = run(["bounds", "--d", "7", "--alpha", "0.5"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["r"] == pytest.approx(math.sin(2 * math.pi / 294), rel=1e-15)
    assert data["admissible"] and data["eps_inf"] == data["admissible_noise"]


def test_bounds_with_eps(capsys):
    code, out, _ = run(["bounds", "--d", "3", "--eps", "1", "--variant", "theorem"], capsys)
    assert code == 0 and json.loads(out)["admissible"] is False


@pytest.mark.parametrize("method", ["phaseprop", "kernel"])
def test_measure_recover_round_trip(tmp_path, capsys, method):
    poly = tmp_path / "p.json"
    meas = tmp_path / "m.csv"
    out = tmp_path / "r.json"
    poly.write_text(worst_case_fixture().to_json())
    assert main(["measure", "--input", str(poly), "--out", str(meas)]) == 0
    assert main(["recover", "--input", str(meas), "--method", method, "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["method"] in ("phase-propagation", "kernel")
    assert rho(Polynomial.from_dict(data), worst_case_fixture()) <= 1e-8


def test_measure_recover_mp(tmp_path):
    poly = tmp_path / "p.json"
    meas = tmp_path / "m.csv"
    out = tmp_path / "r.json"
    poly.write_text(worst_case_fixture().to_json())
    assert main(["measure", "--input", str(poly), "--dps", "40", "--out", str(meas)]) == 0
    assert main(["recover", "--input", str(meas), "--dps", "40", "--out", str(out)]) == 0
    assert rho(Polynomial.from_json(out.read_text()), worst_case_fixture()) <= 1e-14


def test_sweep_fixture(tmp_path, capsys):
    levels = ",".join(str(k / 10) for k in range(1, 11))
    code, out, _ = run(["sweep", "--d", "7", "--poly-source", "fixture-d7", "--relative",
                        "--levels", levels, "--trials", "2"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "noise_level,worst_rho,mean_rho,bound,admissible"
    assert len(lines) == 11
    for line in lines[1:]:
        level, worst, mean, bound, adm = line.split(",")
        # bounds near 1e429 overflow float(), so parse with mpmath
        assert adm == "true" and mpmath.isfinite(mpmath.mpf(bound))
        assert 0 < mpmath.mpf(mean) <= mpmath.mpf(worst) <= mpmath.mpf(bound)


def test_sweep_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": 3, "noise_levels": [0, 1e-8], "trials_per_level": 2}))
    code, out, _ = run(["sweep", "--config", str(cfg), "--seed", "4"], capsys)
    assert code == 0 and len(out.splitlines()) == 3


def test_search_worst(capsys):
    code, out, _ = run(["search-worst", "--d", "3", "--iters", "20", "--batch", "4"], capsys)
    assert code == 0 and Polynomial.from_json(out).dim == 3


@pytest.mark.parametrize("argv", [
    ["bounds", "--d", "1"],
    ["bounds", "--d", "3", "--alpha", "2"],
    ["sweep", "--d", "3", "--levels", "1,0.5"],
    ["sweep", "--levels", "0"],
    ["measure", "--input", "/nonexistent/p.json"],
])
def test_validation_exit_code(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "invalid input" in err


def test_usage_errors_exit_1():
    for argv in (["frobnicate"], ["bounds"], ["sweep", "--levels", "a,b"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1


def test_bad_json_exit_1(tmp_path, capsys):
    bad = tmp_path / "p.json"
    bad.write_text("{not json")
    code, _, err = run(["measure", "--input", str(bad)], capsys)
    assert code == 1 and "invalid" in err


def test_numerical_failure_exit_2(tmp_path, capsys):
    meas = tmp_path / "m.csv"
    meas.write_text(MeasurementVector([-1.0] * 9, CIRCLE, 2).to_csv())
    code, _, err = run(["recover", "--input", str(meas)], capsys)
    assert code == 2 and "numerical" in err
