# tests/test_cli.py
import json
import math

import pandas as pd
import pytest

from expcli.app import main
from expcli.config import ExperimentConfig
from expcli.main_controller import (
    EXIT_CONFIG,
    EXIT_INCOMPLETE,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_PROPERTY,
    check_properties,
    exit_code_for,
    run,
)
from expcli import property_suites
from expcli.property_suites import SUITES
from utils_common import ConfigError, DomainError, EnumerationError

CYCLIC_ORBIT = ["count-orbit", "--group", "cyclic-demo", "--t-grid", "1", "2", "3", "4", "5"]


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def _write_series(path, rate=1.0, complete=True):
    T = [0.5 * k for k in range(13)]
    df = pd.DataFrame({"T": T, "N": [round(100 * math.exp(rate * t)) for t in T]})
    if not complete:
        df["complete"] = [True] * 10 + [False] * 3
    df.to_csv(path, index=False)
    return str(path)


# ---- 계수 -----------------------------------------------------------------------
def test_count_orbit_cyclic(tmp_path, capsys):
    code = main([*CYCLIC_ORBIT, "--output", str(tmp_path)])
    rep = _report(capsys)
    assert code == EXIT_OK
    assert rep["results"]["orbit"]["N"] == [1, 3, 3, 5, 5]
    assert rep["results"]["group"]["name"] == "cyclic-demo"
    assert rep["certificates"][0]["series"] == "orbit"
    assert (tmp_path / "count-orbit.json").exists()
    saved = pd.read_csv(tmp_path / "count-orbit_orbit.csv")
    assert list(saved["N"]) == [1, 3, 3, 5, 5]


def test_config_file_and_cli_override(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"group": "cyclic-demo", "t_grid": [1, 2, 3]}), encoding="utf-8")
    code = main(["count-orbit", "--config", str(cfg), "--t-grid", "5", "--output", str(tmp_path)])
    assert code == EXIT_OK
    assert _report(capsys)["results"]["orbit"]["N"] == [5]


def test_count_conj_cyclic(tmp_path, capsys):
    code = main(["count-conj", "--group", "cyclic-demo", "--t-grid", "1", "3", "--cross-check",
                 "--output", str(tmp_path)])
    rep = _report(capsys)
    assert code == EXIT_OK
    assert rep["results"]["conj"]["N"] == [0, 1]
    assert rep["results"]["class"]["gamma"] == "t"


# ---- 종료 코드 -------------------------------------------------------------------
def test_unknown_group_is_config_error(tmp_path, capsys):
    code = main(["count-orbit", "--group", "nope", "--output", str(tmp_path)])
    rep = _report(capsys)
    assert code == EXIT_CONFIG
    assert rep["steps"][0]["ok"] is False


def test_bad_range_is_config_error(tmp_path, capsys):
    assert main(["count-orbit", "--t-min", "5", "--t-max", "1", "--output", str(tmp_path)]) == EXIT_CONFIG
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("args", [["--t-min=-1", "--t-max", "3"], ["--t-grid", "1", "-0.5"], ["--t-grid=-2"]])
def test_negative_T_is_config_error(tmp_path, capsys, args):
    assert main(["count-orbit", "--group", "cyclic-demo", *args, "--output", str(tmp_path)]) == EXIT_CONFIG
    assert capsys.readouterr().out == ""
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "count-orbit", "t_grid": [1.0, float("nan")]})


def test_exit_code_mapping():
    assert exit_code_for(ConfigError("x")) == EXIT_CONFIG
    assert exit_code_for(DomainError("x")) == EXIT_CONFIG
    assert exit_code_for(EnumerationError("x")) == EXIT_INCOMPLETE
    # 분류되지 않은 예외는 성질 실패(1)와 구분
    assert exit_code_for(ValueError("x")) == EXIT_INTERNAL
    assert exit_code_for(RuntimeError("x")) == EXIT_INTERNAL
    assert EXIT_INTERNAL not in (EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_INCOMPLETE)


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"colour": "red"}), encoding="utf-8")
    assert main(["count-orbit", "--config", str(cfg), "--output", str(tmp_path)]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        ExperimentConfig.resolve({}, tmp_path / "missing.json")


# ---- fit-growth ------------------------------------------------------------------
def test_fit_growth_from_csv(tmp_path, capsys):
    series = _write_series(tmp_path / "s.csv")
    code = main(["fit-growth", "--series", series, "--output", str(tmp_path)])
    rep = _report(capsys)
    assert code == EXIT_OK
    assert rep["results"]["fit"]["slope"] == pytest.approx(1.0, abs=0.02)
    assert rep["results"]["fit"]["n_points"] == 13


def test_fit_growth_flags_slope(tmp_path, capsys):
    series = _write_series(tmp_path / "s.csv")
    code = main(["fit-growth", "--series", series, "--expected-slope", "0.5", "--output", str(tmp_path)])
    assert code == EXIT_PROPERTY
    assert _report(capsys)["results"]["fit"]["flagged"] is True


def test_fit_growth_incomplete(tmp_path, capsys):
    series = _write_series(tmp_path / "s.csv", complete=False)
    assert main(["fit-growth", "--series", series, "--output", str(tmp_path)]) == EXIT_INCOMPLETE
    # 구간을 완전한 점으로 좁히면 통과
    code = main(["fit-growth", "--series", series, "--window", "0", "4.5", "--output", str(tmp_path)])
    assert code == EXIT_OK


def test_fit_growth_too_few_points(tmp_path, capsys):
    series = _write_series(tmp_path / "s.csv")
    code = main(["fit-growth", "--series", series, "--window", "5", "6", "--output", str(tmp_path)])
    assert code == EXIT_INCOMPLETE
    assert _report(capsys)["steps"][-1]["ok"] is False


def test_fit_growth_missing_series(tmp_path, capsys):
    assert main(["fit-growth", "--series", str(tmp_path / "no.csv"), "--output", str(tmp_path)]) == EXIT_CONFIG


# ---- sigma-quad / ratio-test -----------------------------------------------------
def test_sigma_quad_x(tmp_path, capsys):
    code = main(["sigma-quad", "--group", "cyclic-demo", "--target", "x", "--n-nodes", "32",
                 "--samples", "200", "--output", str(tmp_path)])
    rep = _report(capsys)
    assert code == EXIT_OK
    assert rep["results"]["sigma"]["value"] == pytest.approx(2.0 * math.pi, rel=1e-6)
    assert rep["results"]["sigma_mc"]["method"] == "monte-carlo"


def test_ratio_test_constant_pair_point_to_point(tmp_path, capsys):
    code = main(["ratio-test", "--of", "adjusted-pp", "--group", "bolza", "--x", "0.1", "1.1", "--y", "0.1", "1.1",
                 "--pair", "const:0.25,0.25", "--pair-b", "zero", "--t-grid", "3", "4", "5", "6",
                 "--n-nodes", "16", "--output", str(tmp_path)])
    rep = _report(capsys)
    ratio = rep["results"]["ratio"]
    assert ratio["predicted_ratio"] == pytest.approx(math.exp(0.5), rel=1e-8)
    assert code in (EXIT_OK, EXIT_PROPERTY)
    assert len(ratio["T_used"]) == 3


# ---- 결정성 / 성질 검사 ----------------------------------------------------------
def test_report_is_deterministic():
    cfg = ExperimentConfig.from_dict({"kind": "count-orbit", "group": "cyclic-demo", "t_max": 4.0})
    a = run(cfg, write=False).to_json(include_timing=False)
    b = run(cfg, write=False).to_json(include_timing=False)
    assert a == b
    assert "timing" not in json.loads(a)


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "residual"])
def test_property_suites_pass(suite):
    rep = check_properties(suite, seed=3, sample_count=40)
    assert rep.exit_code == EXIT_OK, rep.to_json(include_timing=False)
    assert rep.suites[0]["suite"] == suite
    assert rep.suites[0]["passed"]


def test_projection_suite_samples_depths_up_to_ten(monkeypatch, rng):
    depths = []
    place = property_suites.point_at_depth

    def recording(L, s, depth, side=1):
        depths.append(depth)
        return place(L, s, depth, side)

    monkeypatch.setattr(property_suites, "point_at_depth", recording)
    res = property_suites.suite_projection(rng, 200)
    assert res.passed, res.to_dict()
    assert 1.0 <= min(depths) and 9.0 < max(depths) <= 10.0


@pytest.mark.slow
def test_residual_suite_passes():
    rep = check_properties("residual", seed=3, sample_count=200)
    assert rep.exit_code == EXIT_OK, rep.to_json(include_timing=False)


def test_check_cli_writes_report(tmp_path, capsys):
    code = main(["check", "isometry", "--samples", "10", "--seed", "1", "--output", str(tmp_path)])
    assert code == EXIT_OK
    assert _report(capsys)["suites"][0]["samples"] == 10
    assert (tmp_path / "check-isometry.json").exists()
