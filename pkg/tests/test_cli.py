# tests/test_cli.py
import json
import logging
from logging.handlers import RotatingFileHandler

import pytest

from epl import cli
from epl.logging_config import ENV_LOG_PATH
from epl.storage.json_store import load_json


def _run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_theta_values(capsys):
    code, report = _run_json(capsys, ["theta", "--x", "1", "--p", "0.1"])
    assert code == 0
    assert report["command"] == "theta"
    assert report["schema_version"] == 1
    assert (report["re"], report["im"]) == (0.0, 0.0)

    code, report = _run_json(capsys, ["theta", "--x", "0.5", "--p", "0"])
    assert code == 0
    assert report["re"] == pytest.approx(0.5, rel=1e-15)
    assert report["terms_used"] == 2


def test_gamma_modes(capsys):
    code, report = _run_json(capsys, ["gamma", "--mode", "pochhammer", "--x", "0.9,0.2", "--s", "0"])
    assert code == 0
    assert (report["re"], report["im"]) == (1.0, 0.0)
    assert cli.main(["gamma", "--mode", "genpoch", "--x", "0.9"]) == 2
    assert "ERROR" in capsys.readouterr().err


def test_vseries(capsys):
    # u = 1 = q^0 terminates at the leading term
    code, report = _run_json(capsys, ["vseries", "--u0", "0.9", "--us", "1", "0.9,0.2", "--z", "0.3"])
    assert code == 0
    assert (report["re"], report["im"]) == (1.0, 0.0)
    assert report["terms"] == 3
    assert cli.main(["vseries", "--u0", "0.9", "--us", "0.8,0.1", "--z", "0.3"]) == 2


def test_bad_base_is_a_domain_error(capsys):
    assert cli.main(["theta", "--x", "1.2", "--p", "1.5"]) == 2
    assert "ERROR: DomainError" in capsys.readouterr().err


def test_inconsistent_a6_config(tmp_path, capsys):
    path = tmp_path / "config.json"
    a = [[1.1, 0.1], [0.9, -0.2], [1.0, 0.25], [0.8, -0.3], [1.05, 0.0], [5.0, 0.0]]
    path.write_text(json.dumps({"pade": {"k": [1.0, 0.1], "a": a}}), encoding="utf-8")
    assert cli.main(["pade-solve", "--config", str(path)]) == 2


def test_truncation_cap_is_a_numerical_failure(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"bases": {"max_terms": 1}}), encoding="utf-8")
    assert cli.main(["theta", "--x", "1.3", "--config", str(path)]) == 3


def test_pade_solve_trivial_problem(capsys):
    code, report = _run_json(capsys, ["pade-solve", "--m", "0", "--n", "0"])
    assert code == 0
    assert report["u"] == [[1.0, 0.0]]
    assert report["extracted"] is None
    assert report["passed"] is True
    assert report["config"]["pade"]["drawn"] is True


def test_pade_solve_verification_failure(capsys):
    code = cli.main(["pade-solve", "--tol", "1e-300"])
    captured = capsys.readouterr()
    assert code == 1
    report = json.loads(captured.out)
    assert report["passed"] is False
    assert report["extracted"] is not None
    assert "VerificationFailure" in captured.err


def test_orbit_zero_steps(capsys):
    assert cli.main(["orbit", "--steps", "0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(cli.ORBIT_HEADER)
    assert len(lines) == 2
    assert lines[1].startswith("0,")
    assert lines[1].endswith(",,,")


def test_orbit_steps_carry_the_crosscheck(capsys):
    assert cli.main(["orbit", "--n", "2", "--steps", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    first, second = lines[2].split(","), lines[3].split(",")
    assert first[0] == "1" and float(first[-1]) < 1e-6
    assert float(first[5]) <= 1e-8 and float(first[6]) <= 1e-8
    # the second step lands at n = 0 where nothing can be extracted
    assert second[0] == "2" and second[-1] == ""


def test_orbit_too_many_steps(capsys):
    assert cli.main(["orbit", "--steps", "2", "--n", "1"]) == 2


def test_verify_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--suite", "special", "--seed", "3", "--out", str(first)]) == 0
    assert cli.main(["verify", "--suite", "special", "--seed", "3", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    report = load_json(first)
    assert report["passed"] is True
    assert [s["suite"] for s in report["suites"]] == ["special"]
    assert load_json(tmp_path / "missing.json") is None


def test_run_log_lines(tmp_path, capsys):
    log = tmp_path / "logs" / "runs.jsonl"
    cli.main(["theta", "--x", "0.5", "--log", str(log)])
    cli.main(["theta", "--x", "0.5", "--p", "2", "--log", str(log)])
    lines = [json.loads(line) for line in log.read_text(encoding="utf-8").splitlines()]
    assert [line["exit_code"] for line in lines] == [0, 2]
    assert lines[0]["event"] == "theta"
    assert lines[0]["timestamp"].endswith("Z")


def test_file_logging_from_environment(tmp_path, monkeypatch, capsys):
    log = tmp_path / "epl.log"
    monkeypatch.setenv(ENV_LOG_PATH, str(log))
    out = tmp_path / "theta.json"
    try:
        assert cli.main(["theta", "--x", "0.5", "--out", str(out)]) == 0
        assert out.exists()
        assert "wrote" in log.read_text(encoding="utf-8")
    finally:
        epl_logger = logging.getLogger("epl")
        for handler in list(epl_logger.handlers):
            if isinstance(handler, RotatingFileHandler):
                epl_logger.removeHandler(handler)
                handler.close()
        epl_logger.setLevel(logging.NOTSET)


@pytest.mark.parametrize("suite", ["det", "weyl", "all"])
def test_verify_suites(capsys, suite):
    code, report = _run_json(capsys, ["verify", "--suite", suite])
    assert code == 0
    assert report["passed"] is True
    names = [s["suite"] for s in report["suites"]]
    assert names == (list(cli.SUITE_NAMES) if suite == "all" else [suite])


def test_unknown_profile_is_a_domain_error(capsys):
    assert cli.main(["verify", "--suite", "special", "--profile", "huge"]) == 2


def test_division_by_zero_is_a_numerical_failure(monkeypatch, capsys):
    def divide(args, cfg):
        return 1 // 0

    monkeypatch.setitem(cli.COMMANDS, "theta", divide)
    assert cli.main(["theta", "--x", "0.5"]) == 3
    assert "NumericalFailure: division by zero" in capsys.readouterr().err
