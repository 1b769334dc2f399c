import json
import subprocess
import sys

import pytest

from f2amalgam.cli import ExperimentConfig, cmd_existence, cmd_exactness, cmd_uniqueness, main


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr().out


def test_exactness_json(capsys):
    code, out = run(["exactness", "--n", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and set(data) == {"meta", "checks"}
    rows = [c for c in data["checks"] if c["name"] == "exactness"]
    assert [c["params"]["N"] for c in rows] == list(range(3, 9))
    assert all(c["observed"]["composite_zero"] and c["ms"] is None for c in rows)
    for c in data["checks"]:
        assert set(c) == {"name", "params", "expected", "observed", "pass", "ms"}


def test_uniqueness_pattern():
    report = cmd_uniqueness(ExperimentConfig(ns=(2, 3)))
    pattern = [(c["params"]["n"], c["params"]["k"], c["observed"]["unique"]) for c in report.checks]
    assert pattern == [(2, 2, True), (2, 3, False), (3, 2, True), (3, 3, True), (3, 4, False)]
    assert report.passed
    assert report.checks[1]["observed"]["order_constrained"] == 1
    assert report.checks[1]["observed"]["order_free"] == 2


def test_existence_pattern():
    report = cmd_existence(ExperimentConfig(ns=(2,)))
    names = [(c["name"], c["params"]["k"]) for c in report.checks]
    assert names == [("existence", 2), ("existence", 3), ("existence_twisted", 4)]
    twisted = report.checks[-1]["observed"]
    assert twisted["parity_brute_force"] is False and twisted["exhaustive_solution"] is False
    assert twisted["control_solution"] and report.passed


def test_k_max_limits_suite():
    report = cmd_existence(ExperimentConfig(ns=(2,), k_max=2))
    assert [c["params"]["k"] for c in report.checks] == [2]


def test_windows_flag(capsys):
    code, out = run(["coincide", "--n", "2", "--window", "5", "6"], capsys)
    data = json.loads(out)
    assert code == 0
    assert [c["params"]["N"] for c in data["checks"] if c["name"] == "coincide"] == [5, 6]


def test_markdown_and_out_file(tmp_path, capsys):
    target = tmp_path / "u.md"
    code, out = run(["uniqueness", "--n", "2", "--format", "markdown", "--out", str(target)], capsys)
    assert code == 0 and target.read_text() == out
    assert out.startswith("# f2amalgam uniqueness") and "| uniqueness |" in out


def test_env_out_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("F2AMALGAM_OUT_DIR", str(tmp_path))
    code, out = run(["exactness", "--n", "3"], capsys)
    assert code == 0 and (tmp_path / "exactness.json").read_text() == out


def test_timings_are_opt_in(capsys):
    _, out = run(["exactness", "--n", "2", "--timings"], capsys)
    assert all(c["ms"] is not None for c in json.loads(out)["checks"] if c["name"] == "exactness")


def test_bad_arguments(capsys):
    for args in (["exactness", "--n", "1"], ["uniqueness", "--window", "3"], ["existence", "--k-max", "1"]):
        with pytest.raises(SystemExit) as exc:
            main(args)
        assert exc.value.code == 2


def test_exit_code_reflects_failures(monkeypatch, capsys):
    from f2amalgam import cli

    def broken(n, N):
        rec = cli._cell_exactness(n, N)
        rec["pass"] = False
        return rec

    monkeypatch.setattr(cli, "_exactness_cells", lambda config: [(broken, 2, 5)])
    code, _ = run(["exactness", "--n", "2"], capsys)
    assert code == 1


def test_jobs_give_same_report():
    a = cmd_exactness(ExperimentConfig(ns=(2, 3)))
    b = cmd_exactness(ExperimentConfig(ns=(2, 3), jobs=2))
    assert a.to_json() == b.to_json()


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "f2amalgam", "exactness", "--n", "2", "--format", "markdown"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert "| exactness |" in out.stdout
