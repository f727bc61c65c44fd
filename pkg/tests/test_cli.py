"""Tests for the command-line verification suites."""

import argparse
import json
import subprocess
import sys

import pytest

from ebcompose import cli

FAST_COMMANDS = [
    ["verify-example", "rank3"],
    ["verify-example", "holevo-werner", "--d", "3", "--p", "0.25"],
    ["verify-example", "holevo-werner", "--d", "2", "--p", "0.9"],
    ["verify-example", "antisym", "--d", "2"],
    ["verify-example", "antisym", "--d", "3"],
    ["verify-example", "tau-n", "--d", "2", "--n", "2"],
    ["verify-example", "tau-n", "--d", "3", "--n", "1"],
    ["verify-example", "choi-witness"],
    ["verify-example", "switch", "--d", "2", "--seed", "3"],
    ["gaussian", "--n", "1", "--seed", "4"],
    ["gaussian", "--n", "2", "--seed", "5"],
]


class TestCommands:
    @pytest.mark.parametrize("argv", FAST_COMMANDS, ids=" ".join)
    def test_suites_pass(self, argv, capsys):
        assert cli.main(argv) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert "FAIL" not in out

    def test_domain_error_exits_2(self, capsys):
        assert cli.main(["verify-example", "tau-n", "--d", "3", "--n", "3"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_parameter_exits_2(self, capsys):
        assert cli.main(["verify-example", "holevo-werner", "--p", "1.5"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_example_rejected(self):
        with pytest.raises(SystemExit):
            cli.main(["verify-example", "mystery"])

    def test_missing_command_rejected(self):
        with pytest.raises(SystemExit):
            cli.main([])

    def test_boundary_p_skips_sharp_checks(self, capsys):
        d = 4
        assert cli.main(["verify-example", "holevo-werner", "--d", "4", "--p", str(1.0 / d)]) == 0
        assert "[SKIP] cocp-at-p" in capsys.readouterr().out


class TestJsonReport:
    def test_report_shape(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert cli.main(["verify-example", "rank3", "--json-out", str(out)]) == 0
        capsys.readouterr()
        report = json.loads(out.read_text())
        assert report["op"] == "verify-example:rank3"
        assert report["verdict"] == "pass"
        assert report["tolerances"] == {"tol_psd": 1e-9}
        assert len(report["evidence"]) == 4
        assert all({"name", "passed", "data"} <= set(c) for c in report["evidence"])

    def test_failing_suite_reports_fail(self, tmp_path, capsys):
        args = argparse.Namespace(json_out=str(tmp_path / "bad.json"), seed=0, tol_psd=1e-9)
        code = cli._run("demo", lambda a: [{"name": "x", "passed": False, "data": {}}], args)
        assert code == 1
        assert "CHECKS FAILED" in capsys.readouterr().out
        assert json.loads((tmp_path / "bad.json").read_text())["verdict"] == "fail"


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ebcompose.cli", "verify-example", "switch", "--d", "2"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "all checks passed" in proc.stdout
