"""命令行入口与退出码测试"""

import json
import sys

import pytest

from madelung_lab.cli import main
from madelung_lab.core.runners.acceptance_runner import RUNTIME_BUDGETS


def _run(monkeypatch, *argv):
    monkeypatch.setattr(sys, "argv", ["madelung-lab", *argv])
    with pytest.raises(SystemExit) as excinfo:
        main()
    return excinfo.value.code


def _dirs(tmp_path):
    return ["--output_dir", str(tmp_path / "out"), "--log_dir", str(tmp_path / "logs")]


class TestExitCodes:
    """0 通过, 2 配置错误, 3 数值错误"""

    def test_verify_lp_passes(self, monkeypatch, tmp_path):
        code = _run(monkeypatch, "verify-lp", "--L", "40", "--N", "512", "--samples", "2", *_dirs(tmp_path))
        assert code == 0
        assert (tmp_path / "out" / "report.json").exists()

    def test_bad_grid_is_config_error(self, monkeypatch, tmp_path, capsys):
        code = _run(monkeypatch, "verify-lp", "--N", "100", *_dirs(tmp_path))
        assert code == 2
        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert error["error"] == "ConfigError"
        assert error["exit_code"] == 2

    def test_vacuum_breach_is_numeric_error(self, monkeypatch, tmp_path, capsys):
        code = _run(monkeypatch, "simulate-hgp", "--init", "qdelta:0.5", "--rho_floor", "0.5",
                    "--N", "256", "--T", "0.01", *_dirs(tmp_path))
        assert code == 3
        error = json.loads((tmp_path / "out" / "error.json").read_text(encoding="utf-8"))
        assert error["error"] == "VacuumBreachError"
        assert error["value"] == pytest.approx(0.25)

    def test_no_command_prints_help(self, monkeypatch, capsys):
        monkeypatch.setattr(sys, "argv", ["madelung-lab"])
        main()
        assert "usage" in capsys.readouterr().out

    def test_soliton_energy(self, monkeypatch, tmp_path):
        code = _run(monkeypatch, "soliton-energy", "--delta", "0.5", "--L", "60", "--N", "4096", *_dirs(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
        assert report["results"]["b_tilde"] == pytest.approx(5.0 / 12.0)
        assert {a["provenance"] for a in report["assertions"]} <= {"PAPER", "TRIVIAL", "DERIVED"}


class TestAcceptance:
    """验收套件的 quick 模式"""

    def test_every_criterion_has_a_budget_entry(self):
        assert set(RUNTIME_BUDGETS) == set(range(1, 11))
        assert RUNTIME_BUDGETS[5] is None

    @pytest.mark.slow
    def test_quick_suite_passes(self, monkeypatch, tmp_path):
        code = _run(monkeypatch, "acceptance", "--quick", "--seed", "0", *_dirs(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
        assert report["assertions"] and all(a["passed"] for a in report["assertions"])
        assert set(report["results"]) >= {"black_soliton", "gp_conservation", "littlewood_paley", "round_trips"}
        summary = (tmp_path / "out" / "acceptance_summary.csv").read_text(encoding="utf-8").splitlines()
        assert len(summary) == 11
        assert "budget" in summary[0] and "within_budget" in summary[0]
