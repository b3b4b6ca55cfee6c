"""End-to-end checks of the command-line front end.

Exercises exit codes, the three output formats, golden checking and the
diagnostic commands through ``main(argv)``.
"""

import csv
import io
import json
import logging
from decimal import Decimal
from unittest.mock import patch

import pytest

from mellin_sampling_core import main as package_main
from mellin_sampling_core.cli import (
    EXIT_CHECK,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    FIELDS,
    format_fixed,
    format_sci,
    main,
    render,
)
from mellin_sampling_core.exceptions import ConvergenceError
from mellin_sampling_core.kernels import ConditionReport
from mellin_sampling_core.tables import Mismatch

# -------------------- helpers -------------------- #


def _json_rows(capsys):
    return json.loads(capsys.readouterr().out)


def _by_param(rows):
    return {r["param"]: r for r in rows}


# ------------------------------------------------- #


@pytest.fixture(autouse=True)
def _no_log_dir(monkeypatch):
    monkeypatch.delenv("MELLIN_LOG_DIR", raising=False)


# -------------------- tables -------------------- #


def test_table1_csv(capsys):
    assert main(["table1", "--output", "csv"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 16
    assert rows[0]["param"] == "1a:N=20"
    assert rows[8]["param"] == "1b:w=16"
    assert float(rows[0]["value"]) == pytest.approx(0.0220621711295, abs=5e-13)
    assert float(rows[8]["value"]) == pytest.approx(0.02203184447881, abs=6e-14)


def test_single_table_json(capsys):
    assert main(["table2", "--table", "2a", "--output", "json"]) == EXIT_OK
    rows = _json_rows(capsys)
    assert len(rows) == 7
    assert all(tuple(r) == FIELDS for r in rows)
    assert rows[0]["param"] == "N=160"


def test_command_flag_is_accepted(capsys):
    assert main(["--command", "table2", "--table", "2a", "--output", "json"]) == EXIT_OK
    assert len(_json_rows(capsys)) == 7


def test_text_output_has_titles(capsys):
    assert main(["table1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# 1a")
    assert "# 1b" in out
    assert "param" in out.splitlines()[1]


def test_check_passes_with_known_errata(capsys, caplog):
    with caplog.at_level(logging.INFO, logger="mellin_sampling_core"):
        assert main(["table2", "--check"]) == EXIT_OK
    assert "known erratum" in caplog.text
    assert "SUCCESS" in caplog.text


def test_check_failure_exits_2(capsys, caplog):
    miss = Mismatch(20, 0.1, Decimal("0.2"), 0.1)
    with caplog.at_level(logging.ERROR, logger="mellin_sampling_core"), patch(
        "mellin_sampling_core.cli.compare_golden", return_value=[miss]
    ):
        rc = main(["table1", "--table", "1a", "--check"])
    assert rc == EXIT_CHECK
    assert "check failed" in caplog.text
    assert capsys.readouterr().out == ""


def test_logx_override(capsys, caplog):
    with caplog.at_level(logging.WARNING, logger="mellin_sampling_core"):
        assert main(["table1", "--logx", "0", "--check", "--output", "json"]) == EXIT_OK
    rows = _json_rows(capsys)
    assert {r["value"] for r in rows[:8]} == {"0.5000000000000"}
    assert {r["value"] for r in rows[8:]} == {"0.50000000000000"}
    assert "skipping" in caplog.text


def test_precision_flag(capsys):
    assert main(["table1", "--table", "1a", "--precision", "3", "--output", "json"]) == EXIT_OK
    assert {r["value"] for r in _json_rows(capsys)} == {"0.022"}


# -------------------- exit codes -------------------- #


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["table1", "--precision", "0"],
        ["table1", "--command", "table2"],
        ["table1", "--workers", "0"],
        ["table1", "--output", "xml"],
    ],
)
def test_usage_errors_exit_64(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_missing_env_file_exits_64(tmp_path, capsys):
    assert main(["table1", "--env-file", str(tmp_path / "missing.env")]) == EXIT_USAGE


def test_numerical_error_exits_70(capsys, caplog):
    boom = ConvergenceError("quadrature stalled", last_estimate=0.0, err_est=1.0)
    with caplog.at_level(logging.ERROR, logger="mellin_sampling_core"), patch(
        "mellin_sampling_core.cli.run_rows", side_effect=boom
    ):
        assert main(["table1"]) == 70
    assert "quadrature stalled" in caplog.text


@pytest.mark.parametrize(
    "argv",
    [
        ["table1", "--table", "1a", "--logx", "800"],
        ["table1", "--table", "1a", "--logx", "-800"],
        ["moments", "--kernel", "b2", "--logx", "800"],
        ["voronovskaja", "--kernel", "jackson", "--logx", "800"],
    ],
)
def test_unrepresentable_x_exits_70(argv, capsys, caplog):
    with caplog.at_level(logging.ERROR, logger="mellin_sampling_core"):
        assert main(argv) == EXIT_NUMERIC
    assert capsys.readouterr().out == ""
    assert "e^" in caplog.text


def test_floating_point_error_exits_70(capsys, caplog):
    with caplog.at_level(logging.ERROR, logger="mellin_sampling_core"), patch(
        "mellin_sampling_core.cli.run_rows", side_effect=OverflowError("math range error")
    ):
        assert main(["table1"]) == EXIT_NUMERIC
    assert "OverflowError" in caplog.text


@pytest.mark.parametrize("value", ["four", "2.5", ""])
def test_bad_worker_env_exits_64(monkeypatch, capsys, value):
    monkeypatch.setenv("MELLIN_WORKERS", value)
    assert main(["table1", "--table", "1a"]) == EXIT_USAGE
    assert "MELLIN_WORKERS" in capsys.readouterr().err


def test_package_entry_point(capsys):
    assert package_main(["table1", "--table", "1a", "--output", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.startswith(",".join(FIELDS))


# -------------------- diagnostics -------------------- #


def test_kernel_check_b2(capsys):
    assert main(["kernel-check", "--kernel", "b2", "--output", "json"]) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert float(rows["partition_max_dev"]["value"]) <= 1e-14
    assert float(rows["m_1"]["value"]) == pytest.approx(0.0, abs=1e-13)
    assert "tail r=1" in rows


def test_kernel_check_flags_divergent_fejer_moment(capsys):
    argv = ["kernel-check", "--kernel", "fejer", "--order", "1", "--points", "33", "--output", "json"]
    assert main(argv) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert rows["M_1"]["value"] == "divergent"
    assert float(rows["partition_max_dev"]["value"]) < 1e-8


def test_kernel_check_failure_exits_2(capsys):
    bad = ConditionReport(
        partition_max_dev=1e-3,
        M0=1.0,
        tail_profile=[],
        moment_x_variation={},
        moments={},
    )
    with patch("mellin_sampling_core.cli.condition_report", return_value=bad):
        assert main(["kernel-check", "--kernel", "b2", "--order", "0"]) == EXIT_CHECK


def test_moments_b2(capsys):
    assert main(["moments", "--kernel", "b2", "--logx", "0.3", "--output", "json"]) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert list(rows) == ["m_0", "M_0", "m_1", "M_1", "m_2", "M_2"]
    assert float(rows["m_2"]["value"]) == pytest.approx(0.21, abs=1e-13)


def test_moments_fejer_report_divergence(capsys):
    assert main(["moments", "--kernel", "fejer", "--order", "1", "--output", "json"]) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert rows["m_1"]["value"] == "divergent"
    assert rows["M_1"]["value"] == "divergent"
    assert float(rows["m_0"]["value"]) == pytest.approx(1.0, abs=1e-4)


def test_rates(capsys):
    assert main(["rates", "--table", "1a", "--output", "json"]) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert float(rows["slope"]["value"]) == pytest.approx(-3.0, abs=0.3)
    assert rows["slope"]["reference"] == "-3.0000"


def test_voronovskaja_jackson(capsys, caplog):
    with caplog.at_level(logging.INFO, logger="mellin_sampling_core"):
        assert main(["voronovskaja", "--kernel", "jackson", "--norm-mode", "paper", "--output", "json"]) == EXIT_OK
    rows = _by_param(_json_rows(capsys))
    assert float(rows["limit"]["value"]) == pytest.approx(-0.688794, rel=0.05)
    assert "exact Jackson constant" in caplog.text


# -------------------- logging and env -------------------- #


def test_log_file_is_written(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MELLIN_LOG_DIR", str(tmp_path))
    assert main(["table1", "--table", "1a"]) == EXIT_OK
    logs = list(tmp_path.glob("*.log"))
    assert len(logs) == 1
    assert "SUCCESS" in logs[0].read_text(encoding="utf-8")


def test_env_file_is_loaded(tmp_path, monkeypatch, capsys):
    log_dir = tmp_path / "logs"
    env = tmp_path / "run.env"
    env.write_text(f"MELLIN_LOG_DIR={log_dir}\n", encoding="utf-8")
    # registered so the variable loaded from the file is removed afterwards
    monkeypatch.setenv("MELLIN_LOG_DIR", "unset")
    monkeypatch.delenv("MELLIN_LOG_DIR")
    assert main(["table1", "--table", "1a", "--env-file", str(env)]) == EXIT_OK
    assert list(log_dir.glob("*.log"))


# -------------------- formatting -------------------- #


def test_format_fixed_rounds_half_even():
    assert format_fixed(0.125, 2) == "0.12"
    assert format_fixed(0.375, 2) == "0.38"


def test_format_fixed_never_negative_zero():
    assert format_fixed(-1e-20, 3) == "0.000"


def test_format_fixed_stays_positional():
    assert format_fixed(1e-7, 13) == "0.0000001000000"


def test_format_sci():
    assert format_sci(0.000123456, 3) == "1.235e-04"


def test_render_csv_roundtrip():
    rows = [{"param": "N=20", "value": "0.1", "reference": "0.2", "abs_err": "1.000e-01"}]
    assert list(csv.DictReader(io.StringIO(render(rows, "csv")))) == rows
