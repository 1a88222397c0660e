import io
import json
import pytest

from cli import (
    EXIT_FAILED, EXIT_OK, EXIT_UNKNOWN, ROW_CAP_ENV, RunConfig, TextSink, build_parser, format_record, main,
    resolve_run_config,
)
from config_manager import ConfigManager
from qseries_types import STATUS_EQUAL, STATUS_MISMATCH, MismatchDetail, VerificationRecord, VerificationReport


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    """Keep the repository's config/config.toml out of every test"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(ROW_CAP_ENV, raising=False)
    return tmp_path


def run_cli(*argv):
    stream = io.StringIO()
    code = main(list(argv), stream=stream)
    return code, stream.getvalue()


def test_expand_classical_mock():
    code, output = run_cli("expand", "omega", "--order", "3")
    assert code == EXIT_OK
    assert output.strip() == "1 + 2*q + 3*q^2 + 4*q^3"


def test_expand_several_targets_are_labelled():
    code, output = run_cli("expand", "omega", "J1", "--order", "2")
    assert code == EXIT_OK
    lines = output.strip().splitlines()
    assert lines[0] == "omega: 1 + 2*q + 3*q^2"
    assert lines[1] == "J1: 1 - q - q^2"


def test_expand_json():
    code, output = run_cli("expand", "--ids", "omega", "--order", "2", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(output)
    assert payload["command"] == "expand"
    assert payload["order"] == 2
    assert payload["series"][0]["id"] == "omega"


def test_expand_unknown_id(capsys):
    code, _ = run_cli("expand", "M99")
    assert code == EXIT_UNKNOWN
    assert "unknown id: M99" in capsys.readouterr().err


def test_expand_without_target():
    code, _ = run_cli("expand")
    assert code == EXIT_UNKNOWN


def test_unknown_chain():
    code, _ = run_cli("derive", "--chain", "nope", "--executor", "thread")
    assert code == EXIT_UNKNOWN


def test_derive_chain_passes():
    code, output = run_cli("derive", "--chain", "bk-to-andrews", "--order", "12", "--nmax", "3",
                           "--executor", "thread")
    assert code == EXIT_OK
    summary = output.strip().splitlines()[-1]
    assert summary.startswith("derive: ")
    assert summary.endswith("0 mismatch, 0 error")
    assert "andrews0" in output


def test_unknown_pair_id():
    code, _ = run_cli("pair-check", "--ids", "nope", "--executor", "thread")
    assert code == EXIT_UNKNOWN


def test_pair_check_text_report():
    code, output = run_cli("pair-check", "--ids", "bk,unit", "--order", "8", "--nmax", "2",
                           "--executor", "thread", "--workers", "2")
    assert code == EXIT_OK
    lines = output.strip().splitlines()
    assert len(lines) == 5
    assert all(line.startswith("EQUAL") for line in lines[:4])
    assert lines[-1] == "pair-check: 4 checks, 4 equal, 0 mismatch, 0 error"


def test_verify_identity_json_report():
    code, output = run_cli("verify", "--set", "identities", "--ids", "M5", "--order", "10",
                           "--format", "json", "--executor", "thread")
    assert code == EXIT_OK
    report = VerificationReport.from_json(output)
    assert report.command == "verify"
    assert report.all_equal
    assert {record.id for record in report.records} == {"M5"}


def test_missing_config_file(capsys):
    code, _ = run_cli("expand", "omega", "--config", "missing.toml")
    assert code == EXIT_FAILED
    assert "Configuration file not found" in capsys.readouterr().err


def test_invalid_order(capsys):
    code, _ = run_cli("expand", "omega", "--order", "0")
    assert code == EXIT_FAILED
    assert "order must be at least 1" in capsys.readouterr().err


def test_save_config(isolated_cwd):
    config_file = isolated_cwd / "qmock.toml"
    config_file.write_text("[verification]\norder = 40\n")

    code, _ = run_cli("expand", "omega", "--order", "5", "--format", "json",
                      "--config", str(config_file), "--save-config")

    assert code == EXIT_OK
    stored = ConfigManager(str(config_file)).verification_config
    assert stored.order == 5
    assert stored.format == "json"


def test_default_config_file_is_used(isolated_cwd):
    (isolated_cwd / "config").mkdir()
    (isolated_cwd / "config" / "config.toml").write_text("[verification]\norder = 4\n")
    code, output = run_cli("expand", "omega")
    assert code == EXIT_OK
    assert output.strip() == "1 + 2*q + 3*q^2 + 4*q^3 + 5*q^4"


@pytest.mark.parametrize("argv, env, expected", [
    (["verify"], None, None),
    (["verify"], "7", 7),
    (["verify", "--row-cap", "3"], "7", 3),
    (["verify", "--row-cap", "0"], "7", None),
])
def test_row_cap_precedence(monkeypatch, argv, env, expected):
    if env is not None:
        monkeypatch.setenv(ROW_CAP_ENV, env)
    args = build_parser().parse_args(argv)
    run_config = resolve_run_config(args, ConfigManager(None))
    assert run_config.row_cap == expected


def test_bad_row_cap_environment(monkeypatch):
    monkeypatch.setenv(ROW_CAP_ENV, "lots")
    code, _ = run_cli("expand", "omega")
    assert code == EXIT_FAILED


def test_flags_override_config_defaults():
    args = build_parser().parse_args(["pair-check", "--order", "12", "--ids", "bk, unit"])
    run_config = resolve_run_config(args, ConfigManager(None))
    assert run_config == RunConfig(command="pair-check", order=12, n_max=10, ids=["bk", "unit"])


def test_format_record_mismatch():
    record = VerificationRecord("M3", "double_sum=hecke_form", STATUS_MISMATCH, 20,
                                MismatchDetail(7, 2, 3), elapsed_ms=1.25, detail="coefficient")
    assert format_record(record) == (
        "MISMATCH M3 double_sum=hecke_form (order 20, 1.2 ms) first mismatch at q^7: 2 != 3 [coefficient]"
    )


def test_text_sink_streams_records():
    stream = io.StringIO()
    sink = TextSink(stream)
    record = VerificationRecord("bk", "pair_relation", STATUS_EQUAL, 8)
    sink.on_record(record)
    sink.on_finished(VerificationReport("pair-check", [record]))
    assert stream.getvalue().splitlines() == [
        "EQUAL    bk pair_relation (order 8, 0.0 ms)",
        "pair-check: 1 checks, 1 equal, 0 mismatch, 0 error",
    ]
