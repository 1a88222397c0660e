import pytest
import pytest_asyncio
from pathlib import Path
from typing import AsyncGenerator
from unittest.mock import AsyncMock, patch

from config_manager import ConfigManager
from qseries_types import STATUS_EQUAL, STATUS_ERROR, VerificationRecord, VerificationReport
from verification_runner import VerificationRunner
from verification_suites import Check, pair_checks

ORDER = 8
N_MAX = 2


class RecordingSink:
    def __init__(self):
        self.records = []
        self.reports = []

    def on_record(self, record: VerificationRecord) -> None:
        self.records.append(record)

    def on_finished(self, report: VerificationReport) -> None:
        self.reports.append(report)


def write_config(tmp_path: Path, recording: bool) -> ConfigManager:
    config_file = tmp_path / "config.toml"
    config_file.write_text(f"""
[verification]
executor = "thread"
workers = 2

[ntfy]
enabled = false

[data_recording]
enabled = {"true" if recording else "false"}
path = "{(tmp_path / 'runs.db').as_posix()}"
""")
    return ConfigManager(str(config_file))


@pytest_asyncio.fixture
async def runner(tmp_path) -> AsyncGenerator[VerificationRunner, None]:
    runner = VerificationRunner(write_config(tmp_path, recording=False))
    yield runner
    await runner.cleanup()


@pytest.mark.asyncio
async def test_report_is_sorted_and_streamed(runner: VerificationRunner):
    sink = RecordingSink()
    checks = pair_checks(ORDER, N_MAX, ["slater1", "bk", "unit"])

    report = await runner.run("pair-check", checks, sink)

    assert report.all_equal
    assert [(r.id, r.label) for r in report.records] == [
        ("bk", "alpha_from_beta"), ("bk", "pair_relation"),
        ("slater1", "alpha_from_beta"), ("slater1", "pair_relation"),
        ("unit", "alpha_from_beta"), ("unit", "pair_relation"),
    ]
    assert sorted(sink.records, key=lambda r: r.sort_key) == report.records
    assert sink.reports == [report]


@pytest.mark.asyncio
async def test_failures_do_not_stop_the_batch(runner: VerificationRunner):
    sink = RecordingSink()
    checks = [Check("pair", "nope", "pair", ORDER, N_MAX), Check("pair", "bk", "pair", ORDER, N_MAX)]

    report = await runner.run("pair-check", checks, sink)

    assert not report.all_equal
    assert report.summary["error"] == 1
    assert report.summary["equal"] == 2
    assert report.records[-1].id == "nope"
    assert report.records[-1].status == STATUS_ERROR


@pytest.mark.asyncio
async def test_summary_is_sent_as_notification(runner: VerificationRunner):
    with patch.object(runner.notification_manager, 'notify_report', new_callable=AsyncMock) as notify:
        report = await runner.run("pair-check", pair_checks(ORDER, N_MAX, ["unit"]), RecordingSink())
    notify.assert_awaited_once_with(report)


@pytest.mark.asyncio
async def test_thread_executor_from_config(runner: VerificationRunner):
    await runner.run("pair-check", [], RecordingSink())
    assert runner.executor is not None
    assert runner.executor._max_workers == 2


@pytest.mark.asyncio
async def test_run_is_recorded_in_database(tmp_path):
    runner = VerificationRunner(write_config(tmp_path, recording=True))
    try:
        report = await runner.run("pair-check", pair_checks(ORDER, N_MAX, ["bk"]), RecordingSink(),
                                  suite="pairs", order=ORDER, n_max=N_MAX)
        assert runner.run_id is not None

        rows = await runner.db_manager.get_run_records(runner.run_id)
        assert [(row[0], row[1], row[2]) for row in rows] == [
            (r.id, r.label, STATUS_EQUAL) for r in report.records
        ]
        summary = await runner.db_manager.get_run_summary(runner.run_id)
        assert summary["status"] == "passed"
        assert summary["suite"] == "pairs"
        assert summary["equal_count"] == 2
    finally:
        await runner.cleanup()
    assert runner.db_manager.connection is None


@pytest.mark.asyncio
async def test_cleanup_without_run(tmp_path):
    runner = VerificationRunner(write_config(tmp_path, recording=False))
    await runner.cleanup()
    assert runner.executor is None
    assert runner.running_tasks == []
