import pytest
import pytest_asyncio
import httpx
from unittest.mock import AsyncMock, Mock, patch
from typing import AsyncGenerator

from config_manager import NtfyConfig
from notification_manager import NotificationManager, RunSummary
from qseries_types import STATUS_EQUAL, STATUS_ERROR, STATUS_MISMATCH, VerificationRecord, VerificationReport


@pytest.fixture
def ntfy_config() -> NtfyConfig:
    """Create a test configuration"""
    return NtfyConfig(
        enabled=True,
        server="https://ntfy.sh",
        topic="test-topic",
        username="test-user",
        password="test-pass",
        priority="default",
        tags=["test", "abacus"]
    )


@pytest_asyncio.fixture
async def notification_manager(ntfy_config: NtfyConfig) -> AsyncGenerator[NotificationManager, None]:
    """Create a notification manager with test configuration"""
    manager = NotificationManager(ntfy_config)
    yield manager


def ok_response() -> Mock:
    return Mock(status_code=200, raise_for_status=Mock())


def report_with(*statuses) -> VerificationReport:
    return VerificationReport("verify", [
        VerificationRecord(f"M{i}", "double_sum=hecke_form", status, 40) for i, status in enumerate(statuses)
    ])


def summary_with(*statuses) -> RunSummary:
    return RunSummary.from_report(report_with(*statuses))


@pytest.mark.asyncio
async def test_send_notification_success(notification_manager: NotificationManager):
    """Test successful notification sending"""
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        mock_post.return_value = ok_response()

        result = await notification_manager.send_notification(summary_with(STATUS_EQUAL, STATUS_EQUAL))

        assert result is True
        mock_post.assert_called_once()

        call_args = mock_post.call_args
        assert call_args.args[0] == "https://ntfy.sh/test-topic"
        assert call_args.kwargs['content'] == "verify: 2 equal, 0 mismatch, 0 error"
        assert call_args.kwargs['headers']['Title'] == "qmock verify passed"
        assert call_args.kwargs['headers']['Priority'] == "default"
        assert call_args.kwargs['headers']['Tags'] == "test,abacus,white_check_mark,verify"


@pytest.mark.asyncio
async def test_failing_run_headers(notification_manager: NotificationManager):
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        mock_post.return_value = ok_response()

        await notification_manager.send_notification(summary_with(STATUS_EQUAL, STATUS_MISMATCH, STATUS_ERROR))

        headers = mock_post.call_args.kwargs['headers']
        assert headers['Title'] == "qmock verify failed"
        assert headers['Priority'] == "high"
        assert headers['Tags'] == "test,abacus,x,warning,verify"


@pytest.mark.asyncio
async def test_send_notification_network_error(notification_manager: NotificationManager):
    """Test notification sending with network error"""
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        mock_post.side_effect = httpx.NetworkError("Test network error")

        result = await notification_manager.send_notification(summary_with(STATUS_EQUAL))

        assert result is False


@pytest.mark.asyncio
async def test_send_notification_timeout(notification_manager: NotificationManager):
    """Test notification sending with timeout"""
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        mock_post.side_effect = httpx.TimeoutException("Test timeout")

        result = await notification_manager.send_notification(summary_with(STATUS_EQUAL))

        assert result is False


@pytest.mark.asyncio
async def test_notification_authentication(notification_manager: NotificationManager):
    """Test notification sending with authentication"""
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        mock_post.return_value = ok_response()

        result = await notification_manager.send_notification(summary_with(STATUS_EQUAL))

        assert result is True
        assert isinstance(mock_post.call_args.kwargs['auth'], httpx.BasicAuth)


@pytest.mark.asyncio
async def test_disabled_notifications_send_nothing(ntfy_config: NtfyConfig):
    ntfy_config.enabled = False
    manager = NotificationManager(ntfy_config)
    with patch('httpx.AsyncClient.post', new_callable=AsyncMock) as mock_post:
        assert await manager.send_notification(summary_with(STATUS_EQUAL)) is False
        mock_post.assert_not_called()


@pytest.mark.asyncio
async def test_notify_report_sends_the_run_summary(notification_manager: NotificationManager):
    with patch.object(notification_manager, 'send_notification', new_callable=AsyncMock) as send:
        send.return_value = True
        assert await notification_manager.notify_report(report_with(STATUS_EQUAL, STATUS_MISMATCH)) is True

        summary = send.call_args.args[0]
        assert summary == RunSummary("verify", total=2, equal=1, mismatch=1, error=0, failing=["M1"])


def test_summary_lists_failures():
    summary = summary_with(STATUS_EQUAL, *[STATUS_MISMATCH] * 7)
    assert summary.message.startswith("verify: 1 equal, 7 mismatch, 0 error")
    assert "Failing: M1, M2, M3, M4, M5 and 2 more" in summary.message


@pytest.mark.parametrize("statuses, priority", [
    ((STATUS_EQUAL,), "default"),
    ((STATUS_EQUAL, STATUS_ERROR), "high"),
    ((STATUS_MISMATCH,) * 4, "high"),
    ((STATUS_MISMATCH,) * 5, "urgent"),
])
def test_priority_follows_failure_counts(statuses, priority):
    assert summary_with(*statuses).priority("default") == priority


def test_tags_describe_the_outcome():
    assert summary_with(STATUS_EQUAL).tags() == ["white_check_mark", "verify"]
    assert summary_with(STATUS_MISMATCH).tags() == ["x", "verify"]
    assert summary_with(STATUS_ERROR).tags() == ["warning", "verify"]
