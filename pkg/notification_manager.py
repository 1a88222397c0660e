from dataclasses import dataclass, field
from typing import Dict, List
import httpx
import logging
from config_manager import NtfyConfig
from qseries_types import STATUS_EQUAL, VerificationReport

logger = logging.getLogger(__name__)

# Failing ids listed in a run summary before truncating.
MAX_LISTED_FAILURES = 5
# Mismatch count from which a run is sent as urgent.
URGENT_MISMATCHES = 5


@dataclass
class RunSummary:
    """Counts and failing ids of one verify, derive or pair-check run"""
    command: str
    total: int = 0
    equal: int = 0
    mismatch: int = 0
    error: int = 0
    failing: List[str] = field(default_factory=list)

    @classmethod
    def from_report(cls, report: VerificationReport) -> 'RunSummary':
        counts = report.summary
        return cls(
            command=report.command,
            total=counts['total'],
            equal=counts['equal'],
            mismatch=counts['mismatch'],
            error=counts['error'],
            failing=list(dict.fromkeys(r.id for r in report.records if r.status != STATUS_EQUAL)),
        )

    @property
    def passed(self) -> bool:
        return self.mismatch == 0 and self.error == 0

    @property
    def title(self) -> str:
        if self.passed:
            return f"qmock {self.command} passed"
        return f"qmock {self.command} failed"

    @property
    def message(self) -> str:
        message = f"{self.command}: {self.equal} equal, {self.mismatch} mismatch, {self.error} error"
        if self.failing:
            listed = ", ".join(self.failing[:MAX_LISTED_FAILURES])
            more = len(self.failing) - MAX_LISTED_FAILURES
            message += f"\nFailing: {listed}" + (f" and {more} more" if more > 0 else "")
        return message

    def priority(self, default: str) -> str:
        """Urgent from URGENT_MISMATCHES mismatches on, high for any other failure."""
        if self.mismatch >= URGENT_MISMATCHES:
            return "urgent"
        if self.mismatch or self.error:
            return "high"
        return default

    def tags(self) -> List[str]:
        tags = []
        if self.mismatch:
            tags.append("x")
        if self.error:
            tags.append("warning")
        if self.passed:
            tags.append("white_check_mark")
        tags.append(self.command)
        return tags


class NotificationManager:
    """Sends verification run summaries via ntfy"""

    def __init__(self, config: NtfyConfig):
        """Initialize notification manager

        Args:
            config: NtfyConfig instance with notification settings
        """
        self.config = config

    def _headers(self, summary: RunSummary) -> Dict[str, str]:
        # configured tags first, duplicates dropped
        all_tags = list(dict.fromkeys(list(self.config.tags or []) + summary.tags()))
        return {
            "Title": summary.title,
            "Priority": summary.priority(self.config.priority),
            "Tags": ",".join(all_tags),
        }

    async def send_notification(self, summary: RunSummary) -> bool:
        """Post one run summary to the configured topic

        Args:
            summary: Counts of the finished run; they decide title, priority and tags

        Returns:
            bool: True if notification was sent successfully
        """
        logger.info(f"Sending notification: {summary.message}")
        if not self.config.enabled:
            logger.debug("Notifications are disabled")
            return False

        try:
            url = f"{self.config.server}/{self.config.topic}"

            if self.config.username and self.config.password:
                auth = httpx.BasicAuth(self.config.username, self.config.password)
            else:
                auth = None

            async with httpx.AsyncClient() as client:
                response = await client.post(
                    url,
                    content=summary.message,
                    headers=self._headers(summary),
                    auth=auth,
                    timeout=10.0
                )
                response.raise_for_status()

            logger.debug(f"Notification sent for {summary.command}: {summary.total} checks")
            return True

        except Exception as e:
            logger.error(f"Failed to send notification: {e}")
            return False

    async def notify_report(self, report: VerificationReport) -> bool:
        return await self.send_notification(RunSummary.from_report(report))
