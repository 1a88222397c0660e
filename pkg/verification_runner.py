"""Batch executor that fans verification checks out to a worker pool."""

import asyncio
import logging
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import List, Optional, Sequence

from config_manager import ConfigManager
from database_manager import DatabaseManager
from notification_manager import NotificationManager
from qseries_types import ReportSink, VerificationRecord, VerificationReport
from verification_suites import Check, execute_check

logger = logging.getLogger(__name__)

CLEANUP_TIMEOUT_S = 5.0


class VerificationRunner:
    """Runs checks concurrently, streaming records to a sink and the database."""

    def __init__(self, config_manager: ConfigManager):
        self.config_manager = config_manager
        self.verification_config = config_manager.verification_config
        self.notification_manager = NotificationManager(config_manager.ntfy_config)
        self.db_manager = DatabaseManager(config_manager.data_recording_config)
        self.recording_enabled = config_manager.data_recording_config.enabled
        self.executor: Optional[Executor] = None
        self.running_tasks: List[asyncio.Future] = []
        self.run_id: Optional[int] = None

    def _create_executor(self) -> Executor:
        workers = self.verification_config.workers or os.cpu_count() or 1
        if self.verification_config.executor == "thread":
            logger.debug(f"Using a thread pool with {workers} workers")
            return ThreadPoolExecutor(max_workers=workers)
        logger.debug(f"Using a process pool with {workers} workers")
        return ProcessPoolExecutor(max_workers=workers)

    async def _start_recording(self, command: str, suite: str, order: int, n_max: int) -> None:
        try:
            if not self.db_manager.connection:
                await self.db_manager.initialize()
            self.run_id = await self.db_manager.create_run(command, suite, order, n_max)
            logger.info(f"Recording enabled with run_id: {self.run_id}")
        except Exception as e:
            logger.exception(f"Error enabling recording: {e}")
            raise

    async def run(self, command: str, checks: Sequence[Check], sink: ReportSink, suite: str = "",
                  order: int = 0, n_max: int = 0) -> VerificationReport:
        """Execute every check and return the report sorted by (id, label).

        Records reach ``sink.on_record`` in completion order.
        """
        logger.info(f"Starting {command} with {len(checks)} checks")
        if self.recording_enabled:
            await self._start_recording(command, suite, order, n_max)
        if self.executor is None:
            self.executor = self._create_executor()

        loop = asyncio.get_running_loop()
        self.running_tasks = [loop.run_in_executor(self.executor, execute_check, check) for check in checks]
        records: List[VerificationRecord] = []
        for finished in asyncio.as_completed(self.running_tasks):
            for record in await finished:
                records.append(record)
                sink.on_record(record)
                if self.run_id is not None:
                    await self.db_manager.record_result(self.run_id, record)
        self.running_tasks.clear()

        report = VerificationReport(command, records).sorted()
        if self.run_id is not None:
            await self.db_manager.finish_run(self.run_id, report)
        logger.info(f"{command} finished: {report.summary}")
        await self.notification_manager.notify_report(report)
        sink.on_finished(report)
        return report

    async def cleanup(self) -> None:
        """Cancel outstanding work, stop the pool and close the database."""
        try:
            for task in self.running_tasks:
                if not task.done():
                    task.cancel()
                    try:
                        await asyncio.wait_for(task, timeout=CLEANUP_TIMEOUT_S)
                    except asyncio.CancelledError:
                        logger.debug(f"Task {task} cancelled")
                    except asyncio.TimeoutError:
                        logger.error(f"Task {task} did not stop in time")
                    except Exception as e:
                        logger.error(f"Error awaiting task {task}: {e}")
            self.running_tasks.clear()

            if self.executor is not None:
                loop = asyncio.get_running_loop()
                executor, self.executor = self.executor, None
                try:
                    await asyncio.wait_for(
                        loop.run_in_executor(None, lambda: executor.shutdown(wait=True, cancel_futures=True)),
                        timeout=CLEANUP_TIMEOUT_S,
                    )
                except asyncio.TimeoutError:
                    logger.error("Executor shutdown timed out")

            try:
                await asyncio.wait_for(self.db_manager.close(), timeout=CLEANUP_TIMEOUT_S)
            except asyncio.TimeoutError:
                logger.error("Database close timed out")

        except Exception as e:
            logger.exception(f"Error during cleanup: {e}")
        finally:
            logger.info("Cleanup completed")
