"""Database management module for verification runs."""

import logging
from pathlib import Path
import aiosqlite
from aiosqlite import Connection as AioConnection
from typing import Optional, List, Tuple
from datetime import datetime
from config_manager import DataRecordingConfig
from qseries_types import VerificationRecord, VerificationReport, format_rational

# Create module-level logger
logger = logging.getLogger(__name__)


class DatabaseManager:
    """Manages database operations for verification runs."""

    def __init__(self, config: DataRecordingConfig):
        """Initialize database manager.

        Args:
            config: Data recording configuration object
        """
        self.config = config
        self.db_path = Path(config.path)
        self.connection: Optional[AioConnection] = None
        self.enabled = config.enabled
        self.logger = logger

    async def initialize(self) -> None:
        """Initialize database connection and schema."""
        try:
            self.logger.debug(f"Creating data directory: {self.db_path.parent}")
            self.db_path.parent.mkdir(parents=True, exist_ok=True)

            self.logger.debug(f"Connecting to database at: {self.db_path}")
            self.connection = await aiosqlite.connect(self.db_path)
            self.logger.info(f"Successfully connected to database: {self.db_path}")

            await self._create_schema()

            await self.connection.execute("PRAGMA journal_mode=WAL")
            await self.connection.commit()
            self.logger.debug("Database initialized and writable")

        except Exception as e:
            self.logger.exception(f"Failed to initialize database: {e}")
            raise

    async def _create_schema(self) -> None:
        """Create database schema if it doesn't exist."""
        schema = """
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            name TEXT,
            start_time TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
            command TEXT,
            suite TEXT,
            order_n INTEGER,
            n_max INTEGER,
            status TEXT DEFAULT 'running',
            equal_count INTEGER DEFAULT 0,
            mismatch_count INTEGER DEFAULT 0,
            error_count INTEGER DEFAULT 0
        );

        CREATE TABLE IF NOT EXISTS verification_records (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id INTEGER,
            item_id TEXT,
            label TEXT,
            status TEXT,
            order_n INTEGER,
            mismatch_exponent INTEGER,
            left_value TEXT,
            right_value TEXT,
            elapsed_ms REAL,
            FOREIGN KEY (run_id) REFERENCES runs (id)
        );

        CREATE INDEX IF NOT EXISTS idx_verification_records_run_id
        ON verification_records(run_id);
        """

        try:
            await self.connection.executescript(schema)
            await self.connection.commit()
            logger.info("Database schema initialized successfully")
        except Exception as e:
            logger.error(f"Error initializing database schema: {e}")
            raise

    async def create_run(self, command: str, suite: str, order: int, n_max: int) -> int:
        """Create a new verification run."""
        try:
            run_name = datetime.now().strftime("%Y%m%d_%H%M%S")
            logger.debug(f"Creating new run - Name: {run_name}, Command: {command}, Suite: {suite}, Order: {order}")

            async with self.connection.execute(
                """INSERT INTO runs (name, command, suite, order_n, n_max)
                   VALUES (?, ?, ?, ?, ?)""",
                (run_name, command, suite, order, n_max)
            ) as cursor:
                await self.connection.commit()
                run_id = cursor.lastrowid
                logger.info(f"Created new run with ID: {run_id}")
                return run_id
        except Exception as e:
            logger.exception(f"Failed to create run: {e}")
            raise

    async def record_result(self, run_id: int, record: VerificationRecord) -> None:
        """Store one verification record."""
        mismatch = record.first_mismatch
        try:
            logger.debug(f"Recording {record.id} {record.label} for run {run_id}: {record.status}")
            async with self.connection.execute(
                """INSERT INTO verification_records
                   (run_id, item_id, label, status, order_n, mismatch_exponent, left_value, right_value, elapsed_ms)
                   VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                (
                    run_id, record.id, record.label, record.status, record.order,
                    mismatch.exponent if mismatch else None,
                    format_rational(mismatch.left) if mismatch else None,
                    format_rational(mismatch.right) if mismatch else None,
                    record.elapsed_ms,
                )
            ):
                await self.connection.commit()
        except Exception as e:
            logger.exception(f"Failed to record {record.id} {record.label} for run {run_id}: {e}")
            raise

    async def finish_run(self, run_id: int, report: VerificationReport) -> None:
        """Store the final status and counts of a run."""
        summary = report.summary
        status = "passed" if report.all_equal else "failed"
        try:
            async with self.connection.execute(
                """UPDATE runs SET status = ?, equal_count = ?, mismatch_count = ?, error_count = ?
                   WHERE id = ?""",
                (status, summary["equal"], summary["mismatch"], summary["error"], run_id)
            ):
                await self.connection.commit()
                logger.info(f"Run {run_id} finished: {status}")
        except Exception as e:
            logger.exception(f"Failed to finish run {run_id}: {e}")
            raise

    async def get_run_records(self, run_id: int) -> List[Tuple]:
        """Get all records for a specific run.

        Args:
            run_id: ID of the run to query

        Returns:
            List of (item_id, label, status, order_n, mismatch_exponent, elapsed_ms) tuples
        """
        async with self.connection.execute(
            """SELECT item_id, label, status, order_n, mismatch_exponent, elapsed_ms
               FROM verification_records
               WHERE run_id = ?
               ORDER BY item_id, label""",
            (run_id,)
        ) as cursor:
            return await cursor.fetchall()

    async def get_run_summary(self, run_id: int) -> Optional[dict]:
        """Get summary of a specific run.

        Args:
            run_id: ID of the run to summarize

        Returns:
            Dictionary with the run's columns plus the stored record count
        """
        self.connection.row_factory = aiosqlite.Row
        try:
            async with self.connection.execute(
                """SELECT r.*, COUNT(v.id) AS record_count
                   FROM runs r
                   LEFT JOIN verification_records v ON v.run_id = r.id
                   WHERE r.id = ?
                   GROUP BY r.id""",
                (run_id,)
            ) as cursor:
                row = await cursor.fetchone()
                return dict(row) if row else None
        finally:
            self.connection.row_factory = None

    async def close(self) -> None:
        """Close database connection."""
        if self.connection:
            await self.connection.close()
            self.connection = None
