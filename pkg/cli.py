"""Command line surface of qmock: expand, verify, derive and pair-check."""

import argparse
import asyncio
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, TextIO

from config_manager import FORMATS, ConfigManager
from logging_config import setup_logging
from qseries_types import (
    STATUS_EQUAL, InvalidSpec, UnknownIdentityId, UnknownPairId, VerificationRecord, VerificationReport,
)
from series_core import render_series, series_truncate
from verification_runner import VerificationRunner
from verification_suites import CHAINS, VERIFY_SETS, derive_checks, expand_target, pair_checks, verify_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNKNOWN = 2

ROW_CAP_ENV = "QMOCK_ROW_CAP"
DEFAULT_CONFIG_PATH = "config/config.toml"


@dataclass
class RunConfig:
    """Effective settings for one command after flags, environment and TOML are merged."""
    command: str
    order: int
    n_max: int
    ids: List[str] = field(default_factory=list)
    format: str = "text"
    row_cap: Optional[int] = None
    heavy_order: int = 25
    verify_set: str = "all"
    chain: str = ""

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be at least 1, got {self.order}")
        if self.n_max < 0:
            raise ValueError(f"nmax must be nonnegative, got {self.n_max}")


class TextSink:
    """Prints one line per record as it arrives, then the summary."""

    def __init__(self, stream: Optional[TextIO] = None):
        self.stream = stream or sys.stdout

    def on_record(self, record: VerificationRecord) -> None:
        print(format_record(record), file=self.stream, flush=True)

    def on_finished(self, report: VerificationReport) -> None:
        summary = report.summary
        print(
            f"{report.command}: {summary['total']} checks, {summary['equal']} equal, "
            f"{summary['mismatch']} mismatch, {summary['error']} error",
            file=self.stream,
        )


class JsonSink:
    """Buffers the run and emits a single JSON document."""

    def __init__(self, stream: Optional[TextIO] = None):
        self.stream = stream or sys.stdout

    def on_record(self, record: VerificationRecord) -> None:
        pass

    def on_finished(self, report: VerificationReport) -> None:
        print(report.to_json(), file=self.stream)


def format_record(record: VerificationRecord) -> str:
    line = f"{record.status.upper():8} {record.id} {record.label} (order {record.order}, {record.elapsed_ms:.1f} ms)"
    mismatch = record.first_mismatch
    if mismatch is not None:
        where = f"q^{mismatch.exponent}" if mismatch.index is None else f"n={mismatch.index}, q^{mismatch.exponent}"
        line += f" first mismatch at {where}: {mismatch.left} != {mismatch.right}"
    if record.detail and record.status != STATUS_EQUAL:
        line += f" [{record.detail}]"
    return line


def _split_ids(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ids", type=str, default=None, help="Comma-separated ids to restrict the run to.")
    common.add_argument("--order", type=int, default=None, help="Truncation order N (default from config: 40).")
    common.add_argument("--nmax", type=int, default=None, dest="n_max",
                        help="Largest pair index n checked (default from config: 10).")
    common.add_argument("--format", choices=FORMATS, default=None, help="Report format.")
    common.add_argument("--row-cap", type=int, default=None, dest="row_cap",
                        help=f"Row cap for sums; also read from ${ROW_CAP_ENV}. 0 means automatic.")
    common.add_argument("--config", type=str, default=None,
                        help=f"TOML configuration file (default: {DEFAULT_CONFIG_PATH} when present).")
    common.add_argument("--save-config", action="store_true", dest="save_config",
                        help="Store the effective order, nmax and format in the configuration file.")
    common.add_argument("--executor", choices=("process", "thread"), default=None, help="Worker pool kind.")
    common.add_argument("--workers", type=int, default=None, help="Worker count (0 = CPU count).")

    parser = argparse.ArgumentParser(prog="qmock", description="Exact q-series and mock theta identity verifier.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    expand = subparsers.add_parser("expand", parents=[common], help="Print the q-expansion of catalog objects.")
    expand.add_argument("targets", nargs="*",
                        help="Identity form (M5.appell_form), classical mock (omega), pair component (bk.beta.3) "
                             "or J-quotient.")

    verify = subparsers.add_parser("verify", parents=[common], help="Run acceptance suites.")
    verify.add_argument("--set", choices=VERIFY_SETS, default="all", dest="verify_set", help="Suite to run.")

    derive = subparsers.add_parser("derive", parents=[common], help="Run a derivation chain.")
    derive.add_argument("--chain", required=True, help=f"One of: {', '.join(CHAINS)}.")

    subparsers.add_parser("pair-check", parents=[common], help="Check Bailey pairs from the catalog.")
    return parser


def load_config_manager(path: Optional[str]) -> ConfigManager:
    """Explicit paths must exist; without one the default file is used if present."""
    if path is not None:
        return ConfigManager(path)
    if os.path.exists(DEFAULT_CONFIG_PATH):
        return ConfigManager(DEFAULT_CONFIG_PATH)
    return ConfigManager(None)


def _env_row_cap() -> Optional[int]:
    text = os.environ.get(ROW_CAP_ENV)
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{ROW_CAP_ENV} must be an integer, got {text!r}")


def resolve_run_config(args: argparse.Namespace, config_manager: ConfigManager) -> RunConfig:
    """Merge flag, environment, TOML and default values."""
    defaults = config_manager.verification_config
    row_cap = args.row_cap
    if row_cap is None:
        row_cap = _env_row_cap()
    if row_cap is None:
        row_cap = defaults.row_cap
    return RunConfig(
        command=args.command,
        order=args.order if args.order is not None else defaults.order,
        n_max=args.n_max if args.n_max is not None else defaults.n_max,
        ids=_split_ids(args.ids) + list(getattr(args, "targets", []) or []),
        format=args.format or defaults.format,
        row_cap=row_cap or None,
        heavy_order=defaults.heavy_order,
        verify_set=getattr(args, "verify_set", "all"),
        chain=getattr(args, "chain", ""),
    )


def cmd_expand(run_config: RunConfig, stream: TextIO) -> int:
    if not run_config.ids:
        raise UnknownIdentityId("unknown id: (none given)")
    N = run_config.order
    results = []
    for target in run_config.ids:
        logger.info(f"Expanding {target} to order {N}")
        series = series_truncate(expand_target(target, N, run_config.row_cap), N)
        results.append((target, series))
    if run_config.format == "json":
        payload = {"command": "expand", "order": N,
                   "series": [{"id": target, **series.to_dict()} for target, series in results]}
        print(json.dumps(payload, indent=2), file=stream)
    elif len(results) == 1:
        print(render_series(results[0][1]), file=stream)
    else:
        for target, series in results:
            print(f"{target}: {render_series(series)}", file=stream)
    return EXIT_OK


def build_checks(run_config: RunConfig) -> list:
    """Checks behind verify, derive and pair-check."""
    if run_config.command == "verify":
        return verify_checks(run_config.verify_set, run_config.order, run_config.n_max, run_config.heavy_order,
                             run_config.ids or None, run_config.row_cap)
    if run_config.command == "derive":
        return derive_checks(run_config.chain, run_config.order, run_config.n_max, run_config.row_cap)
    return pair_checks(run_config.order, run_config.n_max, run_config.ids or None, run_config.row_cap)


def _suite_name(run_config: RunConfig) -> str:
    if run_config.command == "verify":
        return run_config.verify_set
    if run_config.command == "derive":
        return run_config.chain
    return "pairs"


async def run_checks(run_config: RunConfig, config_manager: ConfigManager, stream: TextIO) -> VerificationReport:
    checks = build_checks(run_config)
    sink = JsonSink(stream) if run_config.format == "json" else TextSink(stream)
    runner = VerificationRunner(config_manager)
    try:
        return await runner.run(run_config.command, checks, sink, suite=_suite_name(run_config),
                                order=run_config.order, n_max=run_config.n_max)
    finally:
        await runner.cleanup()


async def cmd_verify(run_config: RunConfig, config_manager: ConfigManager, stream: TextIO) -> VerificationReport:
    """Run one ``--set`` of acceptance suites."""
    return await run_checks(run_config, config_manager, stream)


async def cmd_derive(run_config: RunConfig, config_manager: ConfigManager, stream: TextIO) -> VerificationReport:
    """Run a derivation chain; every intermediate pair and the final equality become records.

    Raises:
        InvalidSpec: If the chain id is unknown
    """
    if run_config.chain not in CHAINS:
        raise InvalidSpec(f"unknown chain: {run_config.chain}")
    return await run_checks(run_config, config_manager, stream)


async def cmd_pair_check(run_config: RunConfig, config_manager: ConfigManager,
                         stream: TextIO) -> VerificationReport:
    return await run_checks(run_config, config_manager, stream)


COMMANDS = {
    "verify": cmd_verify,
    "derive": cmd_derive,
    "pair-check": cmd_pair_check,
}


def main(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None,
         configure_logging: bool = False) -> int:
    """Parse arguments, run the command and return the process exit code.

    Args:
        argv: Arguments without the program name; defaults to sys.argv
        stream: Where reports and expansions are printed
        configure_logging: Install the file and console handlers from the [logging] table

    Returns:
        int: 0 when every record is equal, 1 on mismatches or failures, 2 for unknown ids
    """
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)

    try:
        config_manager = load_config_manager(args.config)
        if configure_logging:
            setup_logging(log_directory=config_manager.logging_config.directory,
                          console_level=config_manager.logging_config.console_level)
        if args.executor is not None:
            config_manager.verification_config.executor = args.executor
        if args.workers is not None:
            config_manager.verification_config.workers = args.workers
        run_config = resolve_run_config(args, config_manager)
        if args.save_config:
            config_manager.update_verification_config(order=run_config.order, n_max=run_config.n_max,
                                                       format=run_config.format)
    except Exception as e:
        logger.exception(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED

    try:
        if run_config.command == "expand":
            return cmd_expand(run_config, stream)
        report = asyncio.run(COMMANDS[run_config.command](run_config, config_manager, stream))
    except (UnknownIdentityId, UnknownPairId) as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNKNOWN
    except InvalidSpec as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNKNOWN if str(e).startswith("unknown") else EXIT_FAILED
    except Exception as e:
        logger.exception(f"{run_config.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED

    return EXIT_OK if report.all_equal else EXIT_FAILED
