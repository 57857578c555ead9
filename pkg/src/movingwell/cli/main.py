from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TextIO

from movingwell.cli.commands import (
    cmd_bound_states,
    cmd_dirac_modes,
    cmd_kg_modes,
    cmd_momentum,
    cmd_scatter,
)
from movingwell.cli.config import ConfigError, OutputFormat, RunConfig, load_run_config
from movingwell.cli.export import Table, render, render_error, write_output
from movingwell.cli.verify import cmd_verify
from movingwell.core import DomainError, MovingWellError
from movingwell.logging_config import (
    configure_logging,
    log_with_fields,
    reset_run_id,
    set_run_id,
)
from movingwell.settings import Settings, get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

type Command = Callable[[RunConfig, Settings], Table]

COMMANDS: dict[str, Command] = {
    "bound-states": cmd_bound_states,
    "scatter": cmd_scatter,
    "kg-modes": cmd_kg_modes,
    "dirac-modes": cmd_dirac_modes,
    "momentum": cmd_momentum,
    "verify": cmd_verify,
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML run file.")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", type=str, default=None, help="Output path; '-' or omitted for stdout.")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--seed", type=int, default=None, help="Seed for randomised checks.")
    common.add_argument("--log-level", type=str, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movingwell")
    sub = parser.add_subparsers(dest="cmd", required=True)
    common = _common_options()

    sub.add_parser("bound-states", parents=[common], help="Bound energies of the static finite well.")
    sub.add_parser("scatter", parents=[common], help="Reflection and transmission over an energy sweep.")
    sub.add_parser("kg-modes", parents=[common], help="Klein-Gordon moving-wall modes on a grid.")
    sub.add_parser("dirac-modes", parents=[common], help="Dirac moving-wall modes on a grid.")
    sub.add_parser("momentum", parents=[common], help="Momentum expectation with refinement history.")
    verify = sub.add_parser("verify", parents=[common], help="Run the invariant suite.")
    verify.add_argument(
        "--inject-stencil-bug",
        action="store_true",
        help="Use the second-order stencil in the order check (negative control).",
    )
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "format": args.format,
        "out": args.out,
        "threads": args.threads,
        "seed": args.seed,
    }
    if getattr(args, "inject_stencil_bug", False):
        overrides["verify"] = {"inject_stencil_bug": True}
    return overrides


def _run_id(command: str, config: RunConfig) -> str:
    digest = hashlib.sha256(config.canonical_json().encode("utf-8")).hexdigest()[:12]
    return f"{command}-{digest}"


def _fail(
    error: MovingWellError,
    config: RunConfig | None,
    command: str,
    fmt: OutputFormat,
    out: str | None,
    stream: TextIO,
) -> None:
    log_with_fields(
        logger,
        logging.ERROR,
        "command failed",
        command=command,
        error=type(error).__name__,
        reason_code=error.reason_code,
        detail=error.detail,
    )
    write_output(render_error(error, config, command, fmt), out, stream=stream)


def run(argv: Sequence[str] | None = None, *, stream: TextIO | None = None) -> int:
    """Parse ``argv``, run one command and return its exit code."""

    args = build_parser().parse_args(argv)
    target = stream if stream is not None else sys.stdout
    settings = get_settings()
    if args.log_level is not None:
        settings = settings.model_copy(update={"log_level": args.log_level})
    configure_logging(settings)
    command: str = args.cmd
    fmt: OutputFormat = args.format or "csv"

    try:
        config = load_run_config(
            args.config,
            _overrides(args),
            defaults={"threads": settings.default_threads},
        )
    except ConfigError as exc:
        _fail(exc, None, command, fmt, args.out, target)
        return EXIT_CONFIG

    token = set_run_id(_run_id(command, config))
    try:
        log_with_fields(logger, logging.INFO, "command started", command=command, threads=config.threads)
        table = COMMANDS[command](config, settings)
        text = render(table, config)
    except (ConfigError, DomainError) as exc:
        _fail(exc, config, command, config.format, config.out, target)
        return EXIT_CONFIG
    except MovingWellError as exc:
        _fail(exc, config, command, config.format, config.out, target)
        return EXIT_NUMERICAL
    finally:
        reset_run_id(token)

    write_output(text, config.out, stream=target)
    failed = int(table.meta.get("failed", 0))
    log_with_fields(logger, logging.INFO, "command finished", command=command, rows=len(table.rows), failed=failed)
    return EXIT_NUMERICAL if failed else EXIT_OK


def main() -> None:
    code = run()
    if code != EXIT_OK:
        raise SystemExit(code)
