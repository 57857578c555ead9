"""CSV and JSON writers for command tables.

Both formats carry a header with the package version and the fully resolved
run configuration. Output never contains timestamps so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from movingwell import __version__
from movingwell.cli.config import OutputFormat, RunConfig
from movingwell.core import MovingWellError

type Cell = float | int | str | bool


@dataclass(frozen=True, slots=True)
class Table:
    command: str
    columns: tuple[str, ...]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)
    meta: dict[str, Cell] = field(default_factory=dict)


def format_float(value: float) -> str:
    return f"{value:.17g}"


def _csv_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _json_cell(value: Cell) -> Cell:
    if isinstance(value, float) and not math.isfinite(value):
        raise MovingWellError("non_finite_output", "refusing to export a non-finite number")
    return value


def _header(config: RunConfig, command: str) -> dict[str, object]:
    return {
        "version": __version__,
        "command": command,
        "config": json.loads(config.canonical_json()),
    }


def render_csv(table: Table, config: RunConfig) -> str:
    buffer = io.StringIO()
    buffer.write(f"# movingwell {__version__}\n")
    buffer.write(f"# command: {table.command}\n")
    buffer.write(f"# config: {config.canonical_json()}\n")
    for key in sorted(table.meta):
        buffer.write(f"# {key}: {_csv_cell(table.meta[key])}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(value) for value in row])
    return buffer.getvalue()


def render_json(table: Table, config: RunConfig) -> str:
    payload = {
        "header": _header(config, table.command),
        "columns": list(table.columns),
        "rows": [[_json_cell(value) for value in row] for row in table.rows],
        "meta": {key: _json_cell(value) for key, value in table.meta.items()},
    }
    return json.dumps(payload, sort_keys=True, allow_nan=False, indent=2) + "\n"


def render_error(error: MovingWellError, config: RunConfig | None, command: str, fmt: OutputFormat) -> str:
    """A typed error record in the requested format."""

    record = {
        "type": type(error).__name__,
        "reason_code": error.reason_code,
        "detail": error.detail,
    }
    if fmt == "json":
        payload: dict[str, object] = {"error": record}
        if config is not None:
            payload["header"] = _header(config, command)
        return json.dumps(payload, sort_keys=True, allow_nan=False, indent=2) + "\n"
    lines = [f"# movingwell {__version__}", f"# command: {command}"]
    if config is not None:
        lines.append(f"# config: {config.canonical_json()}")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["type", "reason_code", "detail"])
    writer.writerow([record["type"], record["reason_code"], record["detail"]])
    return "\n".join(lines) + "\n" + buffer.getvalue()


def render(table: Table, config: RunConfig) -> str:
    if config.format == "json":
        return render_json(table, config)
    return render_csv(table, config)


def write_output(text: str, out: str | None, *, stream: TextIO | None = None) -> None:
    if out is None or out == "-":
        target = stream if stream is not None else sys.stdout
        target.write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="\n")


def complex_columns(name: str) -> Sequence[str]:
    return (f"re_{name}", f"im_{name}")
