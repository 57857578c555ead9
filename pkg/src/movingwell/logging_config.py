"""Logging for numerical runs.

Every record carries the run id of the command that produced it. Fields passed
through ``log_with_fields`` are rendered as ``key=value`` text and, for the
JSON formatter, also kept as a structured ``fields`` object so residuals and
error estimates stay machine-readable.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping
from contextvars import ContextVar, Token
from logging.config import dictConfig
from typing import Any

from movingwell.settings import Settings, get_settings

_VALID_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}
_run_id_context: ContextVar[str | None] = ContextVar("movingwell_run_id", default=None)

_CONTROL_ESCAPES: dict[int, str] = {
    **{code: f"\\x{code:02x}" for code in (*range(0x20), 0x7F)},
    ord("\n"): "\\n",
    ord("\r"): "\\r",
    ord("\t"): "\\t",
}

VERIFICATION_LOGGER_NAME = "movingwell.verification"
FIELDS_ATTRIBUTE = "movingwell_fields"


def normalize_log_level(raw_level: str) -> str:
    level = raw_level.strip().upper()
    if level in _VALID_LOG_LEVELS:
        return level
    return "INFO"


def get_run_id() -> str | None:
    return _run_id_context.get()


def set_run_id(run_id: str) -> Token[str | None]:
    return _run_id_context.set(run_id)


def reset_run_id(token: Token[str | None]) -> None:
    _run_id_context.reset(token)


class RunContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        run_id = get_run_id()
        record.run_id = run_id if run_id else "-"
        return True


def _json_value(value: object) -> object:
    if isinstance(value, bool | int | str):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, complex):
        return [_json_value(value.real), _json_value(value.imag)]
    return str(value)


class JsonLogFormatter(logging.Formatter):
    """One JSON object per line, keys sorted."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, object] = {
            "created": record.created,
            "level": record.levelname,
            "logger": record.name,
            "run_id": record.__dict__.get("run_id", "-"),
            "message": record.getMessage(),
        }
        fields = record.__dict__.get(FIELDS_ATTRIBUTE)
        if isinstance(fields, Mapping):
            payload["fields"] = {str(key): _json_value(value) for key, value in fields.items()}
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=True, sort_keys=True)


def _format_log_value(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, complex):
        return f"({value.real:.6g}{value.imag:+.6g}j)"
    return str(value).translate(_CONTROL_ESCAPES)


def format_log_fields(**fields: object) -> str:
    return " ".join(
        f"{key}={_format_log_value(fields[key])}" for key in sorted(fields) if fields[key] is not None
    )


def log_with_fields(
    logger: logging.Logger,
    level: int,
    message: str,
    *,
    exc_info: Any | None = None,
    **fields: object,
) -> None:
    if not logger.isEnabledFor(level):
        return
    present = {key: value for key, value in fields.items() if value is not None}
    extra = {FIELDS_ATTRIBUTE: present}
    if present:
        logger.log(level, "%s %s", message, format_log_fields(**present), exc_info=exc_info, extra=extra)
        return
    logger.log(level, "%s", message, exc_info=exc_info, extra=extra)


def log_verification_event(*, check: str, outcome: str, **fields: object) -> None:
    level = logging.INFO if outcome == "pass" else logging.WARNING
    log_with_fields(
        logging.getLogger(VERIFICATION_LOGGER_NAME),
        level,
        "verification check",
        check=check,
        outcome=outcome,
        **fields,
    )


def configure_logging(settings: Settings | None = None) -> None:
    """Route everything to stderr; stdout is reserved for command output."""

    selected_settings = settings if settings is not None else get_settings()
    level = normalize_log_level(selected_settings.log_level)
    if selected_settings.log_json:
        formatter: dict[str, str] = {"()": "movingwell.logging_config.JsonLogFormatter"}
    else:
        formatter = {"format": "%(asctime)s %(levelname)s [%(name)s] [run=%(run_id)s] %(message)s"}

    dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "filters": {"run_context": {"()": "movingwell.logging_config.RunContextFilter"}},
            "formatters": {"selected": formatter},
            "handlers": {
                "stderr": {
                    "class": "logging.StreamHandler",
                    "stream": "ext://sys.stderr",
                    "filters": ["run_context"],
                    "formatter": "selected",
                }
            },
            "root": {"handlers": ["stderr"], "level": level},
            "loggers": {VERIFICATION_LOGGER_NAME: {"level": "INFO"}},
        }
    )
