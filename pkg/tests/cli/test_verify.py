from __future__ import annotations

import logging

import numpy as np
import pytest

from movingwell.cli.config import ConfigError, RunConfig, VerifyConfig
from movingwell.cli.verify import CHECKS, CheckContext, CheckResult, check_stencil_order, cmd_verify, run_checks
from movingwell.core import AccuracyError
from movingwell.logging_config import VERIFICATION_LOGGER_NAME
from movingwell.settings import Settings


def _config(*checks: str) -> RunConfig:
    return RunConfig(verify=VerifyConfig(checks=list(checks)))


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_every_check_passes(name: str) -> None:
    (result,) = run_checks(_config(name), Settings())

    assert result.passed, f"{result.name}: measured={result.measured} {result.detail}"


def test_stencil_order_negative_control() -> None:
    context = CheckContext(settings=Settings(), rng=np.random.default_rng(0), inject_stencil_bug=True)

    result = check_stencil_order(context)

    assert not result.passed
    assert result.measured is not None
    assert result.measured > 1.5


def test_library_errors_become_failed_checks(monkeypatch: pytest.MonkeyPatch) -> None:
    def broken(context: CheckContext) -> CheckResult:
        raise AccuracyError("bessel_not_certified", "forced")

    monkeypatch.setitem(CHECKS, "quantization", broken)

    (result,) = run_checks(_config("quantization"), Settings())

    assert not result.passed
    assert result.detail == "AccuracyError: bessel_not_certified"
    assert result.row()[2:4] == ("", "")


def test_checks_log_their_outcome(caplog: pytest.LogCaptureFixture) -> None:
    caplog.set_level(logging.INFO, logger=VERIFICATION_LOGGER_NAME)

    cmd_verify(_config("quantization", "lightcone_roundtrip"), Settings())

    messages = [record.getMessage() for record in caplog.records if record.name == VERIFICATION_LOGGER_NAME]
    assert len(messages) == 2
    assert "check=quantization" in messages[0]
    assert "outcome=pass" in messages[0]


def test_results_are_reproducible_for_a_seed() -> None:
    first = cmd_verify(_config("dirac_u2_operator", "static_plug_back"), Settings())
    second = cmd_verify(_config("dirac_u2_operator", "static_plug_back"), Settings())

    assert first.rows == second.rows
    assert first.meta == {"passed": 2, "failed": 0}


def test_unknown_checks_are_rejected() -> None:
    with pytest.raises(ConfigError, match="unknown_check"):
        run_checks(_config("quantization", "nonsense"), Settings())
