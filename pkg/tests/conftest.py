from __future__ import annotations

import os

import pytest

from movingwell.core import PhysicalParams


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in list(os.environ):
        if name.upper().startswith("MOVINGWELL_"):
            monkeypatch.delenv(name)


@pytest.fixture
def free_params() -> PhysicalParams:
    return PhysicalParams(m=1.0)


@pytest.fixture
def moving_params() -> PhysicalParams:
    return PhysicalParams.moving_wall(m=1.0, v=0.6, t0=1.0)


@pytest.fixture
def finite_well() -> PhysicalParams:
    return PhysicalParams(m=1.0, V0=1.5, L0=3.0)
