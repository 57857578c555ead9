from __future__ import annotations

from collections.abc import Callable
from typing import Any

import pytest

from movingwell import dirac_moving, kg_moving
from movingwell.cli import commands
from movingwell.cli.commands import cmd_dirac_modes, cmd_kg_modes, cmd_momentum
from movingwell.cli.config import GridConfig, ModesConfig, PhysicsConfig, RunConfig
from movingwell.lightcone import to_lightcone_arrays
from movingwell.settings import Settings

MOVING = RunConfig(
    physics=PhysicsConfig(v=0.6, t0=1.0, well_convention="moving"),
    grid=GridConfig(nz=3, nt=2),
    modes=ModesConfig(n=[1]),
)


def _recorder(seen: list[float]) -> Callable[..., Any]:
    def record(*args: Any, **kwargs: Any) -> Any:
        seen.append(kwargs["near_cone_tolerance"])
        return to_lightcone_arrays(*args, **kwargs)

    return record


@pytest.mark.parametrize(
    ("command", "library_module"),
    [(cmd_kg_modes, kg_moving), (cmd_dirac_modes, dirac_moving)],
)
def test_mode_commands_forward_the_near_cone_tolerance(
    monkeypatch: pytest.MonkeyPatch, command: Callable[[RunConfig, Settings], Any], library_module: object
) -> None:
    seen: list[float] = []
    monkeypatch.setattr(commands, "to_lightcone_arrays", _recorder(seen))
    monkeypatch.setattr(library_module, "to_lightcone_arrays", _recorder(seen))

    table = command(MOVING, Settings(near_cone_tolerance=5e-4))

    assert table.rows
    assert seen
    assert set(seen) == {5e-4}


def test_momentum_forwards_the_near_cone_tolerance(monkeypatch: pytest.MonkeyPatch) -> None:
    seen: list[float] = []
    monkeypatch.setattr(dirac_moving, "to_lightcone_arrays", _recorder(seen))

    table = cmd_momentum(RunConfig(), Settings(near_cone_tolerance=5e-4))

    assert table.meta["im_p"] != 0.0
    assert seen
    assert set(seen) == {5e-4}
