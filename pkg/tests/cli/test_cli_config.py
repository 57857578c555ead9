from __future__ import annotations

import json
from pathlib import Path

import pytest

from movingwell.cli.config import ConfigError, ModesConfig, PhysicsConfig, RunConfig, ScatterConfig, load_run_config
from movingwell.core import DomainError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_a_file() -> None:
    config = load_run_config(None)

    assert config == RunConfig()
    assert config.format == "csv"
    assert config.threads == 1


def test_file_values_sit_between_defaults_and_flags(tmp_path: Path) -> None:
    path = _write(
        tmp_path,
        'threads = 2\nformat = "json"\n\n[physics]\nV0 = 1.5\nL0 = 3.0\n\n[verify]\nchecks = ["quantization"]\n',
    )

    config = load_run_config(path, {"threads": 4, "seed": None}, defaults={"threads": 8, "seed": 5})

    assert config.threads == 4
    assert config.seed == 5
    assert config.format == "json"
    assert config.physics.V0 == 1.5
    assert config.verify.checks == ["quantization"]


def test_nested_overrides_merge_into_sections(tmp_path: Path) -> None:
    path = _write(tmp_path, '[verify]\nchecks = ["stencil_order"]\n')

    config = load_run_config(path, {"verify": {"inject_stencil_bug": True}})

    assert config.verify.checks == ["stencil_order"]
    assert config.verify.inject_stencil_bug


def test_unknown_keys_are_rejected(tmp_path: Path) -> None:
    path = _write(tmp_path, "[physics]\nmass = 1.0\n")

    with pytest.raises(ConfigError, match="config_invalid") as excinfo:
        load_run_config(path)

    assert "physics.mass" in excinfo.value.detail


def test_unreadable_and_malformed_files(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="config_unreadable"):
        load_run_config(tmp_path / "missing.toml")
    with pytest.raises(ConfigError, match="config_not_toml"):
        load_run_config(_write(tmp_path, "[physics\n"))


def test_canonical_json_is_sorted_and_stable() -> None:
    first = RunConfig(threads=3).canonical_json()
    second = RunConfig.model_validate(json.loads(first)).canonical_json()

    assert first == second
    keys = list(json.loads(first))
    assert keys == sorted(keys)


def test_moving_physics_derives_the_width() -> None:
    params = PhysicsConfig(m=1.0, v=0.5, t0=2.0, well_convention="moving").to_params()

    assert params.L0 == pytest.approx(1.0)
    assert params.well_convention == "moving"
    assert PhysicsConfig(v=0.5, t0=2.0, L0=1.0, well_convention="moving").to_params().L0 == 1.0
    assert PhysicsConfig().to_params().L0 == 1.0


def test_moving_physics_rejects_a_conflicting_width() -> None:
    with pytest.raises(DomainError, match="moving_convention_mismatch"):
        PhysicsConfig(m=1.0, v=0.5, t0=2.0, L0=7.0, well_convention="moving").to_params()


def test_moving_physics_keeps_the_superluminal_flag() -> None:
    with pytest.raises(DomainError, match="nonpositive_width"):
        PhysicsConfig(v=-2.0, t0=1.0, well_convention="moving", superluminal_study=True).to_params()

    study = PhysicsConfig(v=-2.0, superluminal_study=True).to_params()
    assert study.superluminal_study
    assert study.t0 == 1.0


def test_scatter_energy_sweep() -> None:
    assert ScatterConfig(E_min=1.0, E_max=2.0, n_energies=3).energy_list() == [1.0, 1.5, 2.0]
    assert ScatterConfig(E_min=1.0, n_energies=1).energy_list() == [1.0]
    assert ScatterConfig(energies=[7.0, 8.0]).energy_list() == [7.0, 8.0]


def test_mode_indices_must_be_positive() -> None:
    assert ModesConfig(n=[1, 3], cJ=(0.0, 1.0)).cJ_complex == 1j

    with pytest.raises(ValueError):
        ModesConfig(n=[0])
    with pytest.raises(ValueError):
        ModesConfig(n=[])
