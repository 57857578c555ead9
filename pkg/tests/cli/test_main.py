from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import pytest

from movingwell.cli import main
from movingwell.cli.config import RunConfig
from movingwell.cli.export import Table
from movingwell.cli.main import COMMANDS, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, build_parser, run
from movingwell.core import ConvergenceError
from movingwell.settings import Settings

MOVING_TOML = """
[physics]
m = 1.0
v = 0.6
t0 = 1.0
well_convention = "moving"

[grid]
nz = 4
nt = 3

[modes]
n = [1, 2]
cY = [0.5, 0.0]
"""


def _config(tmp_path: Path, text: str) -> str:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return str(path)


def _run(argv: list[str]) -> tuple[int, str]:
    stream = io.StringIO()
    code = run(argv, stream=stream)
    return code, stream.getvalue()


def _data_rows(text: str) -> list[list[str]]:
    return list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))


def test_parser_lists_every_command() -> None:
    parser = build_parser()

    for command in COMMANDS:
        args = parser.parse_args([command])
        assert args.cmd == command
    with pytest.raises(SystemExit):
        parser.parse_args(["launch"])


def test_bound_states_csv(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = 1.0\nV0 = 1.5\nL0 = 3.0\n")

    code, text = _run(["bound-states", "--config", path])

    assert code == EXIT_OK
    rows = _data_rows(text)
    assert rows[0] == ["n", "E", "E_minus_rest", "plug_back_residual"]
    assert len(rows) > 1
    assert all(1.0 < float(row[1]) < 2.5 for row in rows[1:])
    assert all(float(row[3]) <= 1e-10 for row in rows[1:])


def test_bound_states_in_user_units_scale_with_the_rest_energy(tmp_path: Path) -> None:
    natural = _config(tmp_path, "[physics]\nm = 1.0\nV0 = 1.5\nL0 = 3.0\n")
    _, text = _run(["bound-states", "--config", natural])
    scaled_path = tmp_path / "scaled.toml"
    scaled_path.write_text("[physics]\nm = 1.0\nc = 2.0\nV0 = 6.0\nL0 = 1.5\n", encoding="utf-8")
    _, scaled = _run(["bound-states", "--config", str(scaled_path)])

    natural_energies = [float(row[1]) for row in _data_rows(text)[1:]]
    scaled_energies = [float(row[1]) for row in _data_rows(scaled)[1:]]
    assert scaled_energies == pytest.approx([4.0 * energy for energy in natural_energies], rel=1e-9)


def test_scatter_conserves_current(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = 1.0\nV0 = 5.0\nL0 = 1.5\n\n[scatter]\nenergies = [2.0, 7.0]\n")

    code, text = _run(["scatter", "--config", path, "--format", "json"])

    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["columns"] == ["E", "R", "T", "R_plus_T", "klein_zone"]
    assert [row[4] for row in payload["rows"]] == [True, False]
    assert payload["meta"]["max_conservation_error"] < 1e-10


def test_kg_and_dirac_modes_report_small_residuals(tmp_path: Path) -> None:
    path = _config(tmp_path, MOVING_TOML)

    for command, residual_key in (("kg-modes", "residual"), ("dirac-modes", "residual")):
        code, text = _run([command, "--config", path, "--format", "json"])
        assert code == EXIT_OK, text
        payload = json.loads(text)
        column = payload["columns"].index(residual_key)
        assert len(payload["rows"]) == 2 * 4 * 3
        assert max(row[column] for row in payload["rows"]) < 1e-6
        assert "max_residual_n2" in payload["meta"]


def test_momentum_integer_order_example(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = 1.0\nt0 = 1.0\n")

    code, text = _run(["momentum", "--config", path, "--format", "json"])

    assert code == EXIT_OK
    payload = json.loads(text)
    assert [row[1] for row in payload["rows"]] == [513, 1025, 2049]
    assert abs(payload["meta"]["im_p"]) > 100.0 * payload["meta"]["discrepancy"]


def test_momentum_plane_wave_control_is_real(tmp_path: Path) -> None:
    path = _config(tmp_path, '[physics]\nm = 1.0\n\n[momentum]\nsource = "plane-wave"\nplane_wave_k = 2.0\n')

    code, text = _run(["momentum", "--config", path, "--format", "json"])

    assert code == EXIT_OK
    meta = json.loads(text)["meta"]
    assert meta["re_p"] == pytest.approx(2.0, rel=1e-7)
    assert abs(meta["im_p"]) < 1e-8


def test_identical_configs_give_byte_identical_files(tmp_path: Path) -> None:
    path = _config(tmp_path, MOVING_TOML)
    target = tmp_path / "modes.csv"

    assert run(["kg-modes", "--config", path, "--out", str(target)]) == EXIT_OK
    first = target.read_bytes()
    assert run(["kg-modes", "--config", path, "--out", str(target)]) == EXIT_OK

    assert target.read_bytes() == first


def test_domain_errors_exit_with_config_code() -> None:
    code, text = _run(["kg-modes"])

    assert code == EXIT_CONFIG
    assert _data_rows(text)[-1][:2] == ["DegenerateGeometryError", "static_wall"]


def test_invalid_config_exits_with_config_code(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = -1.0\n")

    code, text = _run(["bound-states", "--config", path, "--format", "json"])

    assert code == EXIT_CONFIG
    payload = json.loads(text)
    assert payload["error"]["reason_code"] == "config_invalid"
    assert "header" not in payload


def test_numerical_failures_exit_with_code_two(monkeypatch: pytest.MonkeyPatch) -> None:
    def failing(config: RunConfig, settings: Settings) -> Table:
        raise ConvergenceError("momentum_refinement", "levels disagree")

    monkeypatch.setitem(COMMANDS, "momentum", failing)

    code, text = _run(["momentum", "--format", "json"])

    assert code == EXIT_NUMERICAL
    payload = json.loads(text)
    assert payload["error"]["type"] == "ConvergenceError"
    assert payload["header"]["command"] == "momentum"


def test_verify_selected_checks_pass(tmp_path: Path) -> None:
    path = _config(tmp_path, '[verify]\nchecks = ["quantization", "lightcone_roundtrip", "stencil_order"]\n')

    code, text = _run(["verify", "--config", path])

    assert code == EXIT_OK
    rows = _data_rows(text)
    assert rows[0] == ["check", "outcome", "measured", "threshold", "detail"]
    assert [row[:2] for row in rows[1:]] == [
        ["quantization", "pass"],
        ["lightcone_roundtrip", "pass"],
        ["stencil_order", "pass"],
    ]


def test_injected_stencil_bug_fails_the_order_check(tmp_path: Path) -> None:
    path = _config(tmp_path, '[verify]\nchecks = ["stencil_order"]\n')

    code, text = _run(["verify", "--config", path, "--inject-stencil-bug"])

    assert code == EXIT_NUMERICAL
    assert _data_rows(text)[1][:2] == ["stencil_order", "fail"]
    assert "# failed: 1" in text


def test_unknown_check_is_a_config_error(tmp_path: Path) -> None:
    path = _config(tmp_path, '[verify]\nchecks = ["telepathy"]\n')

    code, text = _run(["verify", "--config", path])

    assert code == EXIT_CONFIG
    assert "unknown_check" in text


def test_main_raises_system_exit_only_on_failure(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    passing = _config(tmp_path, '[verify]\nchecks = ["quantization"]\n')
    monkeypatch.setattr(sys, "argv", ["movingwell", "verify", "--config", passing])
    main()
    assert "quantization,pass" in capsys.readouterr().out

    monkeypatch.setattr(sys, "argv", ["movingwell", "kg-modes"])
    with pytest.raises(SystemExit) as excinfo:
        main()
    assert excinfo.value.code == EXIT_CONFIG


def test_empty_bound_window_gives_an_empty_table(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = 1.0\nV0 = 0.0\nL0 = 3.0\n")

    code, text = _run(["bound-states", "--config", path])

    assert code == EXIT_OK
    assert _data_rows(text) == [["n", "E", "E_minus_rest", "plug_back_residual"]]
    assert "# count: 0" in text


def test_flat_potential_transmits_everything(tmp_path: Path) -> None:
    path = _config(tmp_path, "[physics]\nm = 1.0\nV0 = 0.0\nL0 = 2.0\n\n[scatter]\nenergies = [1.5, 3.0]\n")

    code, text = _run(["scatter", "--config", path])

    assert code == EXIT_OK
    transmissions = [float(row[2]) for row in _data_rows(text)[1:]]
    assert transmissions == pytest.approx([1.0, 1.0], abs=1e-12)


def test_default_momentum_run_uses_the_integer_order_example() -> None:
    code, text = _run(["momentum", "--format", "json"])

    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["header"]["config"]["physics"]["t0"] == 1.0
    assert payload["meta"]["im_p"] != 0.0
