from __future__ import annotations

import ast
from dataclasses import dataclass
from pathlib import Path

ORACLE_ROOT = Path(__file__).resolve().parents[2] / "src" / "movingwell" / "oracle"

FORBIDDEN_MODULES = (
    "movingwell.special_fn",
    "movingwell.kg_moving",
    "movingwell.dirac_moving",
    "movingwell.static_well",
)


@dataclass(frozen=True)
class Violation:
    file_path: Path
    line: int
    column: int
    message: str


def _iter_oracle_files() -> list[Path]:
    return sorted(path for path in ORACLE_ROOT.rglob("*.py") if path.is_file())


def _forbidden(module: str) -> bool:
    return any(module == name or module.startswith(f"{name}.") for name in FORBIDDEN_MODULES)


def _violation(file_path: Path, node: ast.stmt, module: str) -> Violation:
    return Violation(
        file_path=file_path,
        line=node.lineno,
        column=node.col_offset,
        message=f"oracle module imports {module}; oracles must not share code with the solvers they check",
    )


def _collect_violations(file_path: Path) -> list[Violation]:
    source = file_path.read_text(encoding="utf-8")
    tree = ast.parse(source, filename=str(file_path))

    violations: list[Violation] = []
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom) and node.module is not None:
            if _forbidden(node.module):
                violations.append(_violation(file_path, node, node.module))
            elif node.module == "movingwell":
                for alias in node.names:
                    if _forbidden(f"movingwell.{alias.name}"):
                        violations.append(_violation(file_path, node, f"movingwell.{alias.name}"))
        if isinstance(node, ast.Import):
            for alias in node.names:
                if _forbidden(alias.name):
                    violations.append(_violation(file_path, node, alias.name))
    return violations


def test_oracle_package_exists() -> None:
    assert _iter_oracle_files()


def test_oracles_do_not_import_solvers() -> None:
    all_violations: list[Violation] = []
    for file_path in _iter_oracle_files():
        all_violations.extend(_collect_violations(file_path))

    if all_violations:
        details = "\n".join(
            f"{violation.file_path.relative_to(ORACLE_ROOT.parents[2])}:{violation.line}:{violation.column} {violation.message}"
            for violation in all_violations
        )
        raise AssertionError(f"Solver imports detected in oracle modules.\n{details}")
