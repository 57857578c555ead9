from __future__ import annotations

from movingwell.cli.main import main

__all__ = ["main"]
