from __future__ import annotations

import logging
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

from movingwell.logging_config import log_with_fields

logger = logging.getLogger(__name__)


def split_panels(n_items: int, n_panels: int) -> list[range]:
    """Contiguous, nearly equal index ranges covering range(n_items)."""

    n_panels = max(1, min(n_panels, n_items)) if n_items > 0 else 1
    base, extra = divmod(n_items, n_panels)
    panels: list[range] = []
    start = 0
    for index in range(n_panels):
        stop = start + base + (1 if index < extra else 0)
        panels.append(range(start, stop))
        start = stop
    return panels


def map_panels[P, R](func: Callable[[P], R], panels: Sequence[P], *, threads: int = 1) -> list[R]:
    """Apply ``func`` to each panel; results come back in panel order."""

    started = time.perf_counter()
    if threads <= 1 or len(panels) <= 1:
        results = [func(panel) for panel in panels]
    else:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="movingwell") as pool:
            results = list(pool.map(func, panels))
    log_with_fields(
        logger,
        logging.DEBUG,
        "panels complete",
        panels=len(panels),
        threads=threads,
        duration_ms=int((time.perf_counter() - started) * 1000),
    )
    return results
