from __future__ import annotations

import threading

from movingwell.parallel import map_panels, split_panels


def test_split_panels_covers_every_index_once() -> None:
    panels = split_panels(10, 3)

    assert [len(panel) for panel in panels] == [4, 3, 3]
    assert [index for panel in panels for index in panel] == list(range(10))


def test_split_panels_never_returns_empty_panels() -> None:
    assert split_panels(2, 8) == [range(0, 1), range(1, 2)]
    assert split_panels(0, 4) == [range(0, 0)]
    assert split_panels(5, 0) == [range(0, 5)]


def test_map_panels_keeps_panel_order_across_threads() -> None:
    panels = [list(panel) for panel in split_panels(40, 7)]
    names: set[str] = set()

    def total(panel: list[int]) -> int:
        names.add(threading.current_thread().name)
        return sum(panel)

    threaded = map_panels(total, panels, threads=4)

    assert threaded == [sum(panel) for panel in panels]
    assert all(name.startswith("movingwell") for name in names)


def test_map_panels_runs_inline_for_one_thread() -> None:
    caller = threading.current_thread().name
    seen: list[str] = []

    def record(panel: int) -> int:
        seen.append(threading.current_thread().name)
        return panel * 2

    assert map_panels(record, [1, 2, 3], threads=1) == [2, 4, 6]
    assert seen == [caller] * 3
