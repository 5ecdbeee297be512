#!/usr/bin/env python3
"""
Parallel Grid Utilities
-----------------------
Ordered fan-out of independent grid evaluations with Ctrl+C handling.

Results always come back in input order, whatever order the workers
finish in, so sweeps are byte-identical for any worker count.

Usage:
    from core.utils import ordered_map

    points = ordered_map(evaluate_point, grid, workers=4)

With explicit cleanup on interrupt:

    from core.utils import CleanupContext

    with CleanupContext() as ctx:
        ctx.register(lambda: print("[Cleanup] removing partial output"))
        run_long_job()
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class CleanupContext:
    """
    Runs registered cleanup functions, newest first, when the block is
    left through KeyboardInterrupt. The interrupt is re-raised afterwards.
    """

    def __init__(self):
        self._cleanups: List[Callable[[], None]] = []
        self._cleaned = False

    def register(self, cleanup_func: Callable[[], None]) -> None:
        self._cleanups.append(cleanup_func)

    def cleanup(self) -> None:
        if self._cleaned:
            return
        self._cleaned = True
        for func in reversed(self._cleanups):
            try:
                func()
            except Exception as e:
                log.warning("[Cleanup Error] %s", e)

    def __enter__(self) -> "CleanupContext":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is KeyboardInterrupt:
            log.warning("[Interrupted] Cleaning up...")
            self.cleanup()
        return False


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = 1,
                chunksize: int = 1) -> List[R]:
    """
    map(func, items) as a list, over a process pool when workers > 1.

    func must be a picklable module-level callable. On Ctrl+C pending
    work is cancelled before the interrupt propagates.
    """
    items: Sequence[T] = list(items)
    if not workers or workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    executor = ProcessPoolExecutor(max_workers=min(workers, len(items)))
    try:
        results = list(executor.map(func, items, chunksize=chunksize))
    except KeyboardInterrupt:
        executor.shutdown(wait=False, cancel_futures=True)
        raise
    executor.shutdown(wait=True)
    return results
