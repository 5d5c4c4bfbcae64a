# core/worker_pool.py

"""
Deterministic ordered map over a process pool.

Results are returned in input order whatever the worker count, so reductions
performed on them are bitwise reproducible.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply fn to every item, preserving order.

    Args:
        fn: Picklable module-level callable
        items: Inputs
        workers: Process count; 1 runs inline

    Returns:
        List of results aligned with items
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    chunksize = max(1, len(items) // (4 * workers))
    logger.debug(f"Mapping {len(items)} items over {workers} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
