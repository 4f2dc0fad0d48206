"""Thread-pool plumbing for the parallel-map contract.

Library code never spawns on its own initiative: callers pass a thread
count (1 forces the serial path) and block results are combined in block
order, so the outcome is identical either way.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def run_blocks(fn: Callable[[T], R], blocks: Sequence[T], threads: int) -> List[R]:
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))
