"""Optional thread pool for independent pieces (size from MIXEDRES_THREADS)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "MIXEDRES_THREADS"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(ENV_VAR, "1")))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """Order-preserving map; runs in a pool when more than one thread is requested."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
