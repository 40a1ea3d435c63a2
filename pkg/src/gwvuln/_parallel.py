"""Row-chunked execution helper for per-cell stages.

Work is always split one grid row per task, independent of the worker count,
so every row is computed by the same numpy calls whatever ``threads`` is.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def default_threads() -> int:
    return os.cpu_count() or 1


def map_rows(fn, nrows: int, threads: int | None = 1) -> np.ndarray:
    """Stack ``fn(row)`` for ``row in range(nrows)``."""
    if threads is None:
        threads = default_threads()
    if threads <= 1 or nrows <= 1:
        return np.stack([fn(r) for r in range(nrows)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.stack(list(pool.map(fn, range(nrows))))
