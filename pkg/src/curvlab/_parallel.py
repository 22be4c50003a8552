"""Order-preserving case fan-out.

Worker count comes from CURVLAB_THREADS (default: machine parallelism).
Results are collected in submission order and every case owns its own seed,
so outputs are bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    env = os.environ.get("CURVLAB_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"CURVLAB_THREADS must be an integer, got {env!r}")
    return max(1, os.cpu_count() or 1)


def parallel_map(fn, items, chunksize: int = 1) -> list:
    """Map preserving order; serial when one worker or a single item."""
    items = list(items)
    workers = min(worker_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
