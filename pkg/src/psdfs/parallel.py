"""Order-preserving parallel map capped by the PSDFS_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Workers to use: PSDFS_THREADS if set and positive, else the CPU count (0 = auto)."""
    raw = os.environ.get("PSDFS_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PSDFS_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("PSDFS_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def pmap(fn, items):
    """list(map(fn, items)) with a thread pool; result order follows ``items``."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
