"""Thread-pool helper honoring the SHOCKFLOW_THREADS cap.

The workloads parallelized here are batches of independent numpy-heavy
evaluations, which release the GIL inside numpy; threads are enough.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count(requested=None):
    cap = os.environ.get("SHOCKFLOW_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def map_workers(fn, items, workers=None):
    """Ordered map over items, threaded when more than one worker."""
    n = worker_count(workers)
    if n == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
