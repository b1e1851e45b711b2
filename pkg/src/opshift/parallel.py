"""Deterministic chunked summation, optionally spread across threads.

The reduction tree is fixed by the chunk size alone: each chunk is
summed left to right with compensated (Kahan) accumulation, and the
chunk partials are then combined pairwise in index order.  Workers only
decide who computes which chunk, never the combination order, so the
result is bitwise identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["worker_count", "set_worker_count", "chunked_sum", "DEFAULT_CHUNK_SIZE"]

DEFAULT_CHUNK_SIZE = 2048

_WORKERS = 1


def worker_count() -> int:
    return _WORKERS


def set_worker_count(n: int):
    global _WORKERS
    _WORKERS = max(1, int(n))


def _kahan_chunk(terms, shape):
    s = np.zeros(shape, dtype=complex)
    c = np.zeros(shape, dtype=complex)
    for t in terms:
        y = t - c
        tot = s + y
        c = (tot - s) - y
        s = tot
    return s


def chunked_sum(term_at, n_terms, shape, chunk_size=DEFAULT_CHUNK_SIZE):
    """Sum term_at(i) for i in range(n_terms) with a fixed reduction tree.

    ``term_at`` must be pure; terms inside a chunk are Kahan-accumulated,
    chunk partials are combined by pairwise folding in index order.
    """
    if n_terms == 0:
        return np.zeros(shape, dtype=complex)
    n_chunks = (n_terms + chunk_size - 1) // chunk_size

    def partial(ci):
        lo = ci * chunk_size
        hi = min(lo + chunk_size, n_terms)
        return _kahan_chunk((term_at(i) for i in range(lo, hi)), shape)

    if _WORKERS == 1 or n_chunks == 1:
        partials = [partial(ci) for ci in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=_WORKERS) as pool:
            partials = list(pool.map(partial, range(n_chunks)))
    while len(partials) > 1:
        nxt = []
        for i in range(0, len(partials) - 1, 2):
            nxt.append(partials[i] + partials[i + 1])
        if len(partials) % 2:
            nxt.append(partials[-1])
        partials = nxt
    return partials[0]
