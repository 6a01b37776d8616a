"""Deterministic fan-out helper.

Work items are fully materialized before dispatch and results are reduced in
submission order, so the outcome is byte-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing


def deterministic_map(fn, items, jobs: int = 1) -> list:
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=min(jobs, len(items))) as pool:
        return pool.map(fn, items)
