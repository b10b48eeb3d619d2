"""Deterministic work distribution: results always return in input order."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    # Executor.map preserves input order regardless of completion order, so
    # reductions downstream see the same sequence as the serial path.
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
