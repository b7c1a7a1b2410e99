"""Deterministic trial dispatch.

Trials are pure functions of their (index-derived) arguments, so the result
list is identical whatever the worker count or scheduling; workers only buy
wall-clock time.  Aggregations downstream use exactly-rounded sums, keeping
every reported number independent of merge order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["run_trials", "mean_stderr", "wilson_interval"]


def run_trials(fn, args_list, workers: int = 1):
    """Map fn over args_list, in order; fn must be a module-level callable."""
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    chunk = max(1, len(args_list) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list, chunksize=chunk))


def mean_stderr(values):
    """Sample mean and its standard error (exactly-rounded accumulation)."""
    xs = [float(v) for v in values]
    n = len(xs)
    if n == 0:
        raise ValueError("no values")
    mean = math.fsum(xs) / n
    if n == 1:
        return mean, math.inf
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)


def wilson_interval(successes: int, n: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 0.0, 1.0
    p = successes / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return p, max(0.0, center - half), min(1.0, center + half)


def sample_std(values):
    xs = np.asarray(values, dtype=float)
    return float(np.std(xs, ddof=1))
