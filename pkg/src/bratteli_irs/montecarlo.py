"""Seeded Monte Carlo plumbing: one independent stream per worker, merged by sums.

Results depend only on ``(seed, workers)``: the sample budget is split into
``workers`` fixed chunks, chunk ``i`` draws from the ``i``-th child of
``SeedSequence(seed)``, and the partial sums are added in chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Estimate:
    value: float
    std_err: float
    samples: int
    seed: int
    workers: int

    def within(self, exact: float, sigmas: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.value - float(exact)) <= sigmas * self.std_err + slack


def split(samples: int, workers: int) -> list[int]:
    if samples < 1:
        raise InputError("need at least one sample")
    if workers < 1:
        raise InputError("need at least one worker")
    base, extra = divmod(samples, workers)
    return [base + (i < extra) for i in range(workers)]


def streams(seed: int, workers: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(workers)]


def run_chunks(fn: Callable[[int, np.random.Generator], object], samples: int, seed: int, workers: int = 1) -> list:
    """Evaluate ``fn(count, rng)`` on every chunk; results are returned in chunk order."""
    jobs = [(n, rng) for n, rng in zip(split(samples, workers), streams(seed, workers)) if n]
    if workers == 1:
        return [fn(n, rng) for n, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def mean_estimate(fn: Callable[[int, np.random.Generator], np.ndarray], samples: int, seed: int, workers: int = 1) -> Estimate:
    """Sample mean and standard error (sample stddev / sqrt N) of per-draw values."""
    total = total_sq = 0.0
    for values in run_chunks(fn, samples, seed, workers):
        values = np.asarray(values, dtype=float)
        total += float(values.sum())
        total_sq += float((values * values).sum())
    mean = total / samples
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1) if samples > 1 else 0.0
    return Estimate(mean, math.sqrt(var / samples), samples, seed, workers)


def frequency_estimate(fn: Callable[[int, np.random.Generator], np.ndarray], samples: int, seed: int, workers: int = 1) -> Estimate:
    """Success frequency of boolean draws with the binomial standard error."""
    hits = sum(int(np.count_nonzero(v)) for v in run_chunks(fn, samples, seed, workers))
    p = hits / samples
    return Estimate(p, math.sqrt(p * (1 - p) / samples), samples, seed, workers)
