from __future__ import annotations

import numpy as np
import pytest

from bratteli_irs.montecarlo import Estimate, frequency_estimate, mean_estimate, split, streams


def test_split_is_fixed():
    assert split(10, 3) == [4, 3, 3]
    assert sum(split(7, 4)) == 7


def test_streams_are_independent_and_reproducible():
    a = [g.random() for g in streams(5, 3)]
    b = [g.random() for g in streams(5, 3)]
    assert a == b and len(set(a)) == 3


@pytest.mark.parametrize("workers", [1, 2, 5])
def test_estimates_reproducible(workers):
    def draw(count, rng):
        return rng.random(count) < 0.3

    a = frequency_estimate(draw, 10000, 1, workers)
    b = frequency_estimate(draw, 10000, 1, workers)
    assert a == b and a.samples == 10000
    assert a.within(0.3, 4.0)


def test_mean_estimate_std_err():
    est = mean_estimate(lambda count, rng: rng.normal(2.0, 1.0, count), 40000, 3)
    assert est.std_err == pytest.approx(1 / 200, rel=0.05)
    assert est.within(2.0)


def test_within_slack():
    e = Estimate(0.5, 0.01, 100, 0, 1)
    assert e.within(0.52) and not e.within(0.55) and e.within(0.55, slack=0.03)
