from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli_irs.clopen import ClopenSet
from bratteli_irs.errors import DepthExceeded, InputError
from bratteli_irs.group import GroupElement, conjugate_element, random_group_element
from bratteli_irs.irs import (
    StabilizerTrace,
    conjugate,
    contains,
    empirical_f_measure,
    estimate_chi,
    estimate_chi_prime,
    f_membership,
    sample_stabilizer,
)
from bratteli_irs.measure import ProductMeasureSpec

A2 = ProductMeasureSpec((2,))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_conjugation_equivariance(odo_mu, seed):
    rng = np.random.default_rng(seed)
    d = odo_mu.diagram
    trace = sample_stabilizer(A2, [odo_mu], 5, rng)
    g, h = random_group_element(d, 3, rng), random_group_element(d, 4, rng)
    assert contains(conjugate(trace, h), conjugate_element(h, g)) == contains(trace, g)
    assert contains(trace, GroupElement.identity(d, 5))


def test_trace_equality_is_setwise(odo_mu):
    rng = np.random.default_rng(0)
    t = sample_stabilizer(A2, [odo_mu], 4, rng)
    swapped = StabilizerTrace(t.diagram, t.alpha, t.coords[::-1], t.depth)
    assert swapped == t and hash(swapped) == hash(t)


def test_trace_validation(odo, odo_mu):
    rng = np.random.default_rng(0)
    t = sample_stabilizer(A2, [odo_mu], 3, rng)
    with pytest.raises(InputError):
        StabilizerTrace(odo, A2, t.coords[:1], 3)
    with pytest.raises(DepthExceeded):
        contains(t, GroupElement.identity(odo, 4))


def test_f_membership(odo, odo_mu):
    rng = np.random.default_rng(5)
    a = ClopenSet(odo, 1, frozenset({(0, 0)}))
    for _ in range(20):
        t = sample_stabilizer(A2, [odo_mu], 3, rng)
        inside = f_membership(t, a)
        assert inside == all(t.prefix(j, 1) == (0, 0) for j in range(2))


def test_chi_estimate_seeded(odo, odo_mu):
    g = GroupElement.from_cycles(odo, 2, {0: [(0, 1)]})
    a = estimate_chi(A2, g, [odo_mu], 20000, seed=9, workers=2)
    b = estimate_chi(A2, g, [odo_mu], 20000, seed=9, workers=2)
    assert a == b
    assert a.within(0.25, 3.0)
    with pytest.raises(DepthExceeded):
        estimate_chi(A2, g, [odo_mu], 10, depth=1)


def test_chi_prime_alpha1_identical(ones, ones_mu):
    g = GroupElement.from_cycles(ones, 3, {1: [(0, 1, 2)]})
    res = estimate_chi_prime(ProductMeasureSpec((1,)), g, [ones_mu], 20000, seed=4)
    assert res.chi == res.chi_prime
    assert res.collision_rate == 0.0 and res.agrees


def test_chi_prime_collision_budget(odo, odo_mu):
    g = GroupElement.from_cycles(odo, 3, {0: [(0, 5)]})
    res = estimate_chi_prime(A2, g, [odo_mu], 40000, depth=6, seed=1)
    assert res.agrees and res.max_sample_gap == 0
    assert res.chi.within(float(Fraction(9, 16)), 3.0)
    assert res.chi_prime.value >= res.chi.value


def test_f_measure(odo, odo_mu):
    a = ClopenSet(odo, 2, frozenset({(0, 1), (0, 2), (0, 3)}))
    est = empirical_f_measure(ProductMeasureSpec((3,)), a, [odo_mu], 30000, seed=2)
    assert est.within(float(Fraction(27, 64)), 3.0)
