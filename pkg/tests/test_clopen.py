from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli_irs.clopen import ClopenSet
from bratteli_irs.diagram import all_ones

D = all_ones(2)


@st.composite
def clopens(draw):
    n = draw(st.integers(1, 3))
    h = D.path_counts(n)
    labels = draw(st.sets(st.tuples(st.integers(0, 1), st.integers(0, h[0] - 1))))
    return ClopenSet(D, n, frozenset(labels))


@settings(max_examples=80, deadline=None)
@given(clopens(), clopens())
def test_boolean_algebra_across_levels(a, b):
    assert (a | b).complement() == a.complement() & b.complement()
    assert (a - b) | (a & b) == a
    assert a.lift(4) == a and (a & b).issubset(a)
    assert (a | a.complement()).is_whole() and (a & a.complement()).is_empty()
    assert len(a.lift(a.level + 1)) == 2 * len(a)  # each path has two one-step extensions


def test_codes_roundtrip():
    a = ClopenSet(D, 2, frozenset({(0, 1), (1, 0)}))
    assert ClopenSet.from_codes(D, 2, a.codes()) == a
    assert a.mask().sum() == 2 and a.counts() == (1, 1)
