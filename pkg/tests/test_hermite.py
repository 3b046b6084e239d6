from __future__ import annotations

import sympy
import pytest

from bratteli_irs.diagram import BratteliDiagram, polynomial_matrix
from bratteli_irs.hermite import QI2, check_hermite, hermite, hermite_count


def test_ring_arithmetic():
    sqrt2 = QI2(0, 0, 1, 0)
    i = QI2(0, 1)
    assert (sqrt2 * sqrt2).as_int() == 2
    assert (i * i).as_int() == -1
    assert (QI2(2, 4, 1, 3)).div_sqrt2() * sqrt2 == QI2(2, 4, 1, 3)
    with pytest.raises(ArithmeticError):
        QI2(1).div_sqrt2()
    with pytest.raises(ArithmeticError):
        i.as_int()


@pytest.mark.parametrize("k", range(0, 12))
def test_hermite_matches_sympy(k):
    x = sympy.Symbol("x")
    poly = sympy.hermite(k, x)
    value = sympy.expand(poly.subs(x, sympy.I * sympy.sqrt(2)))
    ours = hermite(k, QI2(0, 0, 0, 1))
    re, im = sympy.re(value), sympy.im(value)
    assert sympy.expand(ours.a + ours.c * sympy.sqrt(2) - re) == 0
    assert sympy.expand(ours.b + ours.d * sympy.sqrt(2) - im) == 0


def test_counts_sequence():
    assert [hermite_count(n) for n in range(2, 9)] == [2, 4, 10, 28, 86, 284, 998]


def test_identity_holds_to_20(poly):
    rep = check_hermite(poly, 20)
    assert rep.passed and rep.labeling == "row0-bottom"
    assert rep.rows[-1][1] == 73667056394
    assert rep.rows[-1][2] == 324408293714


def test_swapped_diagram_reports_other_labeling():
    mats = tuple(tuple(tuple(r) for r in reversed([row[::-1] for row in polynomial_matrix(n)])) for n in range(1, 21))
    d = BratteliDiagram((1, 1), mats)
    rep = check_hermite(d, 20)
    assert rep.labeling == "row1-bottom"


def test_wrong_diagram_fails():
    d = BratteliDiagram((1, 1), tuple(((1, 1), (1, 1)) for _ in range(20)))
    assert not check_hermite(d, 20).passed
