from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from bratteli_irs.clopen import ClopenSet
from bratteli_irs.diagram import enumerate_paths, stationary
from bratteli_irs.errors import DepthExceeded, InputError
from bratteli_irs.measure import (
    InvariantMeasure,
    ProductMeasureSpec,
    approximate_ergodic_set,
    clopen_measure,
    cylinder_measure,
    product_clopen_measure,
    sample_paths,
    stationary_measure,
)
from bratteli_irs.diagram import rank_paths


def test_odometer_measure_is_uniform(odo, odo_mu):
    assert odo_mu.mode == "rational"
    assert [odo_mu.q(n)[0] for n in range(1, 5)] == [Fraction(1, 2**n) for n in range(1, 5)]
    assert odo_mu.residuals() == (0, 0)


def test_all_ones_measure(ones_mu):
    assert ones_mu.q(2) == (Fraction(1, 4), Fraction(1, 4))
    assert ones_mu.vertex_mass(3) == (Fraction(1, 2), Fraction(1, 2))


def test_golden_mean_float_mode():
    d = stationary([[1, 1], [1, 0]], [1, 1])
    mu = stationary_measure(d, 12)
    assert mu.mode == "float"
    phi = (1 + 5**0.5) / 2
    assert mu.q(1)[0] == pytest.approx(1 / phi, abs=1e-12)
    compat, norm = mu.residuals()
    assert compat <= 1e-12 and norm <= 1e-12
    with pytest.raises(InputError, match="not rational"):
        stationary_measure(d, 5, "rational")


def test_nonprimitive_rejected():
    with pytest.raises(InputError, match="primitive"):
        stationary_measure(stationary([[2, 0], [0, 3]], [1, 1]))


def test_invalid_weights_rejected(odo):
    with pytest.raises(InputError, match="compatibility"):
        InvariantMeasure(odo, ((Fraction(1, 2),), (Fraction(1, 3),)), "rational")
    with pytest.raises(InputError, match="normalized"):
        InvariantMeasure(odo, ((Fraction(1, 3),),), "rational")
    with pytest.raises(InputError, match="negative"):
        InvariantMeasure(odo, ((-1,),), "float")


def test_depth_checked(odo_mu):
    with pytest.raises(DepthExceeded):
        odo_mu.q(odo_mu.depth + 1)


def test_product_spec():
    a = ProductMeasureSpec.parse("2,0,1")
    assert a.size == 3 and a.coordinate_labels() == (0, 0, 2)
    assert str(a) == "2,0,1"
    with pytest.raises(InputError):
        ProductMeasureSpec.parse("1,x")
    with pytest.raises(InputError):
        ProductMeasureSpec((-1,))


def test_clopen_measures(ones, ones_mu):
    a = ClopenSet(ones, 1, frozenset({(0, 0)}))
    assert clopen_measure(ones_mu, a) == Fraction(1, 2)
    assert clopen_measure(ones_mu, a.lift(4)) == Fraction(1, 2)
    assert product_clopen_measure(ProductMeasureSpec((3,)), [ones_mu], a) == Fraction(1, 8)
    p = enumerate_paths(ones, 2, 1)[0]
    assert cylinder_measure(ones_mu, p) == Fraction(1, 4)


def test_ergodic_set_two_components():
    d = stationary([[2, 0], [0, 3]], [1, 1])
    rep = approximate_ergodic_set(d, 20)
    assert rep.count == 2 and rep.stable
    masses = sorted(tuple(round(x, 9) for x in m.vertex_mass(3)) for m in rep.measures)
    assert masses == [(0.0, 1.0), (1.0, 0.0)]


def test_ergodic_set_odometer(odo):
    rep = approximate_ergodic_set(odo, 30)
    assert rep.count == 1 and rep.inter_depth_spread < 1e-12


@pytest.mark.parametrize("fixture", ["ones", "poly"])
def test_sampling_matches_cylinder_measure(request, fixture):
    """Chi-square goodness of fit of sampled level-3 cylinders."""
    d = request.getfixturevalue(fixture)
    mu = stationary_measure(d, 5) if fixture == "ones" else approximate_ergodic_set(d, 30).measures[0]
    rng = np.random.default_rng(2024)
    size = 40000
    verts, edges = sample_paths(mu, 3, size, rng)
    labels = rank_paths(d, verts, edges)
    stat, cells = 0.0, 0
    for v, h in enumerate(d.path_counts(3)):
        counts = np.bincount(labels[verts[:, 2] == v], minlength=h)
        expect = size * float(mu.q(3)[v])
        stat += float(((counts - expect) ** 2 / expect).sum())
        cells += h
    # generous bound: mean cells-1, sd sqrt(2(cells-1))
    assert stat < cells - 1 + 6 * (2 * (cells - 1)) ** 0.5
