import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from polyxform import (GridSet, IndexFamily, coercivity_exponent, coercivity_ratio,
                       cofactor_top_coefficient, evaluate_V)
from polyxform.errors import AdmissibilityError, DegeneracyError, DimensionError
from polyxform.multiindex import MultiIndex, iter_multiindices
from polyxform.suites import random_box_union
from polyxform.vandermonde import monomial_matrix, vandermonde_integral


def test_classical_vandermonde():
    fam = IndexFamily.full(1, 1, 3)
    x = np.array([0.3, -1.2, 2.0, 0.7])
    want = np.prod([x[j] - x[i] for i, j in itertools.combinations(range(4), 2)])
    assert evaluate_V(fam, x).value == pytest.approx(want, rel=1e-12)


def test_product_over_components():
    fam = IndexFamily.full(1, 2, 1)
    x = np.array([[0.5], [2.0]])
    ev = evaluate_V(fam, x)
    assert ev.components == pytest.approx((1.5, 1.5))
    assert ev.value == pytest.approx(2.25)
    assert abs(ev) == pytest.approx(2.25)


def test_batched_shape_and_checks():
    fam = IndexFamily.full(2, 1, 1)
    pts = np.random.default_rng(0).normal(size=(5, 3, 2))
    assert evaluate_V(fam, pts).value.shape == (5,)
    with pytest.raises(DimensionError):
        evaluate_V(fam, np.zeros((2, 2)))
    with pytest.raises(AdmissibilityError):
        evaluate_V(IndexFamily.from_layers([[(0,), (1,)], [(0,)]]), np.zeros((2, 1)))


def test_sign_flips_under_swap():
    fam = IndexFamily.full(2, 1, 1)
    pts = np.random.default_rng(1).normal(size=(3, 2))
    a = evaluate_V(fam, pts).value
    b = evaluate_V(fam, pts[[1, 0, 2]]).value
    assert b == pytest.approx(-a)


def _sympy_top_coefficient(layer, xprime):
    n = len(layer[0])
    xs = sp.symbols(f"x0:{n}")
    rows = [[sp.Mul(*[xi**ai for xi, ai in zip(xs, a.exponents)]) for a in layer]]
    for pt in xprime:
        exact = [sp.Rational(Fraction(float(v))) for v in pt]
        rows.append([sp.Mul(*[v**ai for v, ai in zip(exact, a.exponents)]) for a in layer])
    det = sp.Poly(sp.Matrix(rows).det(), *xs)
    top = max(layer)
    return float(det.coeff_monomial(sp.Mul(*[xi**ai for xi, ai in zip(xs, top.exponents)])))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(0, 1000))
def test_cofactor_matches_sympy(n, d, seed):
    rng = np.random.default_rng(seed)
    layer = list(iter_multiindices(n, d))
    xprime = rng.integers(-3, 4, size=(len(layer) - 1, n)).astype(float)
    got = cofactor_top_coefficient(layer, xprime)
    assert got == pytest.approx(_sympy_top_coefficient(layer, xprime), rel=1e-9, abs=1e-9)


def test_cofactor_trivial_layer():
    assert cofactor_top_coefficient([MultiIndex((0,))], np.zeros((0, 1))) == 1.0


def test_monomial_matrix_layout():
    layer = [MultiIndex((0,)), MultiIndex((1,)), MultiIndex((2,))]
    M = monomial_matrix(layer, np.array([[2.0], [3.0]]))
    np.testing.assert_array_equal(M, [[1, 2, 4], [1, 3, 9]])


# coercivity ---------------------------------------------------------------------

def test_coercivity_exponent():
    assert coercivity_exponent(IndexFamily.full(1, 1, 1)) == Fraction(2, 3)
    assert coercivity_exponent(IndexFamily.full(2, 1, 1)) == Fraction(3, 4)


def test_coercivity_same_interval():
    r = coercivity_ratio(IndexFamily.full(1, 1, 1), [GridSet.box([0], [1])] * 2)
    assert r.ratio == pytest.approx(1 / 3, rel=5e-3)


def test_coercivity_separated_intervals():
    r = coercivity_ratio(IndexFamily.full(1, 1, 1), [GridSet.box([0], [1]), GridSet.box([2], [3])])
    assert r.ratio == pytest.approx(2.0, rel=5e-3)


def test_midpoint_rule_exact_for_linear_integrand():
    # |x2 - x1| is affine on separated cells, so every refinement is exact
    fam = IndexFamily.full(1, 1, 1)
    sets = [GridSet.box([0], [1]), GridSet.box([2], [3])]
    assert vandermonde_integral(fam, sets, 1) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("lam", [0.25, 4.0])
def test_coercivity_scale_invariance(lam):
    fam = IndexFamily.from_layers([[(0, 0), (1, 0), (0, 1)]])
    rng = np.random.default_rng(2)
    base = [random_box_union(rng, 2, res=2, boxes=1, lo=-1, hi=1) for _ in range(3)]
    r1 = coercivity_ratio(fam, base, sub=4).ratio
    r2 = coercivity_ratio(fam, [E.dilated([lam, lam]) for E in base], sub=4).ratio
    assert r2 == pytest.approx(r1, rel=1e-2)


def test_coercivity_argument_checks():
    fam = IndexFamily.full(1, 1, 1)
    with pytest.raises(DimensionError):
        coercivity_ratio(fam, [GridSet.box([0], [1])])
    with pytest.raises(DegeneracyError):
        coercivity_ratio(fam, [GridSet.box([0], [1]), GridSet.empty([0], [1], 2)])
