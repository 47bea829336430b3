import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyxform.errors import DimensionError, DomainError
from polyxform.multiindex import (IndexRange, MultiIndex, dict_compare, enumerate_multiindices,
                                  iter_multiindices)


def test_small_enumeration_order():
    got = [m.exponents for m in iter_multiindices(2, 2)]
    assert got == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]


@given(st.integers(1, 4), st.integers(0, 5))
def test_enumeration_matches_sorted_brute_force(n, d):
    brute = sorted(t for t in itertools.product(range(d + 1), repeat=n) if sum(t) <= d)
    got = [m.exponents for m in iter_multiindices(n, d)]
    assert got == brute
    assert len(got) == math.comb(n + d, d) == IndexRange(n, d).size


@given(st.lists(st.integers(0, 4), min_size=3, max_size=3),
       st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_dict_compare_agrees_with_tuple_order(a, b):
    A, B = MultiIndex(tuple(a)), MultiIndex(tuple(b))
    expect = (tuple(a) > tuple(b)) - (tuple(a) < tuple(b))
    assert dict_compare(A, B) == expect
    assert (A < B) == (expect < 0)


def test_dict_compare_rejects_length_mismatch():
    with pytest.raises(DimensionError):
        dict_compare(MultiIndex((1, 2)), MultiIndex((1,)))


def test_basic_arithmetic():
    a = MultiIndex((2, 1))
    assert a.degree == 3
    assert a + MultiIndex((0, 3)) == MultiIndex((2, 4))
    assert a.factorial() == 2
    assert a.dominates(MultiIndex((1, 1)))
    assert not a.dominates(MultiIndex((0, 2)))
    assert MultiIndex.zero(3).is_zero
    assert MultiIndex.unit(3, 1).exponents == (0, 1, 0)


def test_monomial_evaluation():
    a = MultiIndex((2, 1))
    t = np.array([[3.0, 2.0], [-1.0, 5.0]])
    np.testing.assert_allclose(a.monomial(t), [18.0, 5.0])
    with pytest.raises(DimensionError):
        a.monomial(np.ones(3))


def test_negative_entries_rejected():
    with pytest.raises(DomainError):
        MultiIndex((1, -1))


def test_json_roundtrip():
    a = MultiIndex((0, 4, 1))
    assert MultiIndex.from_json(a.to_json()) == a
    assert MultiIndex.from_json("[0, 4, 1]") == a


def test_enumerate_list_matches_iterator():
    assert enumerate_multiindices(3, 2) == list(IndexRange(3, 2))
