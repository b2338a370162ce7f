from fractions import Fraction
import itertools
import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from madcantor.core import (
    dist_nearest_int,
    iter_height_bounded,
    mad_form_bounds,
    prod_plus,
    scan_min_form,
    sup_norm,
)

from conftest import mp

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1000)
int_vectors = st.lists(st.integers(-30, 30), min_size=1, max_size=4)


def test_dist_nearest_int_examples():
    assert dist_nearest_int(Fraction(27, 10)) == Fraction(3, 10)
    assert dist_nearest_int(Fraction(1, 2)) == Fraction(1, 2)
    assert dist_nearest_int(Fraction(-7, 3)) == Fraction(1, 3)


@given(rationals, st.integers(-50, 50))
def test_dist_nearest_int_periodic_and_even(x, z):
    d = dist_nearest_int(x)
    assert 0 <= d <= Fraction(1, 2)
    assert dist_nearest_int(x + z) == d
    assert dist_nearest_int(-x) == d
    assert d == min(abs(x - math.floor(x)), abs(x - math.ceil(x)))


def test_prod_plus_examples():
    assert prod_plus((0, 3, -2)) == 6
    assert prod_plus((0, 0, 1)) == 1
    assert prod_plus((-5,)) == 5


@given(int_vectors.filter(any))
def test_prod_plus_bounded_by_sup_norm(q):
    assert 1 <= prod_plus(q) <= sup_norm(q) ** len(q)


@pytest.mark.parametrize("n,bound", [(1, 7), (2, 12), (3, 8)])
def test_height_enumeration_matches_brute_force(n, bound):
    brute = [
        q
        for q in itertools.product(range(-bound, bound + 1), repeat=n)
        if any(q) and prod_plus(q) <= bound
    ]
    assert list(iter_height_bounded(n, bound)) == brute


def test_form_examples():
    assert mad_form_bounds([[Fraction(1, 3)]], [0], (2,)) == mad_form_bounds([[Fraction(1, 3)]], [0], (2,))
    b = mad_form_bounds([[Fraction(1, 3)]], [0], (2,))
    assert b.lower == b.upper == Fraction(2, 3)
    b = mad_form_bounds([[0]], [Fraction(1, 2)], (1,))
    assert b.lower == b.upper == Fraction(1, 2)
    b = mad_form_bounds([[Fraction(1, 4), Fraction(1, 4)]], [0], (1, 2))
    assert b.lower == b.upper == Fraction(1, 2)


def reference_form(A, gamma, q):
    H = prod_plus(q)
    out = mpmath.mpf(H) * mpmath.log(max(mpmath.e, H)) ** (len(A) + len(A[0]) - 1)
    for row, g in zip(A, gamma):
        v = sum(Fraction(a) * b for a, b in zip(row, q)) + g
        out *= mp(dist_nearest_int(v))
    return out


@given(
    st.lists(st.lists(rationals, min_size=2, max_size=2), min_size=1, max_size=2),
    st.lists(st.integers(-40, 40), min_size=2, max_size=2).filter(any),
)
def test_form_brackets_reference(A, q):
    gamma = [Fraction(1, 7)] * len(A)
    b = mad_form_bounds(A, gamma, q, Fraction(1, 1 << 30))
    ref = reference_form(A, gamma, q)
    assert mp(b.lower) <= ref <= mp(b.upper)
    assert b.width <= Fraction(1, 1 << 30)


def test_scan_examples():
    assert scan_min_form([[Fraction(1, 2)]], [0], 4) == (0, (2,))
    # (1, -1) is a zero of the form in the first shell, ahead of (1, 2)
    assert scan_min_form([[Fraction(1, 3), Fraction(1, 3)]], [0], 3) == (0, (1, -1))
    assert scan_min_form([[Fraction(1, 3), Fraction(2, 3)]], [0], 3) == (0, (1, 1))


def brute_scan(A, gamma, budget):
    """Double loop over the box |q| <= budget with the plain definition."""
    n = len(A[0])
    best = None
    for q in itertools.product(range(-budget, budget + 1), repeat=n):
        if not any(q) or prod_plus(q) > budget:
            continue
        v = mad_form_bounds(A, gamma, q).lower
        if best is None or v < best:
            best = v
    return best


@given(
    st.lists(st.lists(st.fractions(0, 1, max_denominator=97), min_size=2, max_size=2), min_size=1, max_size=1),
    st.sampled_from([(0,), (Fraction(1, 3),)]),
)
def test_scan_matches_brute_force(A, gamma):
    bound, q = scan_min_form(A, list(gamma), 50)
    assert bound == brute_scan(A, list(gamma), 50)
    assert mad_form_bounds(A, list(gamma), q).lower == bound


def test_scan_is_worker_independent():
    A = [[Fraction(17, 97), Fraction(31, 89)]]
    assert scan_min_form(A, [0], 60, workers=1) == scan_min_form(A, [0], 60, workers=3)


def test_scan_empty_range():
    assert scan_min_form([[Fraction(1, 3)]], [0], 0) == (None, None)
