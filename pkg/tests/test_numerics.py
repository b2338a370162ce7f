from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from madcantor.errors import NonPositiveInput
from madcantor.numerics import (
    LogBounds,
    compare_exp,
    e_bounds,
    exp_bounds,
    iroot,
    log_bounds,
    log_star,
    log_star_bounds,
    root_bounds,
    sqrt_lower,
    sqrt_upper,
)

from conftest import mp

positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**9).filter(lambda x: x > 0)
PREC = Fraction(1, 1 << 50)


def brackets(b, ref):
    # the reference itself carries 200-digit rounding
    tol = mpmath.mpf(10) ** -150 * (1 + abs(ref))
    return mp(b.lower) - tol <= ref <= mp(b.upper) + tol


@given(positive)
def test_log_brackets_reference(x):
    b = log_bounds(x, PREC)
    assert b.width <= PREC
    assert brackets(b, mpmath.log(mp(x)))


@given(st.fractions(min_value=-60, max_value=60))
def test_exp_brackets_reference(x):
    b = exp_bounds(x, Fraction(1, 1 << 40))
    assert brackets(b, mpmath.exp(mp(x)))


@given(positive, st.integers(2, 7))
def test_root_brackets_reference(x, k):
    b = root_bounds(x, k, PREC)
    assert brackets(b, mpmath.root(mp(x), k))


@given(positive)
def test_log_star_brackets_reference(x):
    b = log_star_bounds(x, PREC)
    ref = mpmath.log(max(mpmath.e, mp(x)))
    assert brackets(b, ref)
    assert b.lower >= 1


def test_log_star_exact_below_e():
    for x in (Fraction(1), Fraction(2), Fraction(1, 3), Fraction(27, 10)):
        b = log_star_bounds(x, Fraction(1, 1000))
        assert b.lower == b.upper == 1


def test_log_star_of_eight():
    b = log_star(8, Fraction(1, 1000))
    assert b.width <= Fraction(1, 1000)
    assert brackets(b, mpmath.log(8))
    assert abs(float(b.mid) - 2.0794415) < 1e-3


@given(positive, positive)
def test_log_star_monotone(x, y):
    x, y = min(x, y), max(x, y)
    assert log_star_bounds(x, PREC).lower <= log_star_bounds(y, PREC).upper


def test_non_positive_rejected():
    with pytest.raises(NonPositiveInput):
        log_bounds(0, PREC)
    with pytest.raises(NonPositiveInput):
        log_star_bounds(Fraction(-1), PREC)


def test_e_bounds():
    assert brackets(e_bounds(Fraction(1, 1 << 60)), mpmath.e)


@given(st.integers(0, 10**40), st.integers(1, 6))
def test_iroot_is_floor_root(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


def test_sqrt_bounds_exact_on_squares():
    assert sqrt_upper(Fraction(49, 4)) == sqrt_lower(Fraction(49, 4)) == Fraction(7, 2)
    assert mp(sqrt_lower(5)) < mpmath.sqrt(5) < mp(sqrt_upper(5))


@given(st.fractions(min_value=-20, max_value=20).filter(lambda x: x != 0), positive)
def test_compare_exp_matches_reference(x, y):
    ref = mpmath.exp(mp(x)) - mp(y)
    assert compare_exp(x, y) == (1 if ref > 0 else -1)


def test_compare_exp_at_zero():
    assert compare_exp(0, 1) == 0
    assert compare_exp(0, Fraction(1, 2)) == 1


def test_logbounds_invariants():
    b = LogBounds(Fraction(1), Fraction(2), Fraction(1))
    assert Fraction(3, 2) in b and 3 not in b
    with pytest.raises(ValueError):
        LogBounds(Fraction(2), Fraction(1), Fraction(1))
    assert LogBounds.exact(5).is_exact
