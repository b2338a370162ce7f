"""Certified rational enclosures of log, exp and real roots.

Everything here works on exact ``Fraction`` inputs and returns rational
lower/upper bounds.  Internally the series are evaluated in fixed point
(integers scaled by ``2**W``) with every rounding step pointed in the
direction that keeps the bound valid, so no float ever influences a result.

The private ``*_lohi(x, bits)`` helpers return a pair of Fractions whose
width shrinks like ``2**-bits``; the public functions wrap them in
:func:`refine` to meet a requested absolute precision.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

from .errors import NonPositiveInput

START_BITS = 64
MAX_BITS = 1 << 15


@dataclass(frozen=True)
class LogBounds:
    """Closed rational enclosure ``lower <= value <= upper``.

    Used for every certified real quantity, not only logarithms.
    """

    lower: Fraction
    upper: Fraction
    precision: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty enclosure [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value):
        value = Fraction(value)
        return cls(value, value, Fraction(0))

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def is_exact(self):
        return self.lower == self.upper

    @property
    def mid(self):
        return (self.lower + self.upper) / 2

    def __contains__(self, x):
        return self.lower <= x <= self.upper

    def __float__(self):
        return float(self.mid)


def refine(fn, precision, start_bits=START_BITS):
    """Call ``fn(bits)`` with doubling ``bits`` until the width is small enough."""
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    bits = start_bits
    while True:
        lo, hi = fn(bits)
        if hi - lo <= precision:
            return LogBounds(Fraction(lo), Fraction(hi), precision)
        if bits >= MAX_BITS:
            raise ArithmeticError(f"could not reach precision {precision}")
        bits *= 2


def floor_div(a, b):
    return a // b


def ceil_div(a, b):
    return -((-a) // b)


def _scaled_floor(x, w):
    return (x.numerator << w) // x.denominator


def _scaled_ceil(x, w):
    return ceil_div(x.numerator << w, x.denominator)


def round_down(x, w):
    """Largest multiple of 2**-w not exceeding x."""
    x = Fraction(x)
    return Fraction(_scaled_floor(x, w), 1 << w)


def round_up(x, w):
    x = Fraction(x)
    return Fraction(_scaled_ceil(x, w), 1 << w)


def iroot(n, k):
    """Floor of the real k-th root of a non-negative integer."""
    if n < 0:
        raise NonPositiveInput("iroot of a negative integer")
    if k == 1 or n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


# -- fixed point series ------------------------------------------------------


def _atanh_fixed(z, w):
    """Bounds on atanh(z) * 2**w for rational 0 <= z <= 1/3."""
    one = 1 << w
    zl, zh = _scaled_floor(z, w), _scaled_ceil(z, w)
    z2l = (zl * zl) >> w
    z2h = ceil_div(zh * zh, one)
    lo = 0
    term = zl
    j = 0
    while term:
        lo += term // (2 * j + 1)
        term = (term * z2l) >> w
        j += 1
    hi = 0
    term = zh
    j = 0
    while term > 1 or j < 2:
        hi += ceil_div(term, 2 * j + 1)
        term = ceil_div(term * z2h, one)
        j += 1
        if term == 0:
            break
    # remaining tail: sum_{i>=j} z^(2i+1)/(2i+1) <= term / ((2j+1)(1 - z^2)), 1/(1-z^2) <= 9/8
    hi += ceil_div(9 * term, 8 * (2 * j + 1)) + 1
    return lo, hi


@lru_cache(maxsize=64)
def _ln2_fixed(w):
    lo, hi = _atanh_fixed(Fraction(1, 3), w)
    return 2 * lo, 2 * hi


def _exp_unit_fixed(r, w, upward):
    """One-sided bound on exp(r) * 2**w for rational 0 <= r < 1."""
    one = 1 << w
    if upward:
        rs = _scaled_ceil(r, w)
        total = one
        term = one
        j = 1
        while True:
            term = ceil_div(term * rs, one * j)
            total += term
            j += 1
            if term <= 1 and j > 2:
                break
        # ratio of consecutive later terms is r/(j+1) <= 1/2, so the tail is at most the last term
        return total + term + 1
    rs = _scaled_floor(r, w)
    total = one
    term = one
    j = 1
    while term:
        term = (term * rs) // (one * j)
        total += term
        j += 1
    return total


def _log_lohi(x, bits):
    x = Fraction(x)
    if x <= 0:
        raise NonPositiveInput(f"log of non-positive {x}")
    if x == 1:
        return Fraction(0), Fraction(0)
    k = x.numerator.bit_length() - x.denominator.bit_length()
    y = x / 2**k if k >= 0 else x * 2**-k
    if y < 1:
        y *= 2
        k -= 1
    elif y >= 2:
        y /= 2
        k += 1
    w = bits + 8 + abs(k).bit_length()
    z = (y - 1) / (y + 1)
    a_lo, a_hi = _atanh_fixed(z, w)
    l_lo, l_hi = _ln2_fixed(w)
    if k >= 0:
        lo = 2 * a_lo + k * l_lo
        hi = 2 * a_hi + k * l_hi
    else:
        lo = 2 * a_lo + k * l_hi
        hi = 2 * a_hi + k * l_lo
    return Fraction(lo, 1 << w), Fraction(hi, 1 << w)


def _exp_lohi(x, bits):
    x = Fraction(x)
    if x < 0:
        lo, hi = _exp_lohi(-x, bits)
        return 1 / hi, 1 / lo
    if x == 0:
        return Fraction(1), Fraction(1)
    guess = int(x / Fraction(693147, 1000000)) + 2
    w = bits + 16 + guess + guess.bit_length()
    l_lo, l_hi = _ln2_fixed(w)
    ln2_hi = Fraction(l_hi, 1 << w)
    ln2_lo = Fraction(l_lo, 1 << w)
    k = math.floor(x / ln2_hi)
    r_lo = x - k * ln2_hi
    r_hi = x - k * ln2_lo
    lo = Fraction(_exp_unit_fixed(r_lo, w, upward=False), 1 << w)
    hi = Fraction(_exp_unit_fixed(r_hi, w, upward=True), 1 << w)
    return lo * 2**k, hi * 2**k


def _root_lohi(x, k, bits):
    """Bounds on the real k-th root of rational x >= 0, width about 2**-bits."""
    x = Fraction(x)
    if x < 0:
        raise NonPositiveInput(f"root of negative {x}")
    a, b = x.numerator, x.denominator
    n = a * b ** (k - 1) << (k * bits)
    r = iroot(n, k)
    den = b << bits
    if r**k == n:
        return Fraction(r, den), Fraction(r, den)
    return Fraction(r, den), Fraction(r + 1, den)


# -- public API --------------------------------------------------------------


def log_bounds(x, precision):
    """Enclosure of the natural logarithm of rational x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise NonPositiveInput(f"log of non-positive {x}")
    if x == 1:
        return LogBounds.exact(0)
    return refine(lambda bits: _log_lohi(x, bits), precision)


def exp_bounds(x, precision):
    x = Fraction(x)
    if x == 0:
        return LogBounds.exact(1)
    return refine(lambda bits: _exp_lohi(x, bits), precision)


def e_bounds(precision):
    return exp_bounds(1, precision)


def root_bounds(x, k, precision):
    x = Fraction(x)
    return refine(lambda bits: _root_lohi(x, k, bits), precision, start_bits=32)


def sqrt_bounds(x, precision):
    return root_bounds(x, 2, precision)


def sqrt_upper(x, bits=40):
    """A rational upper bound on sqrt(x), within about 2**-bits."""
    return _root_lohi(Fraction(x), 2, bits)[1]


def sqrt_lower(x, bits=40):
    return _root_lohi(Fraction(x), 2, bits)[0]


def _log_star_lohi(x, bits):
    lo, hi = _log_lohi(x, bits)
    return max(lo, Fraction(1)), max(hi, Fraction(1))


@lru_cache(maxsize=1 << 16)
def log_star_bounds(x, precision):
    """Enclosure of log*(x) = log(max(e, x)) for rational x > 0.

    When x <= e can be certified the result is exactly 1.  Since log* >= 1 the
    lower bound is never reported below 1.
    """
    x = Fraction(x)
    precision = Fraction(precision)
    if x <= 0:
        raise NonPositiveInput(f"log* of non-positive {x}")
    if x <= 2:
        return LogBounds(Fraction(1), Fraction(1), precision)
    bits = START_BITS
    while True:
        lo, hi = _log_lohi(x, bits)
        if hi <= 1:
            return LogBounds(Fraction(1), Fraction(1), precision)
        if lo > 1 and hi - lo <= precision:
            return LogBounds(lo, hi, precision)
        if bits >= MAX_BITS:
            raise ArithmeticError(f"could not separate {x} from e")
        bits *= 2


def log_star(x, precision=Fraction(1, 1 << 40)):
    return log_star_bounds(Fraction(x), Fraction(precision))


def compare_exp(x, y, max_bits=MAX_BITS):
    """Certified sign of exp(x) - y for rational x and rational y > 0.

    Returns -1 or +1.  Loops forever only if exp(x) == y, which for rational
    x != 0 cannot happen (Lindemann); x == 0 is handled exactly.
    """
    x, y = Fraction(x), Fraction(y)
    if x == 0:
        return (1 > y) - (1 < y)
    bits = START_BITS
    while bits <= max_bits:
        lo, hi = _exp_lohi(x, bits)
        if hi < y:
            return -1
        if lo > y:
            return 1
        bits *= 2
    raise ArithmeticError("comparison undecided")


def mul_nonneg(a, b):
    """Product of two enclosures of non-negative quantities, as (lo, hi)."""
    return a[0] * b[0], a[1] * b[1]


def pow_nonneg(a, k):
    return a[0] ** k, a[1] ** k
