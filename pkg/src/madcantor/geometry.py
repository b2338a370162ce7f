"""Exact geometry on matrix cubes in R^{m x n}.

The danger set of P = (p, q) is

    Delta(P) = {X : prod_i |X_i q + gamma_i + p_i| <= eps(q),
                    |X_i q + gamma_i + p_i| <= 1/2 for every row i},
    eps(q)   = c / (prod_plus(q) * log*(prod_plus(q))**(m+n-1)).

Rows of X are disjoint coordinate blocks, so the image of a cube under
X -> (X_1 q, ..., X_m q) is a product of intervals and every intersection test
below reduces to one interval per row.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import itertools
import math

from .core import prod_plus, iter_height_bounded, row_value
from .numerics import iroot, log_star_bounds

# log* precision and downward slack used for the removal threshold; coarser
# than core.FORM_LOG_PRECISION on purpose so that every re-evaluated form at a
# surviving point certifies strictly above c.
EPS_LOG_PRECISION = Fraction(1, 1 << 32)
EPS_LOG_SLACK = Fraction(1, 1 << 24)


@dataclass(frozen=True)
class Cube:
    """Closed axis-aligned cube given by its lower corner and edge."""

    lower: tuple
    edge: Fraction

    def __post_init__(self):
        lower = tuple(tuple(Fraction(v) for v in row) for row in self.lower)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "edge", Fraction(self.edge))
        if self.edge < 0:
            raise ValueError("negative edge")
        if len({len(row) for row in lower}) != 1:
            raise ValueError("ragged lower corner")

    @property
    def m(self):
        return len(self.lower)

    @property
    def n(self):
        return len(self.lower[0])

    @property
    def intervals(self):
        return tuple(tuple((a, a + self.edge) for a in row) for row in self.lower)

    @property
    def upper(self):
        return tuple(tuple(a + self.edge for a in row) for row in self.lower)

    def center(self):
        half = self.edge / 2
        return tuple(tuple(a + half for a in row) for row in self.lower)

    def contains(self, X):
        return all(
            a <= Fraction(x) <= a + self.edge
            for row, xrow in zip(self.lower, X)
            for a, x in zip(row, xrow)
        )

    def child(self, index, R):
        """Sub-cube ``index`` of the R**(mn)-way split.

        Entries are read row-major, the first entry being the most significant
        base-R digit of ``index``.
        """
        digits = child_digits(index, R, self.m * self.n)
        sub = self.edge / R
        flat = [a + d * sub for a, d in zip(itertools.chain(*self.lower), digits)]
        n = self.n
        return Cube(tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(self.m)), sub)

    def children(self, R):
        return [self.child(i, R) for i in range(R ** (self.m * self.n))]


def child_digits(index, R, size):
    if not 0 <= index < R**size:
        raise ValueError(f"child index {index} outside [0, {R ** size})")
    digits = []
    for _ in range(size):
        index, d = divmod(index, R)
        digits.append(d)
    return digits[::-1]


@dataclass(frozen=True)
class Hyperplane:
    """{X : sum_ij coefficients[i][j] X_ij = offset}."""

    coefficients: tuple
    offset: Fraction

    def __post_init__(self):
        coeffs = tuple(tuple(Fraction(v) for v in row) for row in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "offset", Fraction(self.offset))
        if not any(v for row in coeffs for v in row):
            raise ValueError("hyperplane coefficients are all zero")

    def evaluate(self, X):
        return sum(
            (a * Fraction(x) for row, xrow in zip(self.coefficients, X) for a, x in zip(row, xrow)),
            Fraction(0),
        )


@dataclass(frozen=True)
class DangerPoint:
    p: tuple
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        if not any(self.q):
            raise ValueError("q must be non-zero")

    @property
    def is_primitive(self):
        return math.gcd(*self.p, *self.q) == 1

    def __str__(self):
        return f"P(p={self.p}, q={self.q})"


@lru_cache(maxsize=1 << 16)
def epsilon_upper(c, height, exponent):
    """Rational upper bound on c / (height * log*(height)**exponent).

    log* is bounded below at EPS_LOG_PRECISION and then lowered by
    EPS_LOG_SLACK (never below 1, where log* is exact).  The threshold is
    therefore slightly larger than the true radius: a few extra cubes may be
    removed, none that actually meet the danger set are kept.
    """
    c = Fraction(c)
    L = log_star_bounds(Fraction(height), EPS_LOG_PRECISION)
    lower = L.lower if L.is_exact else max(Fraction(1), L.lower - EPS_LOG_SLACK)
    return c / (height * lower**exponent)


def band_height_range(R, k):
    """Integer heights H with R**k <= H**3 < R**(k+1), as (lo, hi) inclusive."""
    hi = iroot(R ** (k + 1) - 1, 3)
    lo = iroot(R**k - 1, 3) + 1 if k > 0 else 1
    return lo, hi


@lru_cache(maxsize=256)
def _band(n, R, k):
    lo, hi = band_height_range(R, k)
    if lo > hi:
        return ()
    return tuple(q for q in iter_height_bounded(n, hi) if prod_plus(q) >= lo)


def enumerate_band(n, R, k):
    """All non-zero q in Z^n with R**k <= prod_plus(q)**3 < R**(k+1), lexicographic."""
    if R < 2:
        raise ValueError("R must be at least 2")
    return list(_band(n, R, k))


def band_of(q, R):
    """The unique k >= 0 with R**k <= prod_plus(q)**3 < R**(k+1)."""
    h3 = prod_plus(q) ** 3
    k = 0
    while R ** (k + 1) <= h3:
        k += 1
    return k


def row_range(cube_row, q, shift):
    """Exact range of x . q + shift over the box with the given (lo, hi) entries."""
    lo = hi = Fraction(shift)
    for (a, b), v in zip(cube_row, q):
        if v >= 0:
            lo += a * v
            hi += b * v
        else:
            lo += b * v
            hi += a * v
    return lo, hi


def _p_range(lo, hi, half=Fraction(1, 2)):
    """Integers p with [lo + p, hi + p] meeting [-half, half]."""
    return range(math.ceil(-half - hi), math.floor(half - lo) + 1)


def candidate_points(cube, q, gamma, primitive=True):
    """Danger points P = (p, q) whose row constraints |.| <= 1/2 can meet the cube.

    With ``primitive`` the list is restricted to gcd(p, q) = 1.
    """
    q = tuple(int(v) for v in q)
    if not any(q):
        raise ValueError("q must be non-zero")
    ranges = []
    for row, g in zip(cube.intervals, gamma):
        lo, hi = row_range(row, q, g)
        ranges.append(_p_range(lo, hi))
    gq = math.gcd(*q)
    out = []
    for p in itertools.product(*ranges):
        if primitive and math.gcd(gq, *p) != 1:
            continue
        out.append(DangerPoint(p, q))
    return out


def min_abs_clipped(lo, hi, half=Fraction(1, 2)):
    """min |v| over [lo, hi] intersected with [-half, half]; None if empty."""
    lo, hi = max(lo, -half), min(hi, half)
    if lo > hi:
        return None
    if lo <= 0 <= hi:
        return Fraction(0)
    return min(abs(lo), abs(hi))


def box_meets_set(box_rows, q, shifts, eps, half=Fraction(1, 2)):
    """Exact test: does the box meet {prod |X_i q + s_i| <= eps, |X_i q + s_i| <= half}?"""
    prod = Fraction(1)
    for row, s in zip(box_rows, shifts):
        lo, hi = row_range(row, q, s)
        v = min_abs_clipped(lo, hi, half)
        if v is None:
            return False
        prod *= v
    return prod <= eps


def cube_meets_danger_eps(cube, point, gamma, eps):
    shifts = [Fraction(g) + p for g, p in zip(gamma, point.p)]
    return box_meets_set(cube.intervals, point.q, shifts, Fraction(eps))


def cube_meets_danger(cube, point, gamma, c):
    """Conservative test of cube & Delta(P) != {} using the upper radius bound.

    Never answers False when the intersection is non-empty.
    """
    eps = epsilon_upper(Fraction(c), prod_plus(point.q), cube.m + cube.n - 1)
    return cube_meets_danger_eps(cube, point, gamma, eps)


def point_in_danger(X, point, gamma, c):
    return cube_meets_danger(Cube(X, 0), point, gamma, c)


def cube_meets_hyperplane(cube, hyperplane):
    lo = hi = Fraction(0)
    for row, crow in zip(cube.intervals, hyperplane.coefficients):
        for (a, b), v in zip(row, crow):
            if v >= 0:
                lo += a * v
                hi += b * v
            else:
                lo += b * v
                hi += a * v
    return lo <= hyperplane.offset <= hi


def row_values(X, q, gamma):
    return [row_value(row, q, g) for row, g in zip(X, gamma)]


def first_danger_hit(cube, q, gamma, c, primitive=True):
    """First P = (p, q) (p lexicographic) whose danger set meets the cube, or None.

    Same answer as running :func:`cube_meets_danger` over
    :func:`candidate_points`, with each row interval computed once.
    """
    q = tuple(int(v) for v in q)
    eps = epsilon_upper(Fraction(c), prod_plus(q), cube.m + cube.n - 1)
    per_row = []
    for row, g in zip(cube.intervals, gamma):
        lo, hi = row_range(row, q, g)
        opts = []
        for p in _p_range(lo, hi):
            v = min_abs_clipped(lo + p, hi + p)
            if v is not None:
                opts.append((p, v))
        if not opts:
            return None
        per_row.append(opts)
    if not primitive:
        # without the gcd filter every row may take its own best p
        best = Fraction(1)
        for opts in per_row:
            best *= min(v for _, v in opts)
        if best > eps:
            return None
    gq = math.gcd(*q)
    for combo in itertools.product(*per_row):
        prod = Fraction(1)
        for _, v in combo:
            prod *= v
        if prod <= eps:
            p = tuple(pi for pi, _ in combo)
            if primitive and math.gcd(gq, *p) != 1:
                continue
            return DangerPoint(p, q)
    return None
