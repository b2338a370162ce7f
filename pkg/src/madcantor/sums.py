"""Sums of reciprocals of fractional parts, S_L(Q) = sum over 0 < q in the box
of prod_i ||L_i q||^{-1}, for rational matrices L.

Terms are grouped by shells of |q|_inf.  With rational L every term is an
exact rational; for large boxes the sum is accumulated in fixed point with
the lower bound rounded down and the upper bound rounded up term by term.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

from .core import is_canonical
from .errors import DivergentTerm, NonPositiveInput
from .numerics import LogBounds, log_star_bounds

EXACT_TERM_LIMIT = 2_000
DEFAULT_PRECISION = Fraction(1, 1 << 20)


class _RowForms:
    """Integer data so that ||L_i q|| = r_i(q) / d_i with r_i an integer."""

    def __init__(self, L):
        self.rows = []
        for row in L:
            row = [Fraction(v) for v in row]
            d = math.lcm(*(v.denominator for v in row))
            self.rows.append(([int(v * d) for v in row], d))
        self.den = math.prod(d for _, d in self.rows)

    def numerators(self, q):
        """The integers r_i(q); raises DivergentTerm when one vanishes."""
        out = []
        for i, (coeffs, d) in enumerate(self.rows):
            a = sum(c * v for c, v in zip(coeffs, q)) % d
            r = min(a, d - a)
            if r == 0:
                raise DivergentTerm(q, i)
            out.append(r)
        return out


def _as_box(Q, n):
    if isinstance(Q, int):
        Q = (Q,) * n
    Q = tuple(int(v) for v in Q)
    if len(Q) != n:
        raise ValueError(f"box has {len(Q)} sides for n = {n}")
    if any(v < 1 for v in Q):
        raise NonPositiveInput("box sides must be at least 1")
    return Q


def shell(s, box):
    """Integer vectors with |q|_inf == s inside prod [-Q_j, Q_j], lexicographic by first ±s."""
    n = len(box)
    if s == 0:
        yield (0,) * n
        return
    for j in range(n):
        if box[j] < s:
            continue
        before = [range(-min(s - 1, box[i]), min(s - 1, box[i]) + 1) for i in range(j)]
        after = [range(-min(s, box[i]), min(s, box[i]) + 1) for i in range(j + 1, n)]
        for head in itertools.product(*before):
            for sign in (-s, s):
                for tail in itertools.product(*after):
                    yield head + (sign,) + tail


def _shell_vectors(s, box, symmetric):
    for q in shell(s, box):
        if not symmetric or is_canonical(q):
            yield q


def _shell_exact(forms, s, box, symmetric):
    weight = 2 if symmetric else 1
    counts = {}
    for q in _shell_vectors(s, box, symmetric):
        p = math.prod(forms.numerators(q))
        counts[p] = counts.get(p, 0) + weight
    return sum((Fraction(c * forms.den, p) for p, c in counts.items()), Fraction(0))


def _shell_fixed(forms, s, box, symmetric, w):
    """Shell subtotal in units of 2**-w as (floor sum, ceil sum)."""
    weight = 2 if symmetric else 1
    num = forms.den << w
    lo = hi = 0
    for q in _shell_vectors(s, box, symmetric):
        p = math.prod(forms.numerators(q))
        t, rem = divmod(num, p)
        lo += t
        hi += t + (rem != 0)
    return lo * weight, hi * weight


def box_size(box):
    return math.prod(2 * v + 1 for v in box) - 1


@dataclass(frozen=True)
class SumSpec:
    L: tuple
    Q: tuple
    precision: Fraction = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(tuple(Fraction(v) for v in row) for row in self.L))
        object.__setattr__(self, "Q", _as_box(self.Q, len(self.L[0])))
        object.__setattr__(self, "precision", Fraction(self.precision))


def _fixed_bits(terms, precision):
    # each term contributes at most one unit of rounding to the width
    return max(8, math.ceil(math.log2(max(terms, 1) / precision)) + 1)


def sum_reciprocal_fractional(L, Q, precision=DEFAULT_PRECISION, symmetric=True, exact=None):
    """Enclosure of S_L(Q); exact (zero width) unless fixed point is chosen.

    ``exact=None`` picks exact summation for boxes up to EXACT_TERM_LIMIT terms.
    ``symmetric`` pairs q with -q; both settings give identical results.
    """
    spec = L if isinstance(L, SumSpec) else SumSpec(L, Q, precision)
    forms = _RowForms(spec.L)
    box = spec.Q
    terms = box_size(box)
    if exact is None:
        exact = terms <= EXACT_TERM_LIMIT
    if exact:
        total = sum((_shell_exact(forms, s, box, symmetric) for s in range(1, max(box) + 1)), Fraction(0))
        return LogBounds.exact(total)
    w = _fixed_bits(terms, spec.precision)
    lo = hi = 0
    for s in range(1, max(box) + 1):
        a, b = _shell_fixed(forms, s, box, symmetric, w)
        lo += a
        hi += b
    return LogBounds(Fraction(lo, 1 << w), Fraction(hi, 1 << w), spec.precision)


def _ratio(S, Q, n, e, precision):
    L = log_star_bounds(Fraction(Q), precision)
    scale = Fraction(Q) ** n
    return LogBounds(S.lower / (scale * L.upper**e), S.upper / (scale * L.lower**e), precision)


def growth_table(L, Q_list, m=None, n=None, precision=DEFAULT_PRECISION, symmetric=True, exact=False):
    """Rows (Q, S, S/(Q^n log*(Q)^m), S/(Q^n log*(Q)^(2m+n-2))) for cubic boxes.

    Shell subtotals are computed once and accumulated, so the largest Q
    dominates the cost.  Sums are kept in fixed point unless ``exact``.
    """
    L = tuple(tuple(Fraction(v) for v in row) for row in L)
    m = m or len(L)
    n = n or len(L[0])
    if any(Q < 2 for Q in Q_list):
        raise NonPositiveInput("Q must be at least 2")
    if not Q_list:
        return []
    forms = _RowForms(L)
    Qmax = max(Q_list)
    terms = box_size((Qmax,) * n)
    w = _fixed_bits(terms, precision)
    box = (Qmax,) * n
    cumulative = {}
    lo = hi = 0
    total = Fraction(0)
    for s in range(1, Qmax + 1):
        if exact:
            total += _shell_exact(forms, s, box, symmetric)
            cumulative[s] = LogBounds.exact(total)
        else:
            a, b = _shell_fixed(forms, s, box, symmetric, w)
            lo += a
            hi += b
            cumulative[s] = LogBounds(Fraction(lo, 1 << w), Fraction(hi, 1 << w), precision)
    rows = []
    for Q in Q_list:
        S = cumulative[Q]
        rows.append(
            {
                "Q": Q,
                "S": S,
                "ratio_m": _ratio(S, Q, n, m, precision),
                "ratio_lead": _ratio(S, Q, n, 2 * m + n - 2, precision),
            }
        )
    return rows


def growth_spread(rows, column="ratio_lead"):
    """Certified upper bound on max/min of a ratio column."""
    return max(r[column].upper for r in rows) / min(r[column].lower for r in rows)


def growth_csv_rows(rows):
    return [
        {
            "Q": r["Q"],
            "S_lower": r["S"].lower,
            "S_upper": r["S"].upper,
            "ratio_lower_bound_column": r["ratio_lead"].lower,
            "ratio_upper_bound_column": r["ratio_lead"].upper,
        }
        for r in rows
    ]


# -- phi-semimultiplicative margin -----------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """phi(x) = values[j] for the last j with starts[j] <= x; starts[0] must be 1."""

    starts: tuple
    values: tuple

    def __post_init__(self):
        starts = tuple(int(s) for s in self.starts)
        values = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "values", values)
        if not starts or len(starts) != len(values) or starts[0] != 1:
            raise ValueError("steps must start at x = 1")
        if any(a >= b for a, b in zip(starts, starts[1:])):
            raise ValueError("step starts must increase")
        if any(v <= 0 for v in values):
            raise ValueError("phi must be positive")
        if any(a < b for a, b in zip(values, values[1:])):
            raise ValueError("phi must be non-increasing")

    @classmethod
    def constant(cls, value):
        return cls((1,), (value,))

    def __call__(self, x):
        out = self.values[0]
        for s, v in zip(self.starts, self.values):
            if s > x:
                break
            out = v
        return out

    def scaled(self, factor):
        return StepFunction(self.starts, tuple(v * factor for v in self.values))


def semimult_margin(L, phi, Q_max):
    """min over 0 < |q|_inf <= Q_max of |q|^n prod ||L_i q|| / phi(|q|), with its argmin.

    Exact for rational L.  Ties go to the first q in shell order; q and -q
    give the same value, so only the canonical half is scanned.
    """
    L = tuple(tuple(Fraction(v) for v in row) for row in L)
    n = len(L[0])
    forms = _RowForms(L)
    box = (Q_max,) * n
    best, arg = None, None
    for s in range(1, Q_max + 1):
        scale = Fraction(s**n) / phi(s)
        for q in sorted(_shell_vectors(s, box, True)):
            prod = 1
            for coeffs, d in forms.rows:
                a = sum(c * v for c, v in zip(coeffs, q)) % d
                prod *= min(a, d - a)
            value = scale * Fraction(prod, forms.den)
            if best is None or value < best:
                best, arg = value, q
                if best == 0:
                    return best, arg
    return best, arg
