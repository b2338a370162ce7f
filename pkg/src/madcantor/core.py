"""Scalar and vector primitives: ||x||, the height prod_plus(q), and the
certified multiplicative form

    prod_plus(q) * log*(prod_plus(q))**(m+n-1) * prod_i ||A_i q + gamma_i||.
"""

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
import math

from .numerics import LogBounds, log_star_bounds

# Log precision used whenever the form itself is evaluated.  The construction
# deliberately works with a coarser log bound (see geometry.epsilon_upper), so
# forms re-evaluated here are always at least as sharp.
FORM_LOG_PRECISION = Fraction(1, 1 << 40)
DEFAULT_PRECISION = Fraction(1, 1 << 40)


def dist_nearest_int(x):
    """Distance from the rational x to the nearest integer, in [0, 1/2]."""
    x = Fraction(x)
    frac = x - math.floor(x)
    return min(frac, 1 - frac)


def prod_plus(q):
    """prod_j max(1, |q_j|); equals 1 for the zero vector."""
    out = 1
    for v in q:
        if v > 1 or v < -1:
            out *= abs(v)
    return out


def sup_norm(q):
    return max(abs(v) for v in q)


def row_value(row, q, shift=0):
    return sum((Fraction(a) * b for a, b in zip(row, q)), Fraction(shift))


def is_canonical(q):
    """True when the first non-zero entry of q is positive."""
    for v in q:
        if v:
            return v > 0
    return False


def iter_height_bounded(n, bound):
    """Yield every non-zero q in Z^n with prod_plus(q) <= bound, lexicographically."""
    if bound < 1:
        return

    def rec(prefix, remaining, j):
        if j == n:
            if any(prefix):
                yield tuple(prefix)
            return
        for v in range(-remaining, remaining + 1):
            w = abs(v) if abs(v) > 1 else 1
            prefix.append(v)
            yield from rec(prefix, remaining // w, j + 1)
            prefix.pop()

    yield from rec([], bound, 0)


def shell_order(vectors):
    """Sort by sup norm first, then lexicographically."""
    return sorted(vectors, key=lambda q: (sup_norm(q), q))


def form_exact_part(A, gamma, q):
    """prod_plus(q) * prod_i ||A_i q + gamma_i||, exactly."""
    out = Fraction(prod_plus(q))
    for row, g in zip(A, gamma):
        out *= dist_nearest_int(row_value(row, q, g))
        if not out:
            break
    return out


def mad_form_bounds(A, gamma, q, precision=DEFAULT_PRECISION):
    """Certified enclosure of the Mad form at q.

    Exact (lower == upper) whenever prod_plus(q) <= e, or when a factor
    ||A_i q + gamma_i|| vanishes.
    """
    m, n = len(A), len(A[0])
    if not any(q):
        raise ValueError("q must be non-zero")
    precision = Fraction(precision)
    base = form_exact_part(A, gamma, q)
    exponent = m + n - 1
    if base == 0:
        return LogBounds(Fraction(0), Fraction(0), precision)
    height = prod_plus(q)
    log_prec = min(precision, FORM_LOG_PRECISION)
    while True:
        L = log_star_bounds(Fraction(height), log_prec)
        lo = base * L.lower**exponent
        hi = base * L.upper**exponent
        if hi - lo <= precision:
            return LogBounds(lo, hi, precision)
        log_prec /= 1 << 16


def _scan_chunk(args):
    A, gamma, chunk, precision = args
    best = None
    for q in chunk:
        lo = mad_form_bounds(A, gamma, q, precision).lower
        if best is None or lo < best[0]:
            best = (lo, q)
    return best


def scan_vectors(A, gamma, height_bound):
    """The q ranged over by :func:`scan_min_form`, in shell order.

    For gamma = 0 the form is even in q, so only the canonical half (first
    non-zero entry positive) is returned.
    """
    n = len(A[0])
    vecs = iter_height_bounded(n, height_bound)
    if all(Fraction(g) == 0 for g in gamma):
        vecs = (q for q in vecs if is_canonical(q))
    return shell_order(vecs)


def scan_min_form(A, gamma, q_budget, precision=DEFAULT_PRECISION, workers=1):
    """Minimum certified lower bound of the form over 0 < prod_plus(q) <= q_budget.

    Returns ``(bound, argmin)``; ``(None, None)`` if the range is empty.  Ties
    go to the first q in shell order (sup norm, then lexicographic).
    """
    A = [[Fraction(a) for a in row] for row in A]
    gamma = [Fraction(g) for g in gamma]
    vectors = scan_vectors(A, gamma, q_budget)
    if not vectors:
        return None, None
    if workers <= 1:
        return _scan_chunk((A, gamma, vectors, precision))
    size = -(-len(vectors) // workers)
    chunks = [vectors[i : i + size] for i in range(0, len(vectors), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_scan_chunk, [(A, gamma, c, precision) for c in chunks]))
    # chunks are contiguous in shell order, so the first strict minimum wins
    best = None
    for r in results:
        if best is None or r[0] < best[0]:
            best = r
    return best
