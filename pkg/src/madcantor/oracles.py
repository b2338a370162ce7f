"""Brute-force oracles and closed-form bounds for the counting lemmas.

Everything here is exact or one-sided: brute counts use the same closed,
row-separable interval test as the construction, and every bound that
involves a square root or a logarithm is rounded so that it can only get
weaker.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
import csv
import itertools
import math
import random

from .core import iter_height_bounded, prod_plus, sup_norm
from .errors import PreconditionViolated, SameCore
from .geometry import (
    Cube,
    DangerPoint,
    candidate_points,
    cube_meets_danger,
    enumerate_band,
    min_abs_clipped,
    row_range,
)
from .numerics import (
    LogBounds,
    _log_lohi,
    _root_lohi,
    compare_exp,
    log_star_bounds,
    refine,
    sqrt_upper,
)

DEFAULT_PRECISION = Fraction(1, 1 << 40)


def sqrt_upper_exact(x):
    """sqrt(x) for rational x >= 0: exact when x is a perfect square, else an upper bound."""
    x = Fraction(x)
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return sqrt_upper(x)


# -- hypercount ----------------------------------------------------------------


@dataclass(frozen=True)
class HypercountInstance:
    """Tiles of the grid delta*Z^{mn} + V against C = {prod|X_i q + g_i| <= eps, |.| <= T}."""

    m: int
    n: int
    gamma_prime: tuple
    q: tuple
    epsilon: Fraction
    T: Fraction
    delta: Fraction
    V: tuple
    D: Cube

    def __post_init__(self):
        object.__setattr__(self, "gamma_prime", tuple(Fraction(g) for g in self.gamma_prime))
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        for name in ("epsilon", "T", "delta"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        object.__setattr__(self, "V", tuple(tuple(Fraction(v) for v in row) for row in self.V))
        if len(self.gamma_prime) != self.m or len(self.q) != self.n:
            raise ValueError("gamma_prime / q have the wrong length")
        if (self.D.m, self.D.n) != (self.m, self.n) or len(self.V) != self.m:
            raise ValueError("D / V have the wrong shape")
        if not any(self.q):
            raise ValueError("q must be non-zero")

    def check(self):
        if self.epsilon <= 0 or self.T <= 0 or self.delta <= 0:
            raise PreconditionViolated("epsilon, T and delta must be positive")
        if compare_exp(-1, self.epsilon / self.T**self.m) <= 0:
            raise PreconditionViolated("epsilon / T^m must be below 1/e")


def _tile_index_range(lo, hi, offset, delta):
    """Grid indices a with [offset + a delta, offset + (a+1) delta] meeting [lo, hi]."""
    return range(math.ceil((lo - offset) / delta) - 1, math.floor((hi - offset) / delta) + 1)


def _row_histogram(inst, i):
    """Multiset of min |X_i q + g_i| (clipped to T) over the tile rows meeting D."""
    delta = inst.delta
    D_row = inst.D.intervals[i]
    ranges = [
        _tile_index_range(a, b, v, delta) for (a, b), v in zip(D_row, inst.V[i])
    ]
    hist = {}
    for idx in itertools.product(*ranges):
        box = []
        for (a, b), v, j in zip(D_row, inst.V[i], idx):
            lo, hi = max(a, v + j * delta), min(b, v + (j + 1) * delta)
            if lo > hi:
                break
            box.append((lo, hi))
        else:
            lo, hi = row_range(box, inst.q, inst.gamma_prime[i])
            value = min_abs_clipped(lo, hi, inst.T)
            if value is not None:
                hist[value] = hist.get(value, 0) + 1
    return hist


def count_products_at_most(histograms, bound):
    """Number of tuples (one value per histogram, with multiplicity) with product <= bound."""
    if not histograms:
        return 1 if bound >= 1 else 0
    partial = {Fraction(1): 1}
    for hist in histograms[:-1]:
        nxt = {}
        for p, cp in partial.items():
            for v, cv in hist.items():
                key = p * v
                nxt[key] = nxt.get(key, 0) + cp * cv
        partial = nxt
    last = sorted(histograms[-1].items())
    values = [v for v, _ in last]
    prefix = list(itertools.accumulate(c for _, c in last))
    total = prefix[-1] if prefix else 0
    count = 0
    for p, cp in partial.items():
        if p == 0:
            count += cp * total
            continue
        k = bisect_right(values, bound / p)
        if k:
            count += cp * prefix[k - 1]
    return count


def brute_tile_count(inst):
    """Exact number of closed grid tiles meeting D and C."""
    inst.check()
    hists = [_row_histogram(inst, i) for i in range(inst.m)]
    if any(not h for h in hists):
        return 0
    return count_products_at_most(hists, inst.epsilon)


def hypercount_bound(inst, precision=DEFAULT_PRECISION):
    """Certified enclosure of the right-hand side of the tile-count lemma.

    2^(2m-1) E / |q|^m * log*(U^m / E)^(m-1) * (edge(D) + 2 delta)^(m(n-1)),
    with U = T + n |q| delta and E = eps + U^m - T^m.
    """
    inst.check()
    m, n = inst.m, inst.n
    qn = sup_norm(inst.q)
    U = inst.T + n * qn * inst.delta
    E = inst.epsilon + U**m - inst.T**m
    head = Fraction(2 ** (2 * m - 1)) * E / qn**m * (inst.D.edge + 2 * inst.delta) ** (m * (n - 1))
    if m == 1:
        return LogBounds.exact(head)
    L = log_star_bounds(U**m / E, precision / (head * m * 4 ** (m + 1)))
    return LogBounds(head * L.lower ** (m - 1), head * L.upper ** (m - 1), precision)


def hypercount_holds(inst):
    count = brute_tile_count(inst)
    lhs = inst.delta ** (inst.m * inst.n) * count
    bound = hypercount_bound(inst)
    return lhs <= bound.upper, count, lhs, bound


def equality_instance():
    """m = n = 1 instance where both sides equal 3/10."""
    return HypercountInstance(
        1, 1, (0,), (1,), Fraction(1, 10), Fraction(1, 2), Fraction(1, 20), ((0,),),
        Cube(((-1,),), 2),
    )


def random_hypercount_instance(rng):
    m, n = rng.randint(1, 3), rng.randint(1, 3)
    q = (0,) * n
    while not any(q):
        q = tuple(rng.randint(-5, 5) for _ in range(n))
    T = Fraction(rng.randint(1, 4), 8)
    eps = T**m * Fraction(rng.randint(1, 35), 100)
    delta = Fraction(1, rng.randint(4, 40))
    V = tuple(tuple(delta * Fraction(rng.randint(0, 9), 10) for _ in range(n)) for _ in range(m))
    gamma = tuple(Fraction(rng.randint(-6, 6), 12) for _ in range(m))
    k_edge = rng.randint(1, 4 if m * n <= 4 else 2)
    edge = delta * k_edge + delta * Fraction(rng.randint(0, 3), 4)
    origin = tuple(tuple(Fraction(rng.randint(-20, 20), 40) for _ in range(n)) for _ in range(m))
    return HypercountInstance(m, n, gamma, q, eps, T, delta, V, Cube(origin, edge))


# -- separation ----------------------------------------------------------------


def hyperplane_separation(P, P_prime):
    """Rational lower bound on max_i |p_i - p'_i| / (sqrt(n) |q|_2).

    The two cores X_i q + gamma_i + p_i = 0 are parallel; the sup-norm distance
    between them is at least this value, which in turn is at least 1/(n |q|).
    """
    if P.q != P_prime.q:
        raise ValueError("danger points must share q")
    if P.p == P_prime.p:
        raise SameCore(f"{P} and {P_prime} have the same core")
    q = P.q
    n = len(q)
    dp = max(abs(a - b) for a, b in zip(P.p, P_prime.p))
    lower = Fraction(dp) / sqrt_upper_exact(n * sum(v * v for v in q))
    if lower < Fraction(1, n * sup_norm(q)):
        raise ArithmeticError("separation bound violated")
    return lower


def exact_sup_distance(P, P_prime):
    """Sup-norm distance between the two cores: max_i |p_i - p'_i| / |q|_1."""
    return Fraction(max(abs(a - b) for a, b in zip(P.p, P_prime.p)), sum(abs(v) for v in P.q))


# -- faces ---------------------------------------------------------------------


@dataclass(frozen=True)
class FaceCheck:
    brute: int
    bound: Fraction
    passed: bool


def faces(l, m):
    return 2 ** (l - m) * math.comb(l, m)


def face_count_bound(J, q, m, n):
    qn = sup_norm(q)
    sm = sqrt_upper_exact(m)
    return faces(m * n, m) * (J.edge + (1 + 2 * n * sm) / (n * qn)) ** m * (n * qn) ** m


def face_count_bound_check(J, q, gamma, c):
    """Compare #{P : J meets Delta(P)} for fixed q with the inflated-face bound."""
    m, n = J.m, J.n
    hits = sum(
        1 for P in candidate_points(J, q, gamma, primitive=True) if cube_meets_danger(J, P, gamma, c)
    )
    bound = face_count_bound(J, q, m, n)
    return FaceCheck(hits, bound, hits <= bound)


# -- band sums -------------------------------------------------------------------


def _heights(n, R, k):
    counts = {}
    for q in enumerate_band(n, R, k):
        h = prod_plus(q)
        counts[h] = counts.get(h, 0) + 1
    return counts


def band_sum(n, R, k, exponent=-1):
    """Exact sum of prod_plus(q)**exponent over band k; exponent must be an integer."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        raise ValueError("non-integral exponent: use band_sum_bounds")
    e = int(exponent)
    return sum((Fraction(c) * Fraction(h) ** e for h, c in _heights(n, R, k).items()), Fraction(0))


def band_sum_bounds(n, R, k, exponent, precision=DEFAULT_PRECISION):
    """Certified enclosure of the band sum for a rational exponent a/b."""
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return LogBounds.exact(band_sum(n, R, k, exponent))
    heights = _heights(n, R, k)
    a, b = exponent.numerator, exponent.denominator

    def fn(bits):
        lo = hi = Fraction(0)
        for h, c in heights.items():
            # h^(a/b) = root(h^a, b)
            r_lo, r_hi = _root_lohi(Fraction(h) ** a, b, bits)
            lo += c * r_lo
            hi += c * r_hi
        return lo, hi

    return refine(fn, precision, start_bits=32)


def band_growth_ratios(n, R, K, precision=Fraction(1, 1 << 30)):
    """Per band k <= K: band_sum(-1) / (log*(F(k+1))^(n-1) log*(F(k+1)/F(k))).

    F(k) = R^(k/3).  Empty bands are skipped.  Returns [(k, LogBounds)].
    """
    out = []
    for k in range(K + 1):
        if not enumerate_band(n, R, k):
            continue
        S = band_sum(n, R, k)

        def fn(bits, k=k, S=S):
            l_lo, l_hi = _log_lohi(Fraction(R), bits)
            a_lo = max(Fraction(1), Fraction(k + 1, 3) * l_lo)
            a_hi = max(Fraction(1), Fraction(k + 1, 3) * l_hi)
            b_lo, b_hi = max(Fraction(1), l_lo / 3), max(Fraction(1), l_hi / 3)
            return S / (a_hi ** (n - 1) * b_hi), S / (a_lo ** (n - 1) * b_lo)

        out.append((k, refine(fn, precision)))
    return out


def ratio_spread(ratios):
    """Certified upper bound on max/min over a list of enclosures."""
    return max(r.upper for _, r in ratios) / min(r.lower for _, r in ratios)


# -- random suites ----------------------------------------------------------------


def hypercount_suite(trials, seed=0, include_equality=True):
    rng = random.Random(seed)
    rows = []
    instances = [equality_instance()] if include_equality else []
    instances += [random_hypercount_instance(rng) for _ in range(trials - len(instances))]
    for i, inst in enumerate(instances):
        ok, count, lhs, bound = hypercount_holds(inst)
        rows.append(
            {
                "instance": i,
                "m": inst.m,
                "n": inst.n,
                "q": " ".join(map(str, inst.q)),
                "epsilon": inst.epsilon,
                "T": inst.T,
                "delta": inst.delta,
                "edge": inst.D.edge,
                "brute": count,
                "lhs": lhs,
                "bound": bound.upper,
                "passed": ok,
            }
        )
    return rows


def random_same_q_pair(rng, m=None, n=None):
    m = m or rng.randint(1, 3)
    n = n or rng.randint(1, 3)
    q = (0,) * n
    while not any(q):
        q = tuple(rng.randint(-10, 10) for _ in range(n))
    p = tuple(rng.randint(-5, 5) for _ in range(m))
    p2 = p
    while p2 == p:
        p2 = tuple(rng.randint(-5, 5) for _ in range(m))
    return DangerPoint(p, q), DangerPoint(p2, q)


def separation_suite(trials, seed=0):
    rng = random.Random(seed)
    rows = []
    for i in range(trials):
        P, P2 = random_same_q_pair(rng)
        lower = hyperplane_separation(P, P2)
        floor = Fraction(1, len(P.q) * sup_norm(P.q))
        exact = exact_sup_distance(P, P2)
        rows.append(
            {
                "instance": i,
                "q": " ".join(map(str, P.q)),
                "p": " ".join(map(str, P.p)),
                "p_prime": " ".join(map(str, P2.p)),
                "lower": lower,
                "floor": floor,
                "sup_distance": exact,
                "passed": floor <= lower <= exact,
            }
        )
    return rows


def faces_suite(trials, seed=0):
    rng = random.Random(seed)
    rows = []
    for i in range(trials):
        m, n = rng.choice([(1, 2), (2, 1), (1, 3), (2, 2), (3, 1)])
        q = (0,) * n
        while not any(q):
            q = tuple(rng.randint(-6, 6) for _ in range(n))
        edge = Fraction(1, rng.randint(1, 16))
        origin = tuple(tuple(Fraction(rng.randint(0, 32), 32) for _ in range(n)) for _ in range(m))
        gamma = tuple(Fraction(rng.randint(0, 5), 6) for _ in range(m))
        c = Fraction(1, rng.choice([10, 100, 1000]))
        res = face_count_bound_check(Cube(origin, edge), q, gamma, c)
        rows.append(
            {
                "instance": i,
                "m": m,
                "n": n,
                "q": " ".join(map(str, q)),
                "edge": edge,
                "c": c,
                "brute": res.brute,
                "bound": res.bound,
                "passed": res.passed,
            }
        )
    return rows


BANDS_MAX_K = 12


def bands_suite(trials, seed=0, R=8):
    """Band-sum growth ratios for n = 1, 2 over k < min(trials, 13); seed is unused.

    Band k holds about R**(2k/3) vectors for n = 2, so depth is capped.
    """
    rows = []
    K = min(max(trials - 1, 0), BANDS_MAX_K)
    for n in (1, 2):
        ratios = band_growth_ratios(n, R, K)
        spread = ratio_spread(ratios)
        for k, r in ratios:
            rows.append(
                {
                    "n": n,
                    "R": R,
                    "k": k,
                    "band_sum": band_sum(n, R, k),
                    "ratio_lower": r.lower,
                    "ratio_upper": r.upper,
                    "passed": spread <= 4,
                }
            )
    return rows


SUITES = {
    "hypercount": hypercount_suite,
    "separation": separation_suite,
    "faces": faces_suite,
    "bands": bands_suite,
}


def _csv_value(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return "pass" if v else "fail"
    return v


def write_csv(rows, fh):
    if not rows:
        return
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(v) for k, v in row.items()})
