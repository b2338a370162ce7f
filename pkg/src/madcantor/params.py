"""Certified checks of the parameter conditions behind the construction.

All comparisons involving e, logs or fractional powers of R are decided with
rational enclosures; an undecided comparison is reported as a failure.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

from .cantor import g_factor
from .errors import InvalidC
from .numerics import (
    MAX_BITS,
    START_BITS,
    LogBounds,
    _exp_lohi,
    _log_lohi,
    _root_lohi,
    compare_exp,
    refine,
)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ParameterReport:
    conditions: list = field(default_factory=list)
    cond3_sup: Fraction = None

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self):
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.conditions]


def _decide_le(fn, bound, max_bits=MAX_BITS // 8):
    """Certify value <= bound where fn(bits) encloses value; None if undecided."""
    bits = START_BITS
    while bits <= max_bits:
        lo, hi = fn(bits)
        if hi <= bound:
            return True, (lo, hi)
        if lo > bound:
            return False, (lo, hi)
        bits *= 2
    return None, (lo, hi)


def condition_i(m, c):
    """2**m c < 1/e."""
    return compare_exp(-1, 2**m * Fraction(c)) > 0


def condition_ii(R):
    """R >= e**3, i.e. F(k+1)/F(k) = R**(1/3) >= e."""
    return compare_exp(3, R) < 0


def minimal_R_condition_ii():
    """Smallest integer R with R >= e**3."""
    bits = START_BITS
    while True:
        lo, hi = _exp_lohi(Fraction(3), bits)
        if math.floor(lo) == math.floor(hi):
            return math.floor(hi) + 1
        bits *= 2


def _log_R_lohi(R, bits):
    return _log_lohi(Fraction(R), bits)


def _cond3_lohi(m, n, edge, R, k, bits):
    """Enclosure of edge * R**(-(k+1)/3) * log*(R**((k+1)/3))**(m+n-1)."""
    x_lo, x_hi = _root_lohi(Fraction(R ** (k + 1)), 3, bits)
    l_lo, l_hi = _log_R_lohi(R, bits)
    s = Fraction(k + 1, 3)
    L_lo, L_hi = max(Fraction(1), s * l_lo), max(Fraction(1), s * l_hi)
    e = m + n - 1
    return edge / x_hi * L_lo**e, edge / x_lo * L_hi**e


def cond3_bounds(m, n, edge, R, k, precision=Fraction(1, 1 << 30)):
    return refine(lambda bits: _cond3_lohi(m, n, Fraction(edge), R, k, bits), precision)


def _cond5_rhs_lower(m, n, edge, R, const, eps, bits):
    a = m / (1 - eps)
    b = n / (1 - eps)
    le_lo, le_hi = _log_lohi(Fraction(edge), bits)
    l_lo, l_hi = _log_R_lohi(R, bits)
    L_hi = max(Fraction(1), l_hi / 3)
    _, logL_hi = _log_lohi(L_hi, bits) if L_hi != 1 else (0, Fraction(0))
    edge_pow_lo = _exp_lohi(a * le_lo, bits)[0]
    logstar_pow_lo = _exp_lohi(-b * logL_hi, bits)[0]
    return const * edge_pow_lo * logstar_pow_lo


def _frak_f_combine(m, n, c, edge, prod_R_m, log_Fk, log_ratio, a_pow, b_pow):
    """Combine enclosures into an enclosure of the frak-f factor.

    log_Fk, log_ratio, a_pow = F(k)**(-m/n), b_pow = F(k+1)**(-m/n) are
    (lo, hi) pairs; the remaining arguments are exact.
    """
    if m > 1:
        # log(1/(2^m c)) > 0 when 2^m c < 1
        g_lo, g_hi = _frak_f_combine.log_inv(m, c)
        head = (c * g_lo ** (m - 1), c * g_hi ** (m - 1))
    else:
        head = (c, c)
    L_lo, L_hi = max(Fraction(1), log_Fk[0]), max(Fraction(1), log_Fk[1])
    r_lo, r_hi = log_ratio
    diff_lo = max(Fraction(0), 2 * a_pow[0] - b_pow[1])
    diff_hi = 2 * a_pow[1] - b_pow[0]
    scale = edge ** (-m) * prod_R_m
    inner = (r_lo + scale * diff_lo, r_hi + scale * diff_hi)
    lo = head[0] / L_hi * r_lo ** (n - 1) * inner[0]
    hi = head[1] / L_lo * r_hi ** (n - 1) * inner[1]
    return lo, hi


def _check_c(m, c):
    if 2**m * c >= 1:
        raise InvalidC(f"2^m c = {2 ** m * c} must be below 1")


def frak_f_bounds(m, n, c, edge, log_F_k, log_F_k1, h_k, R=1, precision=Fraction(1, 1 << 40)):
    """Frak-f for a band function given by exact rational values of log F.

    ``R`` only enters through prod_{h<h_k} R**m.
    """
    c, edge = Fraction(c), Fraction(edge)
    log_F_k, log_F_k1 = Fraction(log_F_k), Fraction(log_F_k1)
    _check_c(m, c)
    prod_R_m = Fraction(R) ** (m * h_k)

    def fn(bits):
        _frak_f_combine.log_inv = lambda m_, c_: _log_lohi(1 / (2**m_ * c_), bits)
        a = _exp_lohi(-Fraction(m, n) * log_F_k, bits)
        b = _exp_lohi(-Fraction(m, n) * log_F_k1, bits)
        ratio = log_F_k1 - log_F_k
        return _frak_f_combine(m, n, c, edge, prod_R_m, (log_F_k, log_F_k), (ratio, ratio), a, b)

    return refine(fn, precision)


def frak_f(config, k, precision=Fraction(1, 1 << 40)):
    """Frak-f with the construction's choices R_k = R, F(k) = R**(k/3)."""
    m, n, R = config.m, config.n, config.R
    c, edge = config.c, config.edge
    _check_c(m, c)
    prod_R_m = Fraction(R) ** (m * config.h(k))

    def fn(bits):
        _frak_f_combine.log_inv = lambda m_, c_: _log_lohi(1 / (2**m_ * c_), bits)
        l_lo, l_hi = _log_R_lohi(R, bits)
        log_Fk = (Fraction(k, 3) * l_lo, Fraction(k, 3) * l_hi)
        ratio = (l_lo / 3, l_hi / 3)
        # F(k)^(-m/n) = 1 / (R^(k m))^(1/(3n))
        ra = _root_lohi(Fraction(R ** (k * m)), 3 * n, bits)
        rb = _root_lohi(Fraction(R ** ((k + 1) * m)), 3 * n, bits)
        a = (1 / ra[1], 1 / ra[0])
        b = (1 / rb[1], 1 / rb[0])
        return _frak_f_combine(m, n, c, edge, prod_R_m, log_Fk, ratio, a, b)

    return refine(fn, precision)


def removal_budget(config, k, const_mn, precision=Fraction(1, 1 << 40)):
    """Upper bound on const(m,n) [f * prod R^{mn} + prod R^{mn-1}] over h in [h_k, k]."""
    const_mn = Fraction(const_mn)
    if const_mn <= 0:
        raise ValueError("const_mn must be positive")
    f = frak_f(config, k, precision)
    span = k - config.h(k) + 1
    mn = config.m * config.n
    return const_mn * (f.upper * config.R ** (mn * span) + config.R ** ((mn - 1) * span))


def nonempty_threshold(config, k):
    """g_k / max(2, k) * prod_{h=h_k}^{k} R**(mn)."""
    span = k - config.h(k) + 1
    return g_factor(k, config.h(k)) / max(2, k) * config.R ** (config.l * span)


def check_parameters(config, K_horizon):
    """Evaluate every parameter condition, directed rounding on the safe side."""
    m, n, R, c, edge = config.m, config.n, config.R, config.c, config.edge
    report = ParameterReport()

    ok_i = condition_i(m, c)
    report.conditions.append(
        ConditionResult("i", ok_i, f"2^{m} c = {2 ** m * c} {'<' if ok_i else '>='} 1/e")
    )
    ok_ii = condition_ii(R)
    report.conditions.append(
        ConditionResult("ii", ok_ii, f"R = {R} {'>=' if ok_ii else '<'} e^3 (minimal {minimal_R_condition_ii()})")
    )

    sup = Fraction(0)
    failures = []
    for k in range(K_horizon + 1):
        ok, (lo, hi) = _decide_le(lambda bits: _cond3_lohi(m, n, edge, R, k, bits), c)
        sup = max(sup, hi)
        if not ok:
            failures.append(k)
    report.cond3_sup = sup
    detail = f"sup_k<={K_horizon} <= {float(sup):.6g} vs c = {float(c):.6g}"
    if failures:
        detail += f"; fails at k = {failures[:5]}"
    report.conditions.append(ConditionResult("iii", not failures, detail))

    # x -> log(x)^e / x decreases for x >= e^e with e = m+n-1
    lo, _ = _log_R_lohi(R, START_BITS)
    tail_ok = Fraction(K_horizon + 1, 3) * lo >= m + n - 1
    report.conditions.append(
        ConditionResult(
            "iii-tail",
            tail_ok and not failures,
            f"R^((K+1)/3) {'>=' if tail_ok else 'not certified >='} e^{m + n - 1} at K = {K_horizon}",
        )
    )

    if config.cond5_const is not None and config.cond5_eps is not None:
        rhs = _cond5_rhs_lower(m, n, edge, R, config.cond5_const, config.cond5_eps, START_BITS * 2)
        ok5 = c <= rhs
        report.conditions.append(
            ConditionResult("cond5", ok5, f"c = {float(c):.6g} vs rhs >= {float(rhs):.6g}")
        )

    if config.const_mn is not None and ok_i:
        bad = []
        for k in range(K_horizon + 1):
            if removal_budget(config, k, config.const_mn) > nonempty_threshold(config, k):
                bad.append(k)
        report.conditions.append(
            ConditionResult(
                "nonempty",
                not bad,
                "r_k within g_k/max(2,k) prod R^(mn)" + (f"; fails at k = {bad[:5]}" if bad else ""),
            )
        )
    return report
