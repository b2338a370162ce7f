"""Acceptance criteria 1-10, one PASS/FAIL line each (see the terminal summary).

Criteria 1, 3 and the growth-table half of 9 cannot be met with R = 4: every
child of the initial square meets a height-1 danger strip, so the literal run
is Exhausted at generation 1.  Those checks are strict xfails; a nearest
attainable configuration (R = 5) is reported on separate surrogate lines.
"""

from dataclasses import replace
from fractions import Fraction
import math
import random
import time

import mpmath
import pytest

from madcantor.cantor import (
    CantorScheme,
    cantor2_holds,
    g_factor,
    nonempty_budget,
    simulate_construction,
    t_lower_bound_check,
    t_sequence,
)
from madcantor.construction import run_construction, scan_height_bound, verify_certificate, with_config
from madcantor.core import dist_nearest_int, iter_height_bounded, prod_plus, scan_min_form
from madcantor.errors import DegenerateProduct, DivergentTerm, Exhausted
from madcantor.geometry import Hyperplane
from madcantor.oracles import hypercount_suite, separation_suite
from madcantor.params import check_parameters, condition_i, minimal_R_condition_ii
from madcantor.sums import growth_spread, growth_table, sum_reciprocal_fractional

from conftest import ACCEPTANCE_LINES, unit_square_config

F = Fraction
K = 12
C = F(1, 100)
DYADIC_Q = [16, 32, 64, 128, 256, 512]
CENTER_HYPERPLANES = (
    Hyperplane(((1, -1),), 0),
    Hyperplane(((1, 1),), 1),
    Hyperplane(((1, 2),), F(3, 2)),
)

_cache = {}


def certificate(R, gamma=(0,), hyperplanes=()):
    key = (R, gamma, hyperplanes)
    if key not in _cache:
        start = time.perf_counter()
        cert = run_construction(unit_square_config(gamma=gamma, R=R, c=C, hyperplanes=hyperplanes), K)
        _cache[key] = (cert, time.perf_counter() - start)
    return _cache[key]


def rescan_ok(cert):
    """Independent re-scan: exact ||X q + gamma|| with a 200-digit log, all 0 < prod(q)^3 < R^K."""
    X, gamma, R = cert.witness, cert.config.gamma, cert.config.R
    worst = None
    for q in iter_height_bounded(2, scan_height_bound(R, K)):
        dist = dist_nearest_int(sum(x * v for x, v in zip(X[0], q)) + gamma[0])
        H = prod_plus(q)
        value = mpmath.mpf(dist.numerator) / dist.denominator * H * max(1, mpmath.log(H)) ** 2
        worst = value if worst is None else min(worst, value)
    # 200-digit evaluation: a margin of 10^-100 is far above its error
    return worst - mpmath.mpf(C.numerator) / C.denominator > mpmath.mpf(10) ** -100, worst


def run_and_check(cert, elapsed, record, label):
    verdict = verify_certificate(cert)
    scan_bound, _ = scan_min_form(cert.witness, cert.config.gamma, scan_height_bound(cert.config.R, K))
    ok_scan, worst = rescan_ok(cert)
    passed = bool(verdict) and scan_bound > C and ok_scan and elapsed < 300
    record(label, passed, f"{elapsed:.1f}s, verify {verdict.reason}, min form {float(worst):.5f} > 1/100")
    return passed


def literal_exhausts(record, label, **kw):
    try:
        certificate(4, **kw)
    except Exhausted as exc:
        record(label, False, f"Exhausted at generation {exc.generation}: every R=4 child meets a height-1 strip")
        raise
    record(label, True)


@pytest.mark.xfail(strict=True, raises=Exhausted, reason="R=4 children all meet the height-1 danger strips")
def test_criterion_1_homogeneous_R4(record):
    literal_exhausts(record, "criterion 1 homogeneous R=4 K=12")


def test_criterion_1_surrogate_R5(record):
    cert, elapsed = certificate(5)
    assert run_and_check(cert, elapsed, record, "criterion 1 surrogate R=5 (not counted as criterion 1)")


def test_criterion_2_inhomogeneous(record):
    cert, elapsed = certificate(4, gamma=(F(1, 3),))
    assert run_and_check(cert, elapsed, record, "criterion 2 gamma=1/3 R=4 K=12")


def hyperplanes_avoided(cert):
    X = cert.witness
    return all(
        sum(a * x for row_a, row_x in zip(H.coefficients, X) for a, x in zip(row_a, row_x)) != H.offset
        for H in cert.config.hyperplanes
    )


@pytest.mark.xfail(strict=True, raises=Exhausted, reason="hyperplanes only remove more cubes than criterion 1")
def test_criterion_3_hyperplanes_R4(record):
    literal_exhausts(record, "criterion 3 hyperplanes R=4 K=12", hyperplanes=CENTER_HYPERPLANES)


def test_criterion_3_surrogate_R5(record):
    cert, elapsed = certificate(5, hyperplanes=CENTER_HYPERPLANES)
    ok = run_and_check(cert, elapsed, record, "criterion 3 surrogate R=5 checks (not counted as criterion 3)")
    avoided = hyperplanes_avoided(cert)
    record("criterion 3 surrogate R=5 witness off all 3 hyperplanes", avoided)
    assert ok and avoided


def test_criterion_4_hypercount_suite(record):
    start = time.perf_counter()
    rows = hypercount_suite(300, seed=2024)
    elapsed = time.perf_counter() - start
    failures = sum(not r["passed"] for r in rows)
    equality = rows[0]["lhs"] == rows[0]["bound"] == F(3, 10)
    in_range = all(r["m"] <= 3 and r["n"] <= 3 and max(abs(int(v)) for v in r["q"].split()) <= 5 for r in rows)
    passed = failures == 0 and equality and in_range and len(rows) >= 200 and elapsed < 120
    record("criterion 4 tile-count lemma", passed, f"{len(rows)} instances, {failures} failures, {elapsed:.1f}s")
    assert passed


def random_scheme(rng):
    depth = rng.randint(1, 6)
    R = [rng.randint(1, 4) for _ in range(depth)]
    h = [rng.randint(0, k) for k in range(depth)]
    r = [rng.randint(0, R[k] + 1) for k in range(depth)]
    return CantorScheme(1, 1, R, r, h)


def test_criterion_5_cantor_oracle(record):
    rng = random.Random(5)
    failures = positive = 0
    for trial in range(100):
        scheme = random_scheme(rng)
        try:
            t = t_sequence(scheme, scheme.depth - 1)
        except DegenerateProduct:
            t = None
        for strategy in ("concentrate", "spread", "random"):
            counts, removed = simulate_construction(scheme, scheme.depth, strategy, seed=trial)
            ok = cantor2_holds(scheme, counts, scheme.r) and cantor2_holds(scheme, counts, removed)
            if t is not None and all(v > 0 for v in t):
                positive += strategy == "concentrate"
                ok = ok and counts[-1] > 0
            failures += not ok
    passed = failures == 0 and positive > 0
    record("criterion 5 Cantor oracle", passed, f"100 schemes x 3 strategies, {positive} with all t_k > 0, {failures} failures")
    assert passed


def test_criterion_6_induction(record):
    rng = random.Random(6)
    failures = 0
    for _ in range(50):
        l = rng.choice([1, 2])
        R = [rng.randint(2, 16) for _ in range(K + 1)]
        h = [0]
        for k in range(1, K + 1):
            h.append(rng.randint(h[-1], k))
        probe = CantorScheme(l, 1, R, [0] * (K + 1), h)
        r = [rng.randint(0, math.floor(nonempty_budget(probe, k))) for k in range(K + 1)]
        failures += not all(t_lower_bound_check(CantorScheme(l, 1, R, r, h), K))
    t0 = t_sequence(CantorScheme(2, 1, (4,), (3,), (0,)), 0)[0] == 4**2 - 3
    g0 = g_factor(0, 0) == F(1, 8)
    passed = failures == 0 and t0 and g0
    record("criterion 6 t_k lower bound", passed, f"50 parameter sets, {failures} failures; t_0 and g_0 values {t0 and g0}")
    assert passed


def test_criterion_7_separation(record):
    rows = separation_suite(100, seed=7)
    failures = sum(not (r["lower"] >= r["floor"]) or not r["passed"] for r in rows)
    record("criterion 7 separation", failures == 0, f"100 pairs, {failures} failures")
    assert failures == 0


def test_criterion_8_parameter_checker(record):
    report = check_parameters(unit_square_config(R=10**6, c=F(11, 100)), 60)
    ok = (
        report["i"].passed
        and report["iii"].passed
        and report["iii-tail"].passed
        and minimal_R_condition_ii() == 21
        and not condition_i(1, F(1, 2))
    )
    record("criterion 8 parameter checker", ok, f"sup cond iii {float(report.cond3_sup):.5f}, minimal R 21")
    assert ok


def test_criterion_9_exact_sums(record):
    s4 = sum_reciprocal_fractional([[F(1, 2)]], 1)
    s20 = sum_reciprocal_fractional([[F(1, 4)]], 3)
    try:
        sum_reciprocal_fractional([[F(1, 2)]], 2)
        divergent = False
    except DivergentTerm:
        divergent = True
    ok = s4.lower == s4.upper == 4 and s20.lower == s20.upper == 20 and divergent
    record("criterion 9 exact sums", ok, "S=4, S=20, DivergentTerm")
    assert ok


@pytest.mark.xfail(strict=True, raises=Exhausted, reason="no depth-12 witness exists for criterion 1")
def test_criterion_9_growth_table_R4(record):
    literal_exhausts(record, "criterion 9 growth table on the criterion-1 witness")


def test_criterion_9_growth_surrogate_R5(record):
    cert, _ = certificate(5)
    rows = growth_table(cert.witness, DYADIC_Q)
    spread = growth_spread(rows)
    record("criterion 9 growth table surrogate R=5 (not counted as criterion 9)", spread <= 10, f"max/min {float(spread):.2f} <= 10")
    assert spread <= 10


def nudge_onto_core(X, q):
    """Move X_11 so that X q is an integer: the new witness lies on the core of some Delta(P)."""
    value = sum(x * v for x, v in zip(X[0], q))
    target = round(value)
    row = list(X[0])
    row[0] += F(target - value, q[0])
    return (tuple(row),)


def test_criterion_10_tamper(record):
    cert, _ = certificate(5)
    _, argmin = scan_min_form(cert.witness, (0,), scan_height_bound(5, K))
    chain = list(cert.chain)
    mutations = {
        f"witness onto core q={argmin}": replace(cert, witness=nudge_onto_core(cert.witness, argmin)),
        "witness onto core q=(1,1)": replace(cert, witness=nudge_onto_core(cert.witness, (1, 1))),
        "witness onto core q=(3,-2)": replace(cert, witness=nudge_onto_core(cert.witness, (3, -2))),
        "chain[0] altered": replace(cert, chain=tuple([chain[0] + 1] + chain[1:])),
        "chain[6] altered": replace(cert, chain=tuple(chain[:6] + [chain[6] + 1] + chain[7:])),
        "chain[11] altered": replace(cert, chain=tuple(chain[:11] + [chain[11] + 1])),
        "c lowered to c/2": with_config(cert, c=C / 2),
        "c lowered to c/10": with_config(cert, c=C / 10),
        "observed_removals[1] altered": replace(
            cert, observed_removals=(cert.observed_removals[0], cert.observed_removals[1] + 1) + cert.observed_removals[2:]
        ),
        "finite_range_bound altered": replace(cert, finite_range_bound=cert.finite_range_bound * 2),
    }
    accepted = [name for name, bad in mutations.items() if verify_certificate(bad)]
    record("criterion 10 tamper resistance (R=5 certificate)", not accepted, f"{len(mutations) - len(accepted)}/10 rejected")

    inhom, _ = certificate(4, gamma=(F(1, 3),))
    lowered = bool(verify_certificate(with_config(inhom, c=C / 2)))
    # not a failure: lowering c leaves every replayed quantity of this certificate unchanged,
    # so the mutated file is a genuine certificate for the smaller c
    ACCEPTANCE_LINES.append(
        f"criterion 10 info: gamma=1/3 certificate with c/2 {'accepted' if lowered else 'rejected'}"
        " (its replay does not depend on c; see the notes)"
    )
    assert not accepted
