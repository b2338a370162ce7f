"""Witness search by nested cube pruning, plus certificates and their verifier.

Generation-g cubes are sub-cubes of the initial cube C with edge l / R**g;
a cube is identified by the integer matrix t of its offsets, so its lower
corner is origin + (l / R**g) t.  Passing from generation k to k + 1 every
child is tested against the danger sets of band k (heights with
R**k <= prod_plus(q)**3 < R**(k+1)) and against H_{k+1}.  Earlier bands were
already avoided by the parent and are inherited.

The pruning test runs on integers: multiplying X_i q + gamma_i by the common
scale W = D * Ld * R**g (D the denominator of origin and gamma, l = Ln/Ld)
turns the range of each row into an integer interval, and p is free per row,
so the row contributes its integer distance to W*Z.  The verifier re-checks
everything through the exact Fraction geometry instead.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
import itertools
import math

from .config import CERTIFIED, ConstructionConfig
from .core import is_canonical, iter_height_bounded, prod_plus, scan_min_form
from .errors import BudgetExceeded, CertificationFailed, Exhausted, PreconditionViolated
from .geometry import (
    Cube,
    DangerPoint,
    child_digits,
    first_danger_hit,
    cube_meets_hyperplane,
    enumerate_band,
    epsilon_upper,
)
from .numerics import iroot
from .params import check_parameters, removal_budget

DFS = "dfs"
FULL = "full"
SEARCHES = (DFS, FULL)


@dataclass(frozen=True)
class Certificate:
    config: ConstructionConfig
    K: int
    chain: tuple
    observed_removals: tuple
    witness: tuple
    finite_range_bound: Fraction = None
    search: str = DFS

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(int(i) for i in self.chain))
        object.__setattr__(self, "observed_removals", tuple(int(v) for v in self.observed_removals))
        object.__setattr__(
            self, "witness", tuple(tuple(Fraction(v) for v in row) for row in self.witness)
        )
        if self.finite_range_bound is not None:
            object.__setattr__(self, "finite_range_bound", Fraction(self.finite_range_bound))


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str = "ok"
    offending: DangerPoint = None

    def __bool__(self):
        return self.accepted


@dataclass
class RunStats:
    nodes: int = 0
    tests: int = 0
    frontier_sizes: list = field(default_factory=list)


def scan_height_bound(R, K):
    """Largest integer height H with H**3 < R**K (0 when K = 0)."""
    if K <= 0:
        return 0
    return iroot(R**K - 1, 3)


def chain_cubes(cube, chain, R):
    out = [cube]
    for index in chain:
        out.append(out[-1].child(index, R))
    return out


# -- integer kernel ------------------------------------------------------------


class _Kernel:
    def __init__(self, config):
        self.config = config
        m, n, R = config.m, config.n, config.R
        self.m, self.n, self.R = m, n, R
        self.size = m * n
        edge = config.edge
        self.Ln, self.Ld = edge.numerator, edge.denominator
        origin = config.cube.lower
        D = 1
        for v in itertools.chain(itertools.chain(*origin), config.gamma):
            D = D * v.denominator // math.gcd(D, v.denominator)
        self.D = D
        self.origin = [[int(v * D) for v in row] for row in origin]
        self.gamma = [int(g * D) for g in config.gamma]
        self.digit_grid = [child_digits(i, R, self.size) for i in range(R**self.size)]
        self._bands = {}

    def band(self, k):
        """Precomputed pruning data for band k: (q, base_i, neg, l1, en, ed)."""
        if k not in self._bands:
            cfg = self.config
            exponent = self.m + self.n - 1
            entries = []
            for q in enumerate_band(self.n, self.R, k):
                # for gamma = 0 the test at -q mirrors the one at q
                if cfg.homogeneous and not is_canonical(q):
                    continue
                base = [
                    sum(o * v for o, v in zip(row, q)) + g for row, g in zip(self.origin, self.gamma)
                ]
                neg = sum(v for v in q if v < 0)
                l1 = sum(abs(v) for v in q)
                eps = epsilon_upper(cfg.c, prod_plus(q), exponent)
                entries.append((q, base, neg, l1, eps.numerator, eps.denominator))
            self._bands[k] = entries
        return self._bands[k]

    def meets(self, t, g, entry):
        """Does the generation-g cube with offsets t meet Delta(p, q) for some p?"""
        q, base, neg, l1, en, ed = entry
        n = self.n
        scale = self.Ld * self.R**g
        W = self.D * scale
        LnD = self.Ln * self.D
        width = LnD * l1
        prod = 1
        for i in range(self.m):
            s = 0
            row = t[i * n : (i + 1) * n]
            for a, v in zip(row, q):
                s += a * v
            lo = base[i] * scale + LnD * (s + neg)
            hi = lo + width
            fl = lo // W
            if (hi // W) > fl or lo == fl * W:
                return True
            prod *= min(lo - fl * W, (fl + 1) * W - hi)
        return ed * prod <= en * W**self.m

    def child(self, t, index):
        return tuple(self.R * a + d for a, d in zip(t, self.digit_grid[index]))

    def cube(self, t, g):
        cfg = self.config
        sub = cfg.edge / self.R**g
        n = self.n
        lower = tuple(
            tuple(cfg.cube.lower[i][j] + sub * t[i * n + j] for j in range(n)) for i in range(self.m)
        )
        return Cube(lower, sub)

    def survivors(self, t, g, stats=None):
        """Indices of the children of (t, g) that survive step g -> g + 1."""
        band = [e for e in self.band(g) if self.meets(t, g, e)]
        if stats is not None:
            stats.tests += len(self.band(g))
        H = self.config.hyperplane(g + 1)
        out = []
        for index in range(len(self.digit_grid)):
            child = self.child(t, index)
            if any(self.meets(child, g + 1, e) for e in band):
                continue
            if H is not None and cube_meets_hyperplane(self.cube(child, g + 1), H):
                continue
            out.append(index)
        if stats is not None:
            stats.tests += len(band) * len(self.digit_grid)
        return out


# -- searches --------------------------------------------------------------------


def _dfs(kernel, K, node_budget, stats):
    total = len(kernel.digit_grid)
    root = tuple(0 for _ in range(kernel.size))
    # stack of (t, g, surviving indices, position)
    stack = [(root, 0, None, 0)]
    chain, removed = [], []
    deepest = 0
    while stack:
        t, g, surv, pos = stack[-1]
        if g == K:
            return chain, removed
        if surv is None:
            stats.nodes += 1
            if stats.nodes > node_budget:
                raise Exhausted(f"node budget {node_budget} exhausted", generation=deepest + 1)
            surv = kernel.survivors(t, g, stats)
            stack[-1] = (t, g, surv, 0)
        if pos >= len(surv):
            stack.pop()
            if chain:
                chain.pop()
                removed.pop()
            continue
        index = surv[pos]
        stack[-1] = (t, g, surv, pos + 1)
        chain.append(index)
        removed.append(total - len(surv))
        stack.append((kernel.child(t, index), g + 1, None, 0))
        deepest = max(deepest, g + 1)
    raise Exhausted(f"every branch dies before depth {K}", generation=deepest + 1)


def _full(kernel, K, config, stats):
    """Keep every survivor; record per-ancestor removal maxima."""
    frontier = [((), tuple(0 for _ in range(kernel.size)))]
    removed = []
    for g in range(K):
        hk = config.h(g)
        per_ancestor = {}
        nxt = []
        total = len(kernel.digit_grid)
        for path, t in frontier:
            surv = kernel.survivors(t, g, stats)
            stats.nodes += 1
            key = path[:hk]
            per_ancestor[key] = per_ancestor.get(key, 0) + total - len(surv)
            nxt.extend((path + (i,), kernel.child(t, i)) for i in surv)
        removed.append(max(per_ancestor.values(), default=0))
        stats.frontier_sizes.append(len(nxt))
        if not nxt:
            raise Exhausted(f"frontier empty at generation {g + 1}", generation=g + 1)
        frontier = nxt
    stats.frontier_sizes.insert(0, 1)
    return list(frontier[0][0]), removed


def _check_budget(config, removed):
    for k, r in enumerate(removed):
        budget = removal_budget(config, k, config.const_mn)
        if r > budget:
            raise BudgetExceeded(k, r, budget)


def witness_bound(config, witness, K):
    """Certified minimum of the form at the witness over 0 < prod_plus(q)**3 < R**K."""
    bound, _ = scan_min_form(witness, config.gamma, scan_height_bound(config.R, K))
    return bound


def run_construction(config, K, search=DFS, stats=None):
    """Build generations 0..K and return a certificate for the surviving witness.

    ``dfs`` follows the lowest-index surviving child and backtracks on dead
    ends; ``full`` keeps the whole frontier (exponential, small K only) and
    follows its lexicographically first member.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    if search not in SEARCHES:
        raise ValueError(f"search must be one of {SEARCHES}")
    if config.mode == CERTIFIED:
        if config.const_mn is None:
            raise PreconditionViolated("certified-parameters mode needs const_mn")
        report = check_parameters(config, max(K, 1))
        if not report.passed:
            failed = [c.name for c in report.conditions if not c.passed]
            raise PreconditionViolated(f"parameter conditions fail: {failed}")
    stats = stats if stats is not None else RunStats()
    kernel = _Kernel(config)
    if search == DFS:
        chain, removed = _dfs(kernel, K, config.node_budget, stats)
    else:
        chain, removed = _full(kernel, K, config, stats)
    if config.mode == CERTIFIED:
        _check_budget(config, removed)
    witness = chain_cubes(config.cube, chain, config.R)[-1].center()
    bound = witness_bound(config, witness, K)
    if bound is not None and not bound > config.c:
        raise CertificationFailed(f"witness form bound {bound} does not exceed c = {config.c}")
    return Certificate(config, K, chain, removed, witness, bound, search)


# -- verification (Fraction path) ------------------------------------------------


def _cube_hits(cube, qs, config):
    for q in qs:
        P = first_danger_hit(cube, q, config.gamma, config.c, config.homogeneous)
        if P is not None:
            return P
    return None


def _hitting_vectors(cube, qs, config):
    return [q for q in qs if first_danger_hit(cube, q, config.gamma, config.c, config.homogeneous)]


def _band_vectors(config, k):
    return enumerate_band(config.n, config.R, k)


def _removed_children(parent, g, config):
    """Children of a generation-g cube failing the step g -> g + 1 tests."""
    # a child can only meet danger sets its parent meets
    qs = _hitting_vectors(parent, _band_vectors(config, g), config)
    H = config.hyperplane(g + 1)
    count = 0
    for child in parent.children(config.R):
        if _cube_hits(child, qs, config) is not None or (H is not None and cube_meets_hyperplane(child, H)):
            count += 1
    return count


def _replay_full(config, K):
    frontier = [((), config.cube)]
    removed = []
    for g in range(K):
        hk = config.h(g)
        per_ancestor = {}
        nxt = []
        band = _band_vectors(config, g)
        H = config.hyperplane(g + 1)
        for path, cube in frontier:
            qs = _hitting_vectors(cube, band, config)
            for i, child in enumerate(cube.children(config.R)):
                bad = _cube_hits(child, qs, config) is not None or (
                    H is not None and cube_meets_hyperplane(child, H)
                )
                key = path[:hk]
                per_ancestor[key] = per_ancestor.get(key, 0) + bad
                if not bad:
                    nxt.append((path + (i,), child))
        removed.append(max(per_ancestor.values(), default=0))
        frontier = nxt
    return removed, [p for p, _ in frontier]


def verify_certificate(cert):
    """Independently re-derive every claim of a certificate."""
    config, K = cert.config, cert.K
    m, n, R = config.m, config.n, config.R
    try:
        config.validate()
    except ValueError as exc:
        return Verdict(False, f"invalid config: {exc}")
    if K < 0 or len(cert.chain) != K:
        return Verdict(False, f"chain has {len(cert.chain)} entries for depth {K}")
    if len(cert.observed_removals) != K:
        return Verdict(False, "observed_removals length differs from depth")
    if cert.search not in SEARCHES:
        return Verdict(False, f"unknown search {cert.search!r}")
    for g, index in enumerate(cert.chain):
        if not 0 <= index < R ** (m * n):
            return Verdict(False, f"chain index {index} at generation {g + 1} is not a valid child")
    X = cert.witness
    if len(X) != m or any(len(row) != n for row in X):
        return Verdict(False, "witness has the wrong shape")

    # the witness itself avoids every listed danger set
    height = scan_height_bound(R, K)
    point = Cube(X, 0)
    for q in iter_height_bounded(n, height):
        P = first_danger_hit(point, q, config.gamma, config.c, config.homogeneous)
        if P is not None:
            return Verdict(False, f"witness lies in the danger set of {P}", P)

    cubes = chain_cubes(config.cube, cert.chain, R)
    for g in range(1, K + 1):
        cube = cubes[g]
        for k in range(g):
            P = _cube_hits(cube, _band_vectors(config, k), config)
            if P is not None:
                return Verdict(False, f"generation-{g} chain cube meets the danger set of {P}", P)
        for h in range(1, g + 1):
            H = config.hyperplane(h)
            if H is not None and cube_meets_hyperplane(cube, H):
                return Verdict(False, f"generation-{g} chain cube meets hyperplane H_{h}")

    for g, cube in enumerate(cubes):
        if not cube.contains(X):
            return Verdict(False, f"witness outside the generation-{g} chain cube")
    if X != cubes[-1].center():
        return Verdict(False, "witness is not the center of the final cube")

    if cert.search == DFS:
        replay = [_removed_children(cubes[g], g, config) for g in range(K)]
    else:
        replay, survivors = _replay_full(config, K)
        if not survivors or tuple(survivors[0]) != cert.chain:
            return Verdict(False, "chain is not the first surviving path of the full frontier")
    if tuple(replay) != cert.observed_removals:
        for g, (a, b) in enumerate(zip(replay, cert.observed_removals)):
            if a != b:
                return Verdict(False, f"observed removals at generation {g}: recorded {b}, recomputed {a}")

    if config.mode == CERTIFIED:
        report = check_parameters(config, max(K, 1))
        if not report.passed:
            return Verdict(False, "parameter conditions fail")
        for k, r in enumerate(replay):
            if r > removal_budget(config, k, config.const_mn):
                return Verdict(False, f"removals at generation {k} exceed the budget")

    bound = witness_bound(config, X, K)
    if bound != cert.finite_range_bound:
        return Verdict(False, f"finite_range_bound recorded {cert.finite_range_bound}, recomputed {bound}")
    if bound is not None and not bound > config.c:
        return Verdict(False, f"finite_range_bound {bound} does not exceed c = {config.c}")
    return Verdict(True)


def with_config(cert, **changes):
    """Copy of a certificate with some config fields replaced (used for tamper tests)."""
    return replace(cert, config=replace(cert.config, **changes))
