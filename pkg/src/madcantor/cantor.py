"""Abstract (C, R, h, r) Cantor schemes.

A scheme splits every surviving cube of generation k into R_k**l equal
sub-cubes and then, for every surviving cube J of generation h_k, discards at
most r_k of the new cubes inside J.  The survival recurrence

    t_k = R_k**l - r_k / prod_{i=h_k}^{k-1} t_i

controls non-emptiness: if every t_k is positive the nested family never
dies out.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
import random

from .errors import DegenerateProduct, PreconditionViolated


@dataclass(frozen=True)
class CantorScheme:
    l: int
    edge0: Fraction
    R: tuple
    r: tuple
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "R", tuple(int(v) for v in self.R))
        object.__setattr__(self, "r", tuple(Fraction(v) for v in self.r))
        object.__setattr__(self, "h", tuple(int(v) for v in self.h))
        object.__setattr__(self, "edge0", Fraction(self.edge0))
        if self.l < 1:
            raise ValueError("l must be positive")
        for k, hk in enumerate(self.h):
            if not 0 <= hk <= k:
                raise ValueError(f"h_{k} = {hk} outside [0, {k}]")
        if any(v < 1 for v in self.R):
            raise ValueError("R_k must be at least 1")
        if any(v < 0 for v in self.r):
            raise ValueError("r_k must be non-negative")

    @property
    def depth(self):
        return min(len(self.R), len(self.r), len(self.h))

    def edge(self, k):
        """Edge of the generation-k cubes: each split divides the edge by R."""
        out = self.edge0
        for i in range(k):
            out /= self.R[i]
        return out

    @classmethod
    def constant(cls, l, edge0, R, r, h):
        """Scheme with R_k = R and r, h given as sequences."""
        return cls(l, edge0, (R,) * len(r), tuple(r), tuple(h))


def _check_depth(scheme, K):
    if K < 0 or K >= scheme.depth:
        raise ValueError(f"K = {K} outside the scheme depth {scheme.depth}")


def t_sequence(scheme, K):
    """Exact t_0 .. t_K; empty products are 1."""
    _check_depth(scheme, K)
    t = []
    for k in range(K + 1):
        divisor = Fraction(1)
        for i in range(scheme.h[k], k):
            divisor *= t[i]
        if divisor == 0:
            raise DegenerateProduct(f"prod t_i for i in [{scheme.h[k]}, {k}) vanishes")
        t.append(Fraction(scheme.R[k]) ** scheme.l - scheme.r[k] / divisor)
    return t


def g_factor(k, hk):
    """g_k = max(2, h_k) / (8 max(2, k - 1))."""
    return Fraction(max(2, hk), 8 * max(2, k - 1))


def nonempty_budget(scheme, k):
    """g_k / max(2, k) * prod_{i=h_k}^{k} R_i**l."""
    prod = 1
    for i in range(scheme.h[k], k + 1):
        prod *= scheme.R[i] ** scheme.l
    return g_factor(k, scheme.h[k]) / max(2, k) * prod


@dataclass(frozen=True)
class BudgetRow:
    k: int
    r: Fraction
    budget: Fraction
    passed: bool


def check_nonempty_bound(scheme, K):
    """Per-k comparison of r_k against the non-emptiness budget."""
    _check_depth(scheme, K)
    rows = []
    for k in range(K + 1):
        budget = nonempty_budget(scheme, k)
        rows.append(BudgetRow(k, scheme.r[k], budget, scheme.r[k] <= budget))
    return rows


def t_lower_bound_check(scheme, K):
    """Check t_k >= R_k**l (1 - 1/max(2, k)) exactly for k <= K.

    Requires the non-emptiness budget to hold for every k <= K.
    """
    rows = check_nonempty_bound(scheme, K)
    bad = [row.k for row in rows if not row.passed]
    if bad:
        raise PreconditionViolated(f"r_k exceeds the non-emptiness budget at k = {bad}")
    t = t_sequence(scheme, K)
    return [
        t[k] >= Fraction(scheme.R[k]) ** scheme.l * (1 - Fraction(1, max(2, k)))
        for k in range(K + 1)
    ]


def jcount_lower(t):
    """Prefix products prod_{h<k} t_h for k = 0 .. len(t)."""
    out = [Fraction(1)]
    for v in t:
        out.append(out[-1] * v)
    return out


# -- explicit construction (oracle) -------------------------------------------


@dataclass
class Generation:
    """Surviving cubes of one generation, each given by its path of child indices."""

    paths: list


def _removal_plan(strategy, candidates, cap, parent_sizes, rng):
    if strategy == "none" or cap <= 0 or not candidates:
        return []
    if strategy == "random":
        count = rng.randint(0, min(cap, len(candidates)))
        return rng.sample(candidates, count)
    if strategy == "spread":
        # round-robin over parents, evening out the damage
        by_parent = {}
        for path in candidates:
            by_parent.setdefault(path[:-1], []).append(path)
        out = []
        queues = [by_parent[key] for key in sorted(by_parent)]
        while len(out) < cap and any(queues):
            for queue in queues:
                if queue and len(out) < cap:
                    out.append(queue.pop())
        return out
    if strategy == "concentrate":
        # wipe out the smallest families first so whole branches die
        ordered = sorted(candidates, key=lambda p: (parent_sizes[p[:-1]], p))
        return ordered[:cap]
    raise ValueError(f"unknown strategy {strategy!r}")


def simulate_construction(scheme, K, strategy="concentrate", seed=0):
    """Run an explicit construction for generations 0..K.

    Returns ``(counts, removed)`` where ``counts[k] = #J_k`` and ``removed[k]``
    is the largest number of cubes discarded inside a single J of generation
    h_k at step k.  Only the number of cubes matters here, so cubes are
    identified with their paths of child indices.
    """
    if K > scheme.depth:
        raise ValueError("K beyond scheme depth")
    rng = random.Random(seed)
    gens = [[()]]
    removed = []
    for k in range(K):
        children = [p + (i,) for p in gens[k] for i in range(scheme.R[k] ** scheme.l)]
        parent_sizes = {}
        for p in children:
            parent_sizes[p[:-1]] = parent_sizes.get(p[:-1], 0) + 1
        hk = scheme.h[k]
        cap = math.floor(scheme.r[k])
        by_ancestor = {}
        for p in children:
            by_ancestor.setdefault(p[:hk], []).append(p)
        drop = set()
        worst = 0
        for anc in sorted(by_ancestor):
            plan = _removal_plan(strategy, by_ancestor[anc], cap, parent_sizes, rng)
            drop.update(plan)
            worst = max(worst, len(plan))
        gens.append([p for p in children if p not in drop])
        removed.append(worst)
    return [len(g) for g in gens], removed


def cantor2_holds(scheme, counts, removed_caps):
    """#J_{k+1} >= R_k**l #J_k - r_k #J_{h_k} for every recorded generation."""
    for k in range(len(counts) - 1):
        rhs = scheme.R[k] ** scheme.l * counts[k] - Fraction(removed_caps[k]) * counts[scheme.h[k]]
        if counts[k + 1] < rhs:
            return False
    return True
