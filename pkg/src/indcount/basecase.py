"""Polynomial-time base case: univariate hardcore gadgets and the low-2-degree family.

``approx_z`` turns a lambda-balanced weighted graph into a univariate hardcore
instance by hanging stars off every vertex; the stars' leaf counts encode
each weight ratio in a mixed radix whose digits are powers of
Lambda_t = 1 + lambda (1 + lambda)^-t. The univariate estimator is exact below
a vertex threshold and otherwise multiplies telescoped occupation ratios
computed on a depth-truncated self-avoiding-walk recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from mpmath import ctx_iv

from .errors import InputError, PreconditionError
from .exact import brute_force_z
from .graph import Graph, WeightedGraph, bits, component_masks, in_family_D
from .transform import prune

KAPPA = Fraction(4141, 1000)
DEFAULT_UNI_THRESHOLD = 24
DEFAULT_DEPTH_FACTOR = 6


@dataclass(frozen=True)
class ApproxValue:
    """A non-negative rational claimed to be within a factor 1 +/- epsilon of Z.

    ``exact`` records that no approximation step was taken.
    """

    value: Fraction
    epsilon: Fraction
    exact: bool = False


@dataclass(frozen=True)
class GadgetDigits:
    digits: tuple[int, ...]
    residual: Fraction


def lambda_t(lam: Fraction, t: int) -> Fraction:
    return 1 + lam / (1 + lam) ** t


def floor_log(base: Fraction, x: Fraction) -> int:
    """Largest a >= 0 with base^a <= x, for base > 1 and x >= 1, in exact arithmetic."""
    if x < 1:
        raise InputError("floor_log needs x >= 1")
    hi = 1
    while base**hi <= x:
        hi *= 2
    lo = hi // 2 if hi > 1 else 0
    # base^lo <= x < base^hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if base**mid <= x:
            lo = mid
        else:
            hi = mid
    return lo


def digits_for(lam: Fraction, ratio: Fraction, n: int) -> GadgetDigits:
    """Greedy digits a_0..a_n of ``ratio`` in the bases Lambda_0 > Lambda_1 > ..."""
    x = ratio
    out = []
    for t in range(n + 1):
        base = lambda_t(lam, t)
        a = floor_log(base, x)
        x /= base**a
        out.append(a)
    return GadgetDigits(tuple(out), x)


def compute_digits(lam: Fraction | int, wg: WeightedGraph, n: int) -> dict[int, GadgetDigits]:
    lam = Fraction(lam)
    out = {}
    for v in wg.graph.vertices:
        wp, wm = wg.wplus[v], wg.wminus[v]
        if wp > lam * wm:
            raise PreconditionError(f"vertex {v} is not {lam}-balanced")
        out[v] = digits_for(lam, lam * wm / wp, n)
    return out


def realize_weight_map(g: Graph, phi: Mapping[int, Sequence[int]]) -> Graph:
    """Attach, for every v and every t in phi[v], a star with t leaves whose centre joins v.

    New ids are allocated consecutively above the largest id of g, visiting
    vertices in increasing order and each multiset in the given order.
    """
    adj = {v: set(bits(a)) for v, a in g.adjacency_masks.items()}
    nxt = max(adj, default=0) + 1
    for v in sorted(phi):
        if v not in adj:
            raise InputError(f"weight map mentions unknown vertex {v}")
        for t in phi[v]:
            centre = nxt
            leaves = range(nxt + 1, nxt + 1 + t)
            nxt += t + 1
            adj[centre] = {v, *leaves}
            adj[v].add(centre)
            for leaf in leaves:
                adj[leaf] = {centre}
    return Graph(adj)


# -- the univariate estimator ------------------------------------------------------

def strip_low_degree(wg: WeightedGraph) -> WeightedGraph:
    """Prune vertices of degree at most 1, least id first, until none remain."""
    while True:
        adj = wg.graph.adjacency_masks
        low = min((v for v, a in adj.items() if a.bit_count() <= 1), default=None)
        if low is None:
            return wg
        wg = prune(wg, [low])


def _uniform(g: Graph, lam: Fraction) -> WeightedGraph:
    p, q = lam.numerator, lam.denominator
    return WeightedGraph(g, dict.fromkeys(g.vertices, p), dict.fromkeys(g.vertices, q))


def hardcore_z_exact(g: Graph, lam: Fraction | int) -> Fraction:
    """Z_lambda(G) exactly: pendant trees are folded in, the rest is brute forced."""
    lam = Fraction(lam)
    core = strip_low_degree(_uniform(g, lam))
    return Fraction(brute_force_z(core, cap=max(30, core.graph.n)), lam.denominator**g.n)


def saw_depth(n: int, eps: Fraction, factor: int = DEFAULT_DEPTH_FACTOR) -> int:
    return max(1, math.ceil(factor * math.log(max(n, 2) / float(eps))))


class _Occupation:
    """Occupation ratios R_v(H) = P(v in I) / P(v not in I), truncated by depth.

    R_v(H) = a_v * prod_j 1 / (1 + R_{u_j}(H - v - u_1 - ... - u_{j-1}))
    over the neighbours u_1 < u_2 < ... of v in H, where a_v is the activity
    of v; this unrolls the self-avoiding-walk tree rooted at v. At depth 0 the
    ratio is replaced by a_v / (1 + a_v).
    """

    def __init__(self, adj: Mapping[int, int], activity: Mapping[int, Fraction]):
        self.adj = adj
        self.activity = activity
        self.memo: dict[tuple[int, int, int], Fraction] = {}

    def ratio(self, mask: int, v: int, depth: int) -> Fraction:
        adj = self.adj
        # only v's component matters
        comp = frontier = 1 << v
        while frontier:
            nb = 0
            for u in bits(frontier):
                nb |= adj[u]
            frontier = nb & mask & ~comp
            comp |= frontier
        # a walk from v visits at most |comp| vertices, so deeper limits are exact
        depth = min(depth, comp.bit_count())
        key = (comp, v, depth)
        got = self.memo.get(key)
        if got is not None:
            return got
        a = self.activity[v]
        if depth == 0:
            val = a / (1 + a)
        else:
            val = a
            rest = comp & ~(1 << v)
            for u in bits(self.adj[v] & comp):
                val /= 1 + self.ratio(rest, u, depth - 1)
                rest &= ~(1 << u)
        self.memo[key] = val
        return val


def approx_z_uni(
    g: Graph,
    lam: Fraction | int,
    eps: Fraction,
    depth_override: int | None = None,
    exact_threshold: int = DEFAULT_UNI_THRESHOLD,
    depth_factor: int = DEFAULT_DEPTH_FACTOR,
) -> ApproxValue:
    """Estimate Z_lambda(G) = sum over independent sets I of lambda^|I|.

    Exact when |V(G)| <= exact_threshold. Otherwise pendant trees are folded
    into vertex activities exactly and Z of the remaining core is the
    telescoped product of (1 + R_v) over its vertices in increasing id, each
    ratio taken in the core with the earlier vertices deleted.
    """
    lam, eps = Fraction(lam), Fraction(eps)
    if lam <= 0:
        raise InputError("lambda must be positive")
    if g.n <= exact_threshold:
        return ApproxValue(hardcore_z_exact(g, lam), eps, exact=True)
    depth = depth_override if depth_override is not None else saw_depth(g.n, eps, depth_factor)
    core = strip_low_degree(_uniform(g, lam))
    cg = core.graph
    total = Fraction(core.multiplier * core.wminus_product(cg.vertices), lam.denominator**g.n)
    occ = _Occupation(cg.adjacency_masks, {v: Fraction(core.wplus[v], core.wminus[v]) for v in cg.vertices})
    for comp in component_masks(cg.adjacency_masks, cg.mask):
        rest = comp
        for v in bits(comp):
            total *= 1 + occ.ratio(rest, v, depth)
            rest &= ~(1 << v)
    return ApproxValue(total, eps)


# -- multivariate to univariate ------------------------------------------------------

@dataclass(frozen=True)
class Gadget:
    """A univariate instance whose Z_lambda, times ``scale``, approximates Z(wg)."""

    graph: Graph
    scale: Fraction
    digits: dict[int, GadgetDigits]
    dropped: tuple[int, ...]


def build_gadget(wg: WeightedGraph, eps: Fraction, lam: Fraction | int = 1) -> Gadget:
    """Drop vertices with w+ <= (eps/3n) w-, then encode the remaining weight
    ratios as pendant stars."""
    lam, eps = Fraction(lam), Fraction(eps)
    g = wg.graph
    n = g.n
    if not wg.is_balanced(lam):
        raise PreconditionError(f"weighted graph is not {lam}-balanced")
    cut = eps / (3 * n)
    dropped = tuple(v for v in g.vertices if wg.wplus[v] <= cut * wg.wminus[v])
    core = wg.delete(dropped)
    digits = compute_digits(lam, core, n)
    phi = {v: [t for t, a in enumerate(dg.digits) for _ in range(a)] for v, dg in digits.items()}
    scale = Fraction(wg.multiplier * wg.wminus_product(dropped)) / lam**core.graph.n
    for v, dg in digits.items():
        scale *= Fraction(core.wplus[v], math.prod((1 + lam) ** (i * a) for i, a in enumerate(dg.digits)))
    return Gadget(realize_weight_map(core.graph, phi), scale, digits, dropped)


def approx_z(
    wg: WeightedGraph,
    eps: Fraction,
    lam: Fraction | int = 1,
    exact_threshold: int = DEFAULT_UNI_THRESHOLD,
    depth_override: int | None = None,
) -> ApproxValue:
    lam, eps = Fraction(lam), Fraction(eps)
    n = wg.graph.n
    if n == 0:
        raise PreconditionError("approx_z needs a non-empty weighted graph")
    if not 0 < eps < 1:
        raise InputError("epsilon must lie in (0, 1)")
    if not wg.is_balanced(lam):
        raise PreconditionError(f"weighted graph is not {lam}-balanced")
    if eps <= 3 * n * lam / (1 + lam) ** n:
        return ApproxValue(Fraction(brute_force_z(wg, cap=max(30, n))), eps, exact=True)
    gadget = build_gadget(wg, eps, lam)
    uni = approx_z_uni(gadget.graph, lam, eps / 3, depth_override, exact_threshold)
    return ApproxValue(uni.value * gadget.scale, eps)


# -- the family of bounded 2-degree graphs ---------------------------------------------

def subcritical_margin_certified(kappa: Fraction = KAPPA, lam: Fraction = Fraction(1)) -> bool:
    """Certify lam < kappa^kappa / (kappa - 1)^(kappa + 1) with interval arithmetic."""
    ctx = ctx_iv.MPIntervalContext()
    ctx.prec = 128
    k = ctx.mpf(kappa.numerator) / kappa.denominator
    log_crit = k * ctx.log(k) - (k + 1) * ctx.log(k - 1)
    log_lam = ctx.log(ctx.mpf(lam.numerator) / lam.denominator)
    return bool((log_crit - log_lam).a > 0)


@lru_cache(maxsize=1)
def _family_is_subcritical() -> bool:
    return subcritical_margin_certified()


def base_count(
    wg: WeightedGraph,
    eps: Fraction,
    exact_threshold: int = DEFAULT_UNI_THRESHOLD,
    depth_override: int | None = None,
) -> ApproxValue:
    if not in_family_D(wg.graph):
        raise PreconditionError("base case needs minimum degree 2 and no vertex of degree >= 6 with 2-degree > 26")
    if not _family_is_subcritical():
        raise PreconditionError("could not certify that 4.141 is subcritical for lambda = 1")
    return approx_z(wg, eps, 1, exact_threshold, depth_override)


def fptas_unweighted(g: Graph, eps: Fraction, **kw) -> ApproxValue:
    """Count independent sets of a graph whose high-degree vertices have 2-degree <= 26."""
    adj = g.adjacency_masks
    for v, a in adj.items():
        if a.bit_count() >= 6 and sum(adj[u].bit_count() for u in bits(a)) > 26:
            raise PreconditionError(f"vertex {v} has degree >= 6 and 2-degree > 26")
    wg = strip_low_degree(WeightedGraph.unit(g))
    if wg.graph.n == 0:
        return ApproxValue(Fraction(wg.multiplier), Fraction(eps), exact=True)
    return base_count(wg, Fraction(eps), **kw)


# -- connective-constant certificate --------------------------------------------------

PSI_LOW = {2: 245, 3: 456, 4: 647, 5: 859}


def psi(d: int, p: int) -> Fraction:
    """Per-node weights certifying the connective constant bound."""
    if d in PSI_LOW:
        return Fraction(PSI_LOW[d], 1000)
    if p == 2:
        return Fraction(1)
    if p == 3:
        return Fraction(941, 1000)
    return Fraction(889, 1000)


@dataclass(frozen=True)
class PsiCounterexample:
    children: tuple[int, ...]  # n[2..13]
    d: int
    p: int
    lhs: Fraction
    rhs: Fraction


def verify_psi_kappa(kappa: Fraction = KAPPA) -> list[PsiCounterexample]:
    """All (n[2..13], d, p) with d = 1 + sum n, d <= 5 or p + sum i n[i] <= 26,
    and sum n[i] psi(i, d) > kappa psi(d, p).

    Child-degree multisets are enumerated directly; for d >= 6 only multisets
    with degree sum at most 24 can be admissible (p >= 2), so larger ones are
    never generated.
    """
    bad = []
    for d in range(2, 14):
        size = d - 1
        for kids in combinations_with_replacement(range(2, 14), size):
            total = sum(kids)
            if d >= 6 and total > 24:
                continue
            lhs = sum(psi(i, d) for i in kids)
            for p in range(2, 14):
                if d >= 6 and p + total > 26:
                    break
                rhs = kappa * psi(d, p)
                if lhs > rhs:
                    counts = tuple(kids.count(i) for i in range(2, 14))
                    bad.append(PsiCounterexample(counts, d, p, lhs, rhs))
    return bad


def count_psi_cases() -> int:
    """Number of admissible (n, d, p) tuples that ``verify_psi_kappa`` covers."""
    total = 0
    for d in range(2, 14):
        for kids in combinations_with_replacement(range(2, 14), d - 1):
            s = sum(kids)
            total += 12 if d <= 5 else max(0, min(13, 26 - s) - 1)
    return total


def saw_tree_paths(g: Graph, v: int, max_depth: int) -> list[int]:
    """N(v, i) for i = 1..max_depth: simple paths of length i starting at v."""
    if max_depth < 0:
        raise InputError("max_depth must be non-negative")
    adj = g.adjacency_masks
    if v not in adj:
        raise InputError(f"unknown vertex {v}")
    counts = [0] * max_depth
    stack = [(v, 1 << v, 0)]
    while stack:
        u, seen, depth = stack.pop()
        if depth == max_depth:
            continue
        for w in bits(adj[u] & ~seen):
            counts[depth] += 1
            stack.append((w, seen | 1 << w, depth + 1))
    return counts


def kappa_decreasing_violations(g: Graph, root: int, kappa: Fraction = KAPPA) -> list[tuple[int, ...]]:
    """Nodes x != root of the walk tree from ``root`` where sum over children of
    theta exceeds kappa * theta(x), with theta(x) = psi(deg(x), deg(parent(x)))
    computed from degrees in g. Returns the offending walks."""
    adj = g.adjacency_masks
    deg = {u: a.bit_count() for u, a in adj.items()}
    bad = []
    stack = [((root,), 1 << root)]
    while stack:
        walk, seen = stack.pop()
        kids = [w for w in bits(adj[walk[-1]] & ~seen)]
        if len(walk) > 1:
            x, parent = walk[-1], walk[-2]
            if sum(psi(deg[w], deg[x]) for w in kids) > kappa * psi(deg[x], deg[parent]):
                bad.append(walk)
        for w in kids:
            stack.append((walk + (w,), seen | 1 << w))
    return bad
