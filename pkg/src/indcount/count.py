"""The branching counter: reduce, branch on a high-2-degree vertex, recurse."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

from .basecase import DEFAULT_UNI_THRESHOLD, ApproxValue, base_count
from .decompose import ExtendedDecomposition, extended_decomposition, standard_decomposition
from .errors import InputError, StructureError
from .exact import brute_force_z
from .graph import Graph, WeightedGraph, bits, component_masks, edge_count, is_bipartite, to_mask
from .potential import PrePotential, branch_exponents, d2_prime, degree_range, evaluate_f_plus
from .transform import prune_mask, reduce, tree_removal

DEFAULT_BASE_THRESHOLD = 24
HIGH_DEGREE = 11


@dataclass(frozen=True)
class TraceRecord:
    path: str  # "" for the root call, then "0" per out-child and "1" per in-child
    kind: str  # high | s3 | s2 | base | empty
    vertex: int | None
    pot_before: Fraction
    pot_out: Fraction | None = None
    pot_in: Fraction | None = None
    two_degree_ok: bool | None = None

    @property
    def depth(self) -> int:
        return len(self.path)

    def line(self) -> str:
        def fmt(x) -> str:
            return "-" if x is None else str(x)

        return " ".join(
            [str(self.depth), self.kind, fmt(self.vertex), fmt(self.pot_before), fmt(self.pot_out), fmt(self.pot_in)]
        )


@dataclass
class BranchTrace:
    """Per-call records and global counters of one run."""

    records: list[TraceRecord] = field(default_factory=list)
    calls: int = 0
    prunes: int = 0
    base_hits: int = 0
    exact_base_hits: int = 0
    reduce_empty: int = 0

    def merge(self, other: "BranchTrace") -> None:
        self.records += other.records
        self.calls += other.calls
        self.prunes += other.prunes
        self.base_hits += other.base_hits
        self.exact_base_hits += other.exact_base_hits
        self.reduce_empty += other.reduce_empty

    def normalize(self) -> None:
        """Sort records into pre-order with the out-child first."""
        self.records.sort(key=lambda r: r.path)

    def lines(self) -> list[str]:
        return [r.line() for r in self.records]

    def write(self, fp: TextIO) -> None:
        for line in self.lines():
            fp.write(line + "\n")


def _has_heavy_vertex(adj) -> bool:
    return any(a.bit_count() >= 6 and sum(adj[u].bit_count() for u in bits(a)) >= 27 for a in adj.values())


def pick_branch_vertex(g: Graph) -> int:
    adj = g.adjacency_masks
    if not g.n:
        raise StructureError("cannot pick a branch vertex in an empty graph")
    two = {v: sum(adj[u].bit_count() for u in bits(a)) for v, a in adj.items()}
    if g.average_degree() <= 5:
        for v in sorted(adj):
            if adj[v].bit_count() >= 6 and two[v] >= 27:
                return v
        raise StructureError("no vertex of degree >= 6 and 2-degree >= 27")
    m2, n = 2 * g.m, g.n
    best = None
    for v in sorted(adj):
        if adj[v].bit_count() * n >= m2 and (best is None or two[v] > two[best]):
            best = v
    return best


@dataclass(frozen=True)
class _Settings:
    eps: Fraction
    potential: PrePotential | None
    base_exact_threshold: int
    uni_exact_threshold: int
    saw_depth: int | None
    tracing: bool


def _slice_two_degree_ok(p: PrePotential, g: Graph, v: int) -> bool:
    i = p.slice_of(g.m, g.n)
    adj = g.adjacency_masks
    return sum(adj[u].bit_count() for u in bits(adj[v])) >= d2_prime(p.k(i - 1))


def branch_on_vertex(wg: WeightedGraph, v: int):
    """((G_out, W'_out), (G_in, W'_in)) for v out of, or in, the independent set."""
    adj = wg.graph.adjacency_masks
    out = tree_removal(wg.delete_mask(1 << v))
    inn = tree_removal(wg.delete_mask(adj[v] | 1 << v))
    return (out, wg.wminus[v]), (inn, wg.wplus[v] * wg.wminus_product(bits(adj[v])))


def branch_on_z(wg: WeightedGraph, ext: ExtendedDecomposition):
    """Branch on z and prune what is left of X+ in each child."""
    z = ext.z
    adj = wg.graph.adjacency_masks
    xplus = to_mask(ext.x_plus)
    rest = wg.delete_mask(1 << z)
    ra = rest.graph.adjacency_masks
    reach = 0
    for u in bits(xplus):
        reach |= ra[u]
    if reach & ~xplus != 1 << ext.x:
        raise StructureError(f"X+ does not have exactly the external neighbour {ext.x} after deleting {z}")
    out = tree_removal(prune_mask(rest, xplus))
    inn = tree_removal(prune_mask(wg.delete_mask(adj[z] | 1 << z), xplus & ~adj[z]))
    return (out, wg.wminus[z]), (inn, wg.wplus[z] * wg.wminus_product(bits(adj[z])))


def _expand(item, cfg: _Settings, trace: BranchTrace):
    """Process one call. Returns (leaf contribution, list of child stack items)."""
    wg, coeff, path = item
    trace.calls += 1
    p = cfg.potential
    pot = evaluate_f_plus(p, wg) if cfg.tracing else None
    g = wg.graph
    adj = g.adjacency_masks
    high = [v for v, a in adj.items() if a.bit_count() >= HIGH_DEGREE]
    two_ok = None
    if high:
        v = min(high)
        kind = "high"
        (out, w_out), (inn, w_in) = branch_on_vertex(wg, v)
    else:
        wg = reduce(wg)
        g = wg.graph
        adj = g.adjacency_masks
        if not g.n:
            trace.reduce_empty += 1
            if cfg.tracing:
                trace.records.append(TraceRecord(path, "empty", None, pot))
            return coeff * wg.multiplier, []
        if not _has_heavy_vertex(adj):
            trace.base_hits += 1
            if g.n <= cfg.base_exact_threshold:
                trace.exact_base_hits += 1
                value = Fraction(brute_force_z(wg, cap=max(30, g.n)))
            else:
                value = base_count(wg, cfg.eps, cfg.uni_exact_threshold, cfg.saw_depth).value
            if cfg.tracing:
                trace.records.append(TraceRecord(path, "base", None, pot))
            return coeff * value, []
        v = pick_branch_vertex(g)
        if cfg.tracing:
            two_ok = _slice_two_degree_ok(p, g, v)
        comp = next(c for c in component_masks(adj, g.mask) if c >> v & 1)
        gv = g.induced_mask(comp)
        dec = standard_decomposition(gv, v)
        size = len(dec.s_set)
        if size >= 3:
            kind = "s3"
            (out, w_out), (inn, w_in) = branch_on_vertex(wg, v)
        elif size == 2:
            kind = "s2"
            ext = extended_decomposition(gv, v)
            v = ext.z
            (out, w_out), (inn, w_in) = branch_on_z(wg, ext)
            trace.prunes += 2
        else:
            raise StructureError(f"reduced graph gives |S| = {size} at vertex {v}")
    children = []
    contribution = 0
    for tag, child, w in (("0", out, w_out), ("1", inn, w_in)):
        if child.graph.n == 0:
            contribution += coeff * w * child.multiplier
        else:
            children.append((child, coeff * w, path + tag))
    if cfg.tracing:
        trace.records.append(
            TraceRecord(path, kind, v, pot, evaluate_f_plus(p, out), evaluate_f_plus(p, inn), two_ok)
        )
    return contribution, children


def _run(items, cfg: _Settings) -> tuple[Fraction, BranchTrace]:
    trace = BranchTrace()
    total = Fraction(0)
    stack = list(reversed(items))
    while stack:
        contribution, children = _expand(stack.pop(), cfg, trace)
        total += contribution
        stack.extend(reversed(children))
    return total, trace


def _run_one(args) -> tuple[Fraction, BranchTrace]:
    item, cfg = args
    return _run([item], cfg)


def default_threads() -> int:
    raw = os.environ.get("INDCOUNT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"INDCOUNT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise InputError("INDCOUNT_THREADS must be positive")
    return n


def count(
    wg: WeightedGraph,
    eps: Fraction,
    p: PrePotential | None = None,
    trace: BranchTrace | None = None,
    base_exact_threshold: int = DEFAULT_BASE_THRESHOLD,
    uni_exact_threshold: int = DEFAULT_UNI_THRESHOLD,
    saw_depth: int | None = None,
    threads: int = 1,
) -> ApproxValue:
    """Approximate Z(wg) for a non-empty 1-balanced weighted graph without tree components.

    With ``trace`` given, every call is recorded together with the potentials
    f+ of its input and of its two children under ``p``. With ``threads`` > 1
    the recursion tree is split near the root and the subtrees are counted in
    worker processes; the value and the normalized trace do not depend on it.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InputError("epsilon must lie in (0, 1)")
    g = wg.graph
    if not g.n:
        raise InputError("count needs a non-empty weighted graph")
    if not wg.is_balanced(1):
        raise InputError("count needs a 1-balanced weighted graph")
    if any(c.bit_count() - 1 == edge_count(g.adjacency_masks, c) for c in component_masks(g.adjacency_masks, g.mask)):
        raise InputError("count needs a weighted graph without tree components")
    if trace is not None and p is None:
        raise InputError("tracing needs a potential")
    cfg = _Settings(eps, p, base_exact_threshold, uni_exact_threshold, saw_depth, trace is not None)
    root = (wg, 1, "")
    if threads <= 1:
        total, local = _run([root], cfg)
    else:
        local = BranchTrace()
        total = Fraction(0)
        frontier = [root]
        # expand breadth-first until there is enough independent work
        while frontier and len(frontier) < 4 * threads:
            nxt = []
            for item in frontier:
                contribution, children = _expand(item, cfg, local)
                total += contribution
                nxt += children
            frontier = nxt
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for sub_total, sub_trace in pool.map(_run_one, [(item, cfg) for item in frontier]):
                total += sub_total
                local.merge(sub_trace)
    if trace is not None:
        local.normalize()
        trace.merge(local)
    exact = local.base_hits == local.exact_base_hits
    return ApproxValue(Fraction(total), eps, exact=exact)


def approximate_independent_sets(g: Graph, eps: Fraction, p: PrePotential | None = None, **kw) -> ApproxValue:
    """Approximate the number of independent sets of g."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InputError("epsilon must lie in (0, 1)")
    if p is not None and p.bipartite and not is_bipartite(g):
        raise InputError("the bipartite potential applies only to bipartite graphs")
    wg = tree_removal(WeightedGraph.unit(g))
    if not wg.graph.n:
        return ApproxValue(Fraction(wg.multiplier), eps, exact=True)
    return count(wg, eps, p, **kw)


def decrease_witness(p: PrePotential, rec: TraceRecord) -> tuple[int, int] | None:
    """Check one branching record against the guaranteed potential drops.

    For a high-degree branch returns (s, 0) when the drops are at least
    sigma_s and 12 sigma_s; otherwise the first (j, x) whose bounds are met.
    None means no admissible pair works.
    """
    if rec.pot_out is None:
        raise InputError("only branching records carry child potentials")
    d_out = rec.pot_before - rec.pot_out
    d_in = rec.pot_before - rec.pot_in
    if d_out <= 0 or d_in <= 0:
        return None
    if rec.kind == "high":
        s = p.s
        if d_out >= p.f_slice(s, 0, 1) and d_in >= p.f_slice(s, 0, 12):
            return (s, 0)
        return None
    for j in range(1, p.s + 1):
        for x in degree_range(p, j):
            e_out, e_in = branch_exponents(p, j, x)
            if d_out < e_out or d_in < e_in:
                continue
            if p.bipartite:
                general = PrePotential(p.rho, p.sigma, p.boundaries, bipartite=False)
                if d_in < branch_exponents(general, j, x)[1]:
                    continue
            return (j, x)
    return None
