"""Fixture graphs, seeded generators and naive oracles shared by the tests."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from indcount.graph import Graph, WeightedGraph, bits, component_masks, in_family_D, near_forest_witness, to_mask
from indcount.transform import find_near_forest_piece


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(1, n + 1), 2))


def star(t: int) -> Graph:
    """Centre 1 with leaves 2..t+1."""
    return Graph.from_edges(t + 1, [(1, i) for i in range(2, t + 2)])


def bowtie() -> Graph:
    """Two triangles sharing vertex 3."""
    return Graph.from_edges(5, [(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)])


def petersen() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def named_graph(names: str, edges: str) -> tuple[Graph, dict[str, int]]:
    """Ids follow the order of ``names``; edges are written as ``a-b`` tokens."""
    ids = {name: i for i, name in enumerate(names.split(), start=1)}
    pairs = [tuple(ids[x] for x in tok.split("-")) for tok in edges.split()]
    return Graph.from_edges(len(ids), [(min(p), max(p)) for p in pairs]), ids


def example21() -> tuple[Graph, dict[str, int]]:
    """Bipartite, reduced, 21 vertices and 25 edges; branching vertex v with S = {x, y}."""
    return named_graph(
        "v g1 g2 g3 g4 t1 t2 x y y2 z a b c d e f h i j k",
        "v-g1 v-g2 v-g3 v-g4 y2-y y-g2 g2-t1 t1-g3 g3-t2 t2-g4 g1-x y2-z "
        "x-a a-b b-f f-i i-j j-k k-h h-z z-e e-d d-c c-b d-j",
    )


def standard_fixture() -> tuple[Graph, dict[str, int]]:
    """The drawn part of the standard-decomposition picture (stubs and ellipses dropped)."""
    return named_graph(
        "v g1 g2 g3 g4 g5 g6 g7 a1 a2 a3 a4 b1 b2 b3 b4 c1 c2 c3 c4 c5 d1 d2 e1 e2 e3 f1 f2 f3",
        "v-g1 v-g2 v-g3 v-g4 v-g5 v-g6 v-g7 g1-g3 g4-g5 "
        "a1-a2 a2-a3 a3-a4 a4-a2 b2-b3 b3-b4 b4-b1 b1-b3 "
        "c3-c4 c4-c5 c5-c3 c3-c2 c2-c1 c1-c4 d1-d2 e1-e3 e3-e2 f2-f1 f1-f3 "
        "a1-g1 g1-b1 b2-g2 g2-c1 b2-g3 g3-c1 c2-g5 g3-d1 d1-g4 e1-g5 g5-e2 g7-f1",
    )


def extended_fixture() -> tuple[Graph, dict[str, int]]:
    """The drawn part of the extended-decomposition picture."""
    return named_graph(
        "v g1 g2 g3 g4 g5 g6 g7 x y a1 a2 a3 a4 p1 p2 z d1 d2 e1 e2 e3 f1 f2 f3",
        "v-g1 v-g2 v-g3 v-g4 v-g5 v-g6 v-g7 g1-g3 g4-g5 "
        "x-a1 a1-a2 a2-a3 a3-a1 x-a4 a4-a3 y-p1 p1-p2 p2-z a3-z a4-z "
        "g1-x x-g3 x-g2 g2-y g5-y g3-d1 d1-g4 e1-g5 g5-e2 g7-f1 d1-d2 e1-e3 e3-e2 f2-f1 f1-f3",
    )


def ids(names: dict[str, int], *keys: str) -> frozenset[int]:
    return frozenset(names[k] for k in keys)


# -- generators ---------------------------------------------------------------------

ACCEPTANCE: list[str] = []


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(1, n + 1), 2) if rng.random() < p])


def random_weights(rng: random.Random, g: Graph, lo: int = 1, hi: int = 10, lam: Fraction | int = 1) -> WeightedGraph:
    """Random lam-balanced weights with w- in [lo, hi]."""
    lam = Fraction(lam)
    lo = max(lo, math.ceil(1 / lam))
    wp, wm = {}, {}
    for v in g.vertices:
        wm[v] = rng.randint(lo, max(lo, hi))
        wp[v] = rng.randint(1, max(1, int(lam * wm[v])))
    return WeightedGraph(g, wp, wm, rng.randint(1, 5))


def random_family_d(rng: random.Random, n: int) -> Graph:
    """Rejection-sample a graph with minimum degree 2 and no heavy high-degree vertex."""
    while True:
        g = random_graph(rng, n, rng.uniform(2.2, 4.5) / (n - 1))
        if in_family_D(g):
            return g


def random_reduced(rng: random.Random, lo: int = 12, hi: int = 16) -> Graph:
    """Rejection-sample a connected reduced graph; none exist on 9 or fewer vertices."""
    while True:
        g = random_graph(rng, rng.randint(lo, hi), rng.uniform(0.25, 0.5))
        adj = g.adjacency_masks
        if len(component_masks(adj, g.mask)) == 1 and find_near_forest_piece(adj, g.mask) is None:
            return g


def sparse_reduced(rng: random.Random) -> Graph:
    """A connected reduced graph from a random cubic graph with a few subdivided edges.

    These are where the size-two S case of the decomposition actually turns up.
    """
    import networkx as nx

    while True:
        n = rng.choice([10, 12, 14, 16])
        h = nx.random_regular_graph(3, n, seed=rng.randrange(2**32))
        edges = [(u + 1, v + 1) for u, v in h.edges()]
        m = n
        for _ in range(rng.randint(0, 5)):
            u, v = edges.pop(rng.randrange(len(edges)))
            m += 1
            edges += [(u, m), (v, m)]
        g = Graph.from_edges(m, [(min(e), max(e)) for e in edges])
        adj = g.adjacency_masks
        if len(component_masks(adj, g.mask)) == 1 and find_near_forest_piece(adj, g.mask) is None:
            return g


def is_reduced_by_definition(g: Graph) -> bool:
    """Every non-empty vertex set spanning a near-forest has two or more outside neighbours."""
    adj, vs = g.adjacency_masks, g.vertices
    for pick in range(1, 1 << len(vs)):
        s = to_mask(vs[i] for i in bits(pick))
        reach = 0
        for v in bits(s):
            reach |= adj[v]
        if (reach & ~s).bit_count() < 2 and near_forest_witness(adj, s) is not None:
            return False
    return True


def connected_graphs(max_n: int):
    """Every connected graph on 1..max_n vertices up to isomorphism, as Graphs on 1..n.

    A connected graph always has a non-cut vertex, so extending every connected
    graph on n - 1 vertices by one vertex with every non-empty neighbourhood
    reaches all connected graphs on n vertices; duplicates are removed by
    canonical certificate.
    """
    import pynauty

    lists = [[j for j in range(max_n) if m >> j & 1] for m in range(1 << max_n)]
    level = [(0,)]
    for n in range(1, max_n + 1):
        if n > 1:
            seen, nxt = set(), []
            top = 1 << (n - 1)
            for adj in level:
                for nb in range(1, top):
                    new = [a | top if nb >> i & 1 else a for i, a in enumerate(adj)]
                    new.append(nb)
                    cert = pynauty.certificate(pynauty.Graph(n, adjacency_dict=dict(enumerate(lists[a] for a in new))))
                    if cert not in seen:
                        seen.add(cert)
                        nxt.append(tuple(new))
            level = nxt
        for adj in level:
            yield Graph({i + 1: [j + 1 for j in lists[a]] for i, a in enumerate(adj)})


# -- oracles ------------------------------------------------------------------------

def naive_z(wg: WeightedGraph) -> int:
    """W times the sum over every vertex subset that spans no edge."""
    g = wg.graph
    vs = g.vertices
    edges = list(g.edges())
    total = 0
    for pick in itertools.product((False, True), repeat=len(vs)):
        chosen = {v for v, b in zip(vs, pick) if b}
        if any(u in chosen and v in chosen for u, v in edges):
            continue
        term = 1
        for v in vs:
            term *= wg.wplus[v] if v in chosen else wg.wminus[v]
        total += term
    return wg.multiplier * total


def count_independent_sets(g: Graph) -> int:
    return naive_z(WeightedGraph.unit(g))


def split_z(wg: WeightedGraph) -> int:
    """Meet in the middle: enumerate independent sets of the first half, table the second."""
    g = wg.graph
    vs = list(g.vertices)
    a, b = vs[: len(vs) // 2], vs[len(vs) // 2 :]
    pos = {v: i for i, v in enumerate(b)}
    nb_b = {v: sum(1 << pos[u] for u in b if g.has_edge(u, v)) for v in vs}
    table = [1] * (1 << len(b))
    for mask in range(1, 1 << len(b)):
        i = (mask & -mask).bit_length() - 1
        v = b[i]
        rest = mask & ~(1 << i)
        forced = 1
        for j in range(len(b)):
            if (nb_b[v] & rest) >> j & 1:
                forced *= wg.wminus[b[j]]
        table[mask] = wg.wminus[v] * table[rest] + wg.wplus[v] * forced * table[rest & ~nb_b[v]]
    full = (1 << len(b)) - 1
    total = 0
    for pick in itertools.product((False, True), repeat=len(a)):
        chosen = [v for v, on in zip(a, pick) if on]
        if any(g.has_edge(u, v) for u, v in itertools.combinations(chosen, 2)):
            continue
        term = 1
        for v, on in zip(a, pick):
            term *= wg.wplus[v] if on else wg.wminus[v]
        hit = 0
        for v in chosen:
            hit |= nb_b[v]
        for j in range(len(b)):
            if hit >> j & 1:
                term *= wg.wminus[b[j]]
        total += term * table[full & ~hit]
    return wg.multiplier * total
