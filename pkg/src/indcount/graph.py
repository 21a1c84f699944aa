"""Undirected simple graphs with stable vertex ids, plus weighted graphs.

Vertex ids are positive integers and are never renumbered: deleting a vertex
keeps every other id as it was. Internally each neighbourhood is an int
bitmask indexed by vertex id, so set algebra on vertex sets is integer
algebra. Graphs are immutable; every derived graph is a fresh object.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import InputError


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def low_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# -- mask-level primitives shared by the hot paths ------------------------

def component_masks(adj: Mapping[int, int], mask: int) -> list[int]:
    """Connected components of the subgraph induced by ``mask``, by least vertex."""
    out = []
    while mask:
        comp = frontier = mask & -mask
        while frontier:
            nb = 0
            for v in bits(frontier):
                nb |= adj[v]
            frontier = nb & mask & ~comp
            comp |= frontier
        out.append(comp)
        mask &= ~comp
    return out


def edge_count(adj: Mapping[int, int], mask: int) -> int:
    return sum((adj[v] & mask).bit_count() for v in bits(mask)) >> 1


def is_forest_mask(adj: Mapping[int, int], mask: int) -> bool:
    if not mask:
        return True
    m = edge_count(adj, mask)
    n = mask.bit_count()
    if m >= n:
        return False
    return m == n - len(component_masks(adj, mask))


def near_forest_witness(adj: Mapping[int, int], mask: int) -> int | None:
    """Return a feedback mask Y with mask - Y a forest, of the form N[u] or 0.

    ``None`` means the induced subgraph is not a near-forest. The empty set and
    every forest give 0.
    """
    if not mask:
        return 0
    m = edge_count(adj, mask)
    n = mask.bit_count()
    if m < n and is_forest_mask(adj, mask):
        return 0
    for u in bits(mask):
        closed = (adj[u] | (1 << u)) & mask
        rest = mask & ~closed
        # edges leaving the closed neighbourhood bound what can stay in rest
        inner = m - sum((adj[w] & mask).bit_count() for w in bits(closed)) + edge_count(adj, closed)
        if inner >= rest.bit_count() and rest:
            continue
        if is_forest_mask(adj, rest):
            return closed
    return None


class DegreeProfile(NamedTuple):
    degree: int
    two_degree: int
    gamma2_size: int


class Graph:
    """Immutable undirected simple graph keyed by stable positive vertex ids."""

    __slots__ = ("_adj", "_mask", "_m")

    def __init__(self, adjacency: Mapping[int, Iterable[int]] | None = None):
        adj: dict[int, int] = {}
        for v, nbrs in (adjacency or {}).items():
            if not isinstance(v, int) or v < 1:
                raise InputError(f"vertex ids must be positive integers, got {v!r}")
            adj[v] = adj.get(v, 0)
            for u in nbrs:
                if not isinstance(u, int) or u < 1:
                    raise InputError(f"vertex ids must be positive integers, got {u!r}")
                if u == v:
                    raise InputError(f"self-loop at vertex {v}")
                adj[v] |= 1 << u
                adj[u] = adj.get(u, 0) | (1 << v)
        self._set(adj)

    def _set(self, adj: dict[int, int]) -> None:
        self._adj = dict(sorted(adj.items()))
        self._mask = to_mask(adj)
        self._m = sum(a.bit_count() for a in adj.values()) >> 1

    @classmethod
    def _from_masks(cls, adj: dict[int, int]) -> "Graph":
        g = cls.__new__(cls)
        g._adj = adj
        g._mask = to_mask(adj)
        g._m = sum(a.bit_count() for a in adj.values()) >> 1
        return g

    @classmethod
    def from_edges(cls, vertices: Iterable[int] | int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph; an int ``vertices`` means ids 1..n."""
        if isinstance(vertices, int):
            vertices = range(1, vertices + 1)
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u not in adj or v not in adj:
                raise InputError(f"edge ({u}, {v}) uses an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    # -- basic queries -----------------------------------------------------

    @property
    def adjacency_masks(self) -> Mapping[int, int]:
        return self._adj

    @property
    def mask(self) -> int:
        return self._mask

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self._adj)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(tuple(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, edges={list(self.edges())})"

    def _check(self, v: int) -> None:
        if v not in self._adj:
            raise InputError(f"unknown vertex {v}")

    def neighbor_mask(self, v: int) -> int:
        self._check(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        self._check(v)
        return self._adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and bool(self._adj[u] >> v & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, a in self._adj.items():
            for u in bits(a >> (v + 1) << (v + 1)):
                yield v, u

    def max_degree(self) -> int:
        return max((a.bit_count() for a in self._adj.values()), default=0)

    def min_degree(self) -> int:
        return min((a.bit_count() for a in self._adj.values()), default=0)

    def average_degree(self) -> Fraction:
        return Fraction(2 * self._m, self.n) if self._adj else Fraction(0)

    # -- derivation ----------------------------------------------------------

    def delete(self, vs: Iterable[int]) -> "Graph":
        """Graph minus the given vertices."""
        return self.delete_mask(to_mask(vs))

    def delete_mask(self, drop: int) -> "Graph":
        keep = ~drop
        return Graph._from_masks({v: a & keep for v, a in self._adj.items() if not drop >> v & 1})

    def induced(self, vs: Iterable[int]) -> "Graph":
        return self.induced_mask(to_mask(vs))

    def induced_mask(self, keep: int) -> "Graph":
        keep &= self._mask
        return Graph._from_masks({v: self._adj[v] & keep for v in bits(keep)})


def neighbors(g: Graph, v: int) -> tuple[int, ...]:
    return tuple(bits(g.neighbor_mask(v)))


def gamma_set(g: Graph, s: Iterable[int]) -> frozenset[int]:
    """External neighbourhood of ``s``: vertices outside s adjacent to s."""
    smask = to_mask(s)
    if smask & ~g.mask:
        raise InputError("set contains vertices not in the graph")
    adj = g.adjacency_masks
    out = 0
    for v in bits(smask):
        out |= adj[v]
    return frozenset(bits(out & ~smask))


def degree_profile(g: Graph, v: int) -> DegreeProfile:
    adj = g.adjacency_masks
    nb = g.neighbor_mask(v)
    two = 0
    reach = 0
    for u in bits(nb):
        two += adj[u].bit_count()
        reach |= adj[u]
    return DegreeProfile(nb.bit_count(), two, (reach & ~nb & ~(1 << v)).bit_count())


def components(g: Graph) -> list[tuple[int, ...]]:
    return [tuple(bits(c)) for c in component_masks(g.adjacency_masks, g.mask)]


def is_forest(g: Graph) -> bool:
    return is_forest_mask(g.adjacency_masks, g.mask)


def is_near_forest(g: Graph) -> bool:
    return near_forest_witness(g.adjacency_masks, g.mask) is not None


def in_family_D(g: Graph) -> bool:
    """Minimum degree at least 2 and no vertex with degree >= 6 and 2-degree > 26."""
    adj = g.adjacency_masks
    for v, a in adj.items():
        d = a.bit_count()
        if d < 2:
            return False
        if d >= 6 and sum(adj[u].bit_count() for u in bits(a)) > 26:
            return False
    return True


def two_coloring(g: Graph) -> dict[int, int] | None:
    """A proper 2-colouring as {vertex: 0 or 1}, or None if g has an odd cycle."""
    adj = g.adjacency_masks
    colour: dict[int, int] = {}
    for root in adj:
        if root in colour:
            continue
        colour[root] = 0
        stack = [root]
        while stack:
            v = stack.pop()
            for u in bits(adj[v]):
                if u not in colour:
                    colour[u] = 1 - colour[v]
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return None
    return colour


def is_bipartite(g: Graph) -> bool:
    return two_coloring(g) is not None


# -- text format ---------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse ``p is <n> <m>`` followed by ``e <u> <v>`` lines; ``c`` lines are comments."""
    header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if header is None:
            if len(tok) != 4 or tok[0] != "p" or tok[1] != "is":
                raise InputError(f"line {lineno}: expected 'p is <n> <m>'")
            try:
                header = (int(tok[2]), int(tok[3]))
            except ValueError:
                raise InputError(f"line {lineno}: vertex and edge counts must be integers") from None
            if header[0] < 0 or header[1] < 0:
                raise InputError(f"line {lineno}: negative count")
            continue
        if len(tok) != 3 or tok[0] != "e":
            raise InputError(f"line {lineno}: expected 'e <u> <v>'")
        try:
            u, v = int(tok[1]), int(tok[2])
        except ValueError:
            raise InputError(f"line {lineno}: endpoints must be integers") from None
        if not 1 <= u < v <= header[0]:
            raise InputError(f"line {lineno}: need 1 <= u < v <= {header[0]}, got {u} {v}")
        if (u, v) in seen:
            raise InputError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
        edges.append((u, v))
    if header is None:
        raise InputError("missing 'p is <n> <m>' header")
    if len(edges) != header[1]:
        raise InputError(f"header announces {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def format_graph(g: Graph) -> str:
    """Serialize, relabelling ids to 1..n in increasing order."""
    label = {v: i for i, v in enumerate(g.vertices, 1)}
    lines = [f"p is {g.n} {g.m}"]
    lines += [f"e {label[u]} {label[v]}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


# -- weighted graphs -------------------------------------------------------------

@dataclass(frozen=True)
class WeightedGraph:
    """A graph with positive integer vertex weights w+ and w- and a multiplier W.

    Its partition function is W times the sum over independent sets I of
    w+(I) * w-(V \\ I).
    """

    graph: Graph
    wplus: Mapping[int, int]
    wminus: Mapping[int, int]
    multiplier: int = 1

    def __post_init__(self):
        for v in self.graph.vertices:
            if v not in self.wplus or v not in self.wminus:
                raise InputError(f"vertex {v} has no weight")
            if self.wplus[v] <= 0 or self.wminus[v] <= 0:
                raise InputError(f"weights at vertex {v} must be positive")
        if self.multiplier <= 0:
            raise InputError("multiplier must be positive")

    @classmethod
    def unit(cls, g: Graph, multiplier: int = 1) -> "WeightedGraph":
        ones = dict.fromkeys(g.vertices, 1)
        return cls(g, ones, ones, multiplier)

    @classmethod
    def _trusted(cls, g: Graph, wplus, wminus, multiplier: int) -> "WeightedGraph":
        wg = object.__new__(cls)
        object.__setattr__(wg, "graph", g)
        object.__setattr__(wg, "wplus", wplus)
        object.__setattr__(wg, "wminus", wminus)
        object.__setattr__(wg, "multiplier", multiplier)
        return wg

    def with_graph(self, g: Graph, multiplier: int | None = None) -> "WeightedGraph":
        """Same weights on a subgraph; weights of deleted vertices are dropped."""
        wp, wm = self.wplus, self.wminus
        return WeightedGraph._trusted(
            g,
            {v: wp[v] for v in g.vertices},
            {v: wm[v] for v in g.vertices},
            self.multiplier if multiplier is None else multiplier,
        )

    def delete(self, vs: Iterable[int]) -> "WeightedGraph":
        return self.with_graph(self.graph.delete(vs))

    def delete_mask(self, drop: int) -> "WeightedGraph":
        return self.with_graph(self.graph.delete_mask(drop))

    def induced_mask(self, keep: int, multiplier: int = 1) -> "WeightedGraph":
        return self.with_graph(self.graph.induced_mask(keep), multiplier)

    def is_balanced(self, lam: Fraction | int = 1) -> bool:
        return all(self.wplus[v] <= lam * self.wminus[v] for v in self.graph.vertices)

    def wminus_product(self, vs: Iterable[int]) -> int:
        out = 1
        for v in vs:
            out *= self.wminus[v]
        return out
