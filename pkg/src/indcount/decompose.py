"""Standard and extended decompositions around a branching vertex."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, PreconditionError, StructureError
from .graph import Graph, bits, component_masks, edge_count, to_mask


@dataclass(frozen=True)
class StandardDecomposition:
    root: int
    gamma_v: frozenset[int]
    s_set: frozenset[int]
    x_set: frozenset[int]
    non_tree_components: tuple[frozenset[int], ...]
    tree_components: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class ExtendedDecomposition:
    base: StandardDecomposition
    x: int
    y: int
    z: int
    path: tuple[int, ...]
    x_plus: frozenset[int]
    h_vertices: frozenset[int]


def standard_decomposition(g: Graph, v: int) -> StandardDecomposition:
    adj = g.adjacency_masks
    if v not in adj:
        raise InputError(f"unknown vertex {v}")
    if len(component_masks(adj, g.mask)) > 1:
        raise PreconditionError("standard decomposition needs a connected graph")
    gamma = adj[v]
    closed = gamma | (1 << v)
    second = 0
    for u in bits(gamma):
        second |= adj[u]
    second &= ~closed
    trees, others = [], []
    tree_mask = other_mask = 0
    for comp in component_masks(adj, g.mask & ~closed):
        if edge_count(adj, comp) == comp.bit_count() - 1:
            trees.append(frozenset(bits(comp)))
            tree_mask |= comp
        else:
            others.append(frozenset(bits(comp)))
            other_mask |= comp
    return StandardDecomposition(
        root=v,
        gamma_v=frozenset(bits(gamma)),
        s_set=frozenset(bits(other_mask & second)),
        x_set=frozenset(bits(closed | tree_mask)),
        non_tree_components=tuple(others),
        tree_components=tuple(trees),
    )


def extended_decomposition(g: Graph, v: int) -> ExtendedDecomposition:
    """Extend a standard decomposition with |S| = 2 by the path from y to z.

    z is y itself when y keeps degree >= 2 outside X; otherwise the walk follows
    the chain of degree-2 vertices from y to the first vertex of degree > 2.
    """
    base = standard_decomposition(g, v)
    if len(base.s_set) != 2:
        raise PreconditionError(f"extended decomposition needs |S| = 2, got {len(base.s_set)}")
    adj = g.adjacency_masks
    x, y = sorted(base.s_set)
    outside = g.mask & ~to_mask(base.x_set)

    def deg(u: int) -> int:
        return (adj[u] & outside).bit_count()

    path = [y]
    if deg(y) < 2:
        visited = 1 << y
        prev, cur = y, y
        while True:
            step = adj[cur] & outside & ~(1 << prev) & ~visited if cur != y else adj[cur] & outside
            if not step:
                raise StructureError(f"degree-2 chain from {y} ends at {cur} without a branching vertex")
            nxt = step.bit_length() - 1
            if step.bit_count() > 1:
                raise StructureError(f"chain from {y} branches at {cur}")
            prev, cur = cur, nxt
            visited |= 1 << cur
            path.append(cur)
            d = deg(cur)
            if d > 2:
                break
            if d < 2:
                raise StructureError(f"degree-2 chain from {y} ends at a leaf {cur}")
    z = path[-1]
    if x in path:
        raise StructureError("path from y reaches x; the graph is not reduced")
    x_plus = to_mask(base.x_set) | to_mask(path[:-1])
    return ExtendedDecomposition(
        base=base,
        x=x,
        y=y,
        z=z,
        path=tuple(path),
        x_plus=frozenset(bits(x_plus)),
        h_vertices=frozenset(bits(g.mask & ~x_plus)),
    )


def describe(dec: StandardDecomposition | ExtendedDecomposition) -> str:
    """Labelled text rendering, one field per line."""

    def fmt(s) -> str:
        return "{" + ", ".join(map(str, sorted(s))) + "}"

    ext = dec if isinstance(dec, ExtendedDecomposition) else None
    base = ext.base if ext else dec
    lines = [
        f"v: {base.root}",
        f"Gamma_v: {fmt(base.gamma_v)}",
        f"S: {fmt(base.s_set)}",
        f"X: {fmt(base.x_set)}",
        "non-tree components: " + " ".join(fmt(c) for c in base.non_tree_components),
        "tree components: " + " ".join(fmt(c) for c in base.tree_components),
    ]
    if ext:
        lines += [
            f"x: {ext.x}",
            f"y: {ext.y}",
            f"z: {ext.z}",
            "P: " + " ".join(map(str, ext.path)),
            f"X+: {fmt(ext.x_plus)}",
            f"H: {fmt(ext.h_vertices)}",
        ]
    return "\n".join(line.rstrip() for line in lines) + "\n"
