"""Partition-function-preserving reductions: prune, tree removal, reduce."""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import PreconditionError
from .exact import DEFAULT_CAP, _forest_z_mask, brute_force_z, exact_count_mask
from .graph import WeightedGraph, bits, component_masks, edge_count, near_forest_witness, to_mask


def induced_z(wg: WeightedGraph, mask: int) -> int:
    """Z of the subgraph induced by ``mask`` with multiplier 1.

    Uses a closed neighbourhood as feedback set when one leaves a forest,
    and falls back to brute force otherwise.
    """
    adj = wg.graph.adjacency_masks
    y = near_forest_witness(adj, mask)
    if y is None:
        return brute_force_z(wg.induced_mask(mask), cap=DEFAULT_CAP)
    return exact_count_mask(adj, wg.wplus, wg.wminus, mask, y)


def prune_mask(wg: WeightedGraph, smask: int) -> WeightedGraph:
    g = wg.graph
    adj = g.adjacency_masks
    reach = 0
    for v in bits(smask):
        reach |= adj[v]
    boundary = reach & ~smask
    if boundary.bit_count() > 1:
        raise PreconditionError(f"prune needs at most one external neighbour, found {sorted(bits(boundary))}")
    if not smask:
        return wg
    z_all = induced_z(wg, smask)
    rest = g.delete_mask(smask)
    if not boundary:
        return wg.with_graph(rest, wg.multiplier * z_all)
    v = boundary.bit_length() - 1
    near = smask & adj[v]
    wp = {u: wg.wplus[u] for u in rest.vertices}
    wm = {u: wg.wminus[u] for u in rest.vertices}
    block = 1
    for u in bits(near):
        block *= wg.wminus[u]
    wp[v] = wg.wplus[v] * block * induced_z(wg, smask & ~near)
    wm[v] = wg.wminus[v] * z_all
    return WeightedGraph._trusted(rest, wp, wm, wg.multiplier)


def prune(wg: WeightedGraph, s: Iterable[int]) -> WeightedGraph:
    """Delete ``s`` (which has at most one external neighbour) and fold its
    contribution into the multiplier or into the weights of that neighbour."""
    smask = to_mask(s)
    if smask & ~wg.graph.mask:
        raise PreconditionError("prune set contains vertices not in the graph")
    return prune_mask(wg, smask)


def tree_removal(wg: WeightedGraph) -> WeightedGraph:
    g = wg.graph
    adj = g.adjacency_masks
    factor = 1
    drop = 0
    for comp in component_masks(adj, g.mask):
        if edge_count(adj, comp) == comp.bit_count() - 1:
            factor *= _forest_z_mask(adj, wg.wplus, wg.wminus, comp)
            drop |= comp
    if not drop:
        return wg
    return wg.with_graph(g.delete_mask(drop), wg.multiplier * factor)


def find_near_forest_piece(adj: Mapping[int, int], mask: int) -> int | None:
    """First near-forest component of G, or of some G - v, in the fixed scan order.

    Components of G come first, by least vertex; then v in increasing id with
    the components of G - v by least vertex.
    """
    for comp in component_masks(adj, mask):
        if near_forest_witness(adj, comp) is not None:
            return comp
    for v in bits(mask):
        bit = 1 << v
        for comp in component_masks(adj, mask & ~bit):
            if near_forest_witness(adj, comp) is not None:
                return comp
    return None


def reduce(wg: WeightedGraph) -> WeightedGraph:
    if not wg.graph.n:
        raise PreconditionError("reduce needs a non-empty weighted graph")
    while True:
        g = wg.graph
        piece = find_near_forest_piece(g.adjacency_masks, g.mask)
        if piece is None:
            return wg
        wg = prune_mask(wg, piece)
