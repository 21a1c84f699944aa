"""Exact partition functions: brute force, forest DP, and feedback-set sums."""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import InputError, SizeError, StructureError
from .graph import WeightedGraph, bits, is_forest_mask, to_mask

DEFAULT_CAP = 30


def brute_force_z(wg: WeightedGraph, cap: int = DEFAULT_CAP) -> int:
    """Sum of W * w+(I) * w-(V \\ I) over all independent sets I.

    Enumerates independent sets by branching on the least remaining vertex
    (out, or in together with its closed neighbourhood). Sub-results are cached
    per remaining vertex set, so the cost is bounded by the number of distinct
    residual sets rather than by 2^n.
    """
    g = wg.graph
    if g.n > cap:
        raise SizeError(f"brute force capped at {cap} vertices, graph has {g.n}")
    adj, wp, wm = g.adjacency_masks, wg.wplus, wg.wminus
    memo: dict[int, int] = {0: 1}

    def z(mask: int) -> int:
        got = memo.get(mask)
        if got is not None:
            return got
        low = mask & -mask
        v = low.bit_length() - 1
        nb = adj[v] & mask
        rest = mask ^ low
        if not nb:
            val = (wp[v] + wm[v]) * z(rest)
        else:
            blocked = 1
            for u in bits(nb):
                blocked *= wm[u]
            val = wm[v] * z(rest) + wp[v] * blocked * z(rest & ~nb)
        memo[mask] = val
        return val

    return wg.multiplier * z(g.mask)


def _forest_z_mask(adj: Mapping[int, int], wp: Mapping[int, int], wm: Mapping[int, int], mask: int) -> int:
    """Two-state tree DP on the induced forest ``mask`` (multiplier 1)."""
    total = 1
    seen = 0
    for root in bits(mask):
        if seen >> root & 1:
            continue
        order = [root]
        parent = {root: -1}
        seen |= 1 << root
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for u in bits(adj[v] & mask & ~seen):
                seen |= 1 << u
                parent[u] = v
                order.append(u)
        z_in: dict[int, int] = {}
        z_out: dict[int, int] = {}
        for v in reversed(order):
            a, b = wp[v], wm[v]
            for u in bits(adj[v] & mask):
                if parent.get(u) == v:
                    a *= z_out[u]
                    b *= z_in[u] + z_out[u]
            z_in[v], z_out[v] = a, b
        total *= z_in[root] + z_out[root]
    return total


def forest_z(wg: WeightedGraph) -> int:
    g = wg.graph
    if not is_forest_mask(g.adjacency_masks, g.mask):
        raise StructureError("forest_z needs an acyclic graph")
    return wg.multiplier * _forest_z_mask(g.adjacency_masks, wg.wplus, wg.wminus, g.mask)


def _independent_subsets(adj: Mapping[int, int], mask: int):
    """Yield (I, blocked) for every independent set I of the induced subgraph,
    where blocked is the union of neighbourhoods of I (over the whole graph)."""
    stack = [(mask, 0, 0)]
    while stack:
        rest, chosen, blocked = stack.pop()
        if not rest:
            yield chosen, blocked
            continue
        low = rest & -rest
        v = low.bit_length() - 1
        stack.append((rest ^ low, chosen, blocked))
        stack.append((rest & ~adj[v] & ~low, chosen | low, blocked | adj[v]))


def exact_count_mask(adj: Mapping[int, int], wp: Mapping[int, int], wm: Mapping[int, int], mask: int, y: int) -> int:
    """Z of the induced subgraph on ``mask`` (multiplier 1) given a feedback set ``y``."""
    forest = mask & ~y
    total = 0
    for chosen, blocked in _independent_subsets(adj, y):
        term = 1
        for v in bits(chosen):
            term *= wp[v]
        # vertices outside I are weighted w-, including forest vertices blocked by I
        for v in bits((y & ~chosen) | (forest & blocked)):
            term *= wm[v]
        total += term * _forest_z_mask(adj, wp, wm, forest & ~blocked)
    return total


def exact_count(wg: WeightedGraph, y: Iterable[int]) -> int:
    """Z(wg) as a sum over independent sets I of G[Y] of forest terms on G - Y - Gamma(I).

    The per-term forests are evaluated with multiplier 1 and the total is
    multiplied by W once.
    """
    g = wg.graph
    ymask = to_mask(y)
    if ymask & ~g.mask:
        raise InputError("feedback set contains vertices not in the graph")
    adj = g.adjacency_masks
    if not is_forest_mask(adj, g.mask & ~ymask):
        raise StructureError("graph minus the feedback set is not a forest")
    return wg.multiplier * exact_count_mask(adj, wg.wplus, wg.wminus, g.mask, ymask)
