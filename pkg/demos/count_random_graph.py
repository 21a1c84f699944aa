"""Count independent sets of a seeded random graph and compare with the exact value."""

import random
import sys
import time
from fractions import Fraction

from indcount import Graph, WeightedGraph, brute_force_z
from indcount.count import BranchTrace, approximate_independent_sets
from indcount.potential import load_builtin


def random_graph(rng, n, avg_degree):
    p = avg_degree / (n - 1)
    return Graph.from_edges(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p])


def main(n=32, seed=2):
    g = random_graph(random.Random(seed), n, 4.5)
    eps = Fraction(1, 10)
    trace = BranchTrace()
    start = time.perf_counter()
    got = approximate_independent_sets(g, eps, load_builtin("general"), trace=trace, base_exact_threshold=0)
    took = time.perf_counter() - start
    truth = brute_force_z(WeightedGraph.unit(g), cap=n)
    print(f"n={g.n} m={g.m}")
    print(f"estimate {float(got.value):.1f}  exact {truth}  ratio {float(got.value / truth):.6f}  ({took:.2f}s)")
    print(f"{trace.calls} calls, {trace.base_hits} base cases, {trace.reduce_empty} emptied by reduce")
    for line in trace.lines()[:8]:
        print("  ", line)


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
