"""Three ways to branch near a vertex whose decomposition has |S| = 2.

The example graph has 21 vertices and 25 edges. Branching on the far end z of
the path out of X (and pruning what is left) lowers m - n by 4 in both children,
where branching on v itself lowers it by 3.
"""

from indcount.count import branch_on_vertex, branch_on_z
from indcount.decompose import describe, extended_decomposition
from indcount.graph import Graph, WeightedGraph

NAMES = "v g1 g2 g3 g4 t1 t2 x y y2 z a b c d e f h i j k".split()
EDGES = (
    "v-g1 v-g2 v-g3 v-g4 y2-y y-g2 g2-t1 t1-g3 g3-t2 t2-g4 g1-x y2-z "
    "x-a a-b b-f f-i i-j j-k k-h h-z z-e e-d d-c c-b d-j"
).split()


def build():
    ids = {name: i for i, name in enumerate(NAMES, 1)}
    return Graph.from_edges(len(NAMES), [tuple(sorted(ids[u] for u in e.split("-"))) for e in EDGES]), ids


def main():
    g, ids = build()
    wg = WeightedGraph.unit(g)
    print(f"m - n = {g.m - g.n}")
    ext = extended_decomposition(g, ids["v"])
    print(describe(ext), end="")
    for label, children in (("z", branch_on_z(wg, ext)), ("v", branch_on_vertex(wg, ids["v"]))):
        drops = [g.m - g.n - (child.graph.m - child.graph.n) for child, _ in children]
        print(f"branch on {label}: m - n drops by {drops[0]} (out) and {drops[1]} (in)")


if __name__ == "__main__":
    main()
