"""Named graphs with fixed edge labellings used throughout the tests and CLI."""

from __future__ import annotations

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .graphcore import LabeledGraph, make_graph

# Edge k is listed at position k - 1; Schwinger variable x<k>.
K4_EDGES = [(3, 4), (2, 3), (1, 2), (1, 4), (2, 4), (1, 3)]
# Hub 0, rim 1..4 in cyclic order.
W4_EDGES = [(1, 2), (0, 1), (4, 1), (0, 2), (2, 3), (3, 4), (0, 3), (0, 4)]
V8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0), (0, 4), (1, 5), (2, 6), (3, 7)]
# Three loops, terminals on 2, 4, 5, 6.
FUBINI_GAP_EDGES = [(0, 1), (0, 4), (0, 6), (1, 2), (1, 5), (1, 6), (2, 3), (3, 4), (3, 5)]
CLASS_A_EDGES = [("a", "e"), ("a", "d"), ("b", "e"), ("b", "d"), ("c", "e"), ("c", "d"), ("d", "e")]


def k4(terminals: bool = True) -> LabeledGraph:
    """K4 with every vertex a terminal (a..d on vertices 1..4)."""
    return make_graph(K4_EDGES, terminals=dict(zip("abcd", (1, 2, 3, 4))) if terminals else None)


def w4(terminals: bool = True) -> LabeledGraph:
    """The wheel with four spokes, terminals on the rim."""
    return make_graph(W4_EDGES, terminals=dict(zip("abcd", (1, 2, 3, 4))) if terminals else None)


def cycle(n: int) -> LabeledGraph:
    return make_graph([(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> LabeledGraph:
    return make_graph([(i, i + 1) for i in range(n - 1)], vertices=range(n))


def complete(n: int) -> LabeledGraph:
    return make_graph(list(combinations(range(n), 2)), vertices=range(n))


def wheel(n: int) -> LabeledGraph:
    """Hub 0 joined to the cycle 1..n."""
    rim = [(i, i % n + 1) for i in range(1, n + 1)]
    return make_graph([(0, i) for i in range(1, n + 1)] + rim)


def complete_bipartite(m: int, n: int) -> LabeledGraph:
    left = [f"s{i}" for i in range(1, m + 1)]
    right = [f"t{j}" for j in range(1, n + 1)]
    return make_graph([(s, t) for s in left for t in right])


def k24(terminals: bool = True) -> LabeledGraph:
    """K_{2,4} with the four terminals on the larger side."""
    g = complete_bipartite(2, 4)
    return g.with_terminals(dict(zip("abcd", ("t1", "t2", "t3", "t4")))) if terminals else g


def grid(rows: int, cols: int) -> LabeledGraph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return make_graph(edges, vertices=range(rows * cols))


def v8() -> LabeledGraph:
    return make_graph(V8_EDGES)


def v8_plus_02() -> LabeledGraph:
    return make_graph(V8_EDGES + [(0, 2)])


def class_a() -> LabeledGraph:
    """Five-vertex graph whose vertex pair {d, e} separates the roots a, b, c."""
    return make_graph(CLASS_A_EDGES, terminals={"a": "a", "b": "b", "c": "c", "d": "d"})


def fubini_gap() -> LabeledGraph:
    """Massless on-shell three-loop graph: Brown-reducible for {psi, phi} but not Fubini-reducible."""
    return make_graph(FUBINI_GAP_EDGES, terminals=dict(zip("abcd", (2, 4, 5, 6))))


def one_sum(g: LabeledGraph, h: LabeledGraph, at_g, at_h) -> LabeledGraph:
    """Glue ``h`` onto ``g`` identifying vertex ``at_h`` of h with ``at_g`` of g."""
    rename = {}
    base = g.next_vertex_id()
    for i, v in enumerate(h.vertices):
        rename[v] = at_g if v == at_h else base + i
    edges = [(e.u, e.v) for e in g.edges] + [(rename[e.u], rename[e.v]) for e in h.edges]
    out = make_graph(edges, vertices=list(g.vertices) + [rename[v] for v in h.vertices])
    terms = {lab: v for v, lab in g.terminals}
    for v, lab in h.terminals:
        terms.setdefault(lab, rename[v])
    return out.with_terminals(terms)


def named(name: str) -> LabeledGraph:
    """Look up a graph by a short name such as ``k4``, ``w4``, ``c5``, ``k33``."""
    table = {
        "k4": lambda: k4(),
        "w4": lambda: w4(),
        "k24": lambda: k24(),
        "v8": v8,
        "v8e": v8_plus_02,
        "class_a": class_a,
        "fubini_gap": fubini_gap,
        "k34": lambda: complete_bipartite(3, 4),
        "k33": lambda: complete_bipartite(3, 3),
        "k5": lambda: complete(5),
        "k6": lambda: complete(6),
    }
    if name in table:
        return table[name]()
    if name.startswith("c") and name[1:].isdigit():
        return cycle(int(name[1:]))
    if name.startswith("k") and name[1:].isdigit():
        return complete(int(name[1:]))
    if name.startswith("w") and name[1:].isdigit():
        return wheel(int(name[1:]))
    raise KeyError(name)
