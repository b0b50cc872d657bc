"""Connectivity reductions for rooted minors, W4(X) obstructions and edge-order widths."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .graphcore import LabeledGraph, Separation, components_without, cut_vertices, enumerate_separations, vkey

Vertex = Hashable
LABELS = ("a", "b", "c", "d")


class StructureError(ValueError):
    pass


# ------------------------------------------------------------- reductions

@dataclass
class ReducedInstance:
    graph: LabeledGraph
    relabel: Dict[str, Vertex]
    derivation: str

    def as_dict(self) -> dict:
        return {"derivation": self.derivation, "relabel": {k: str(v) for k, v in sorted(self.relabel.items())},
                "vertices": [str(v) for v in self.graph.vertices]}


@dataclass
class ReductionResult:
    """``G`` has the rooted minor iff ``not no_minor`` and some instance has it."""

    lemma: str
    no_minor: bool = False
    instances: List[ReducedInstance] = field(default_factory=list)


def _roots(g: LabeledGraph, x: Optional[Mapping[str, Vertex]]) -> Dict[str, Vertex]:
    x = dict(x) if x is not None else g.terminal_map()
    if sorted(x) != list(LABELS):
        raise StructureError("expected the four roots a, b, c, d")
    if len(set(x.values())) != 4:
        raise StructureError("roots must be distinct vertices")
    return x


def _instance(g: LabeledGraph, keep: Iterable[Vertex], roots: Mapping[str, Vertex], moved: Mapping[str, Vertex],
              derivation: str, extra_edge: Optional[Tuple[Vertex, Vertex]] = None) -> ReducedInstance:
    sub = g.without_terminals().induced(keep)
    if extra_edge is not None:
        u, v = extra_edge
        if not any({e.u, e.v} == {u, v} for e in sub.edges):
            sub = sub.add_edge(u, v)
    terms = dict(roots)
    terms.update(moved)
    return ReducedInstance(sub.with_terminals(terms), dict(moved), derivation)


def cut_vertex_reduce(g: LabeledGraph, roots: Optional[Mapping[str, Vertex]] = None,
                      cut: Optional[Vertex] = None) -> ReductionResult:
    """Apply the cut-vertex lemma matching the terminal placement (pattern 2-connected)."""
    x = _roots(g, roots)
    cuts = cut_vertices(g)
    if not cuts:
        raise StructureError("graph has no cut vertex")
    if not nx.is_connected(g.to_networkx()):
        raise StructureError("cut-vertex reductions need a connected graph")
    v = cut if cut is not None else cuts[0]
    if v not in cuts:
        raise StructureError(f"{v!r} is not a cut vertex")
    comps = components_without(g, [v])
    where = {lab: next((i for i, c in enumerate(comps) if t in c), None) for lab, t in x.items()}
    off = {lab: i for lab, i in where.items() if i is not None}
    used = sorted(set(off.values()))
    if len(used) <= 1:
        side = comps[used[0]] if used else comps[0]
        return ReductionResult("all-one-side", instances=[
            _instance(g, side | {v}, x, {}, "cut vertex: all roots on one side")])
    if len(off) < 4:
        return ReductionResult("cut-vertex-root", no_minor=True)
    counts = {i: sum(1 for j in off.values() if j == i) for i in used}
    single = [i for i in used if counts[i] == 1]
    if not single:
        return ReductionResult("two-two-split", no_minor=True)
    lone = single[0]
    lab = next(l for l, i in off.items() if i == lone)
    keep = set().union(*(c for i, c in enumerate(comps) if i != lone)) | {v}
    return ReductionResult("three-one-split", instances=[
        _instance(g, keep, {k: t for k, t in x.items() if k != lab}, {lab: v},
                  f"cut vertex: root {lab} moved onto the cut vertex")])


def two_sep_reduce(g: LabeledGraph, sep: Separation, roots: Optional[Mapping[str, Vertex]] = None
                   ) -> ReductionResult:
    """Apply the 2-separation lemma matching the terminal placement (pattern 3-connected)."""
    x = _roots(g, roots)
    if sep.order != 2:
        raise StructureError("expected a separation of order two")
    if not sep.strict_a() or not sep.strict_b():
        raise StructureError("separation must be proper")
    u, v = sorted(sep.boundary, key=vkey)
    in_a = sorted(l for l, t in x.items() if t in sep.strict_a())
    in_b = sorted(l for l, t in x.items() if t in sep.strict_b())
    on = sorted(l for l, t in x.items() if t in sep.boundary)
    side_a, side_b = sep.side_a, sep.side_b
    if not in_b or not in_a:
        side = side_a if not in_b else side_b
        return ReductionResult("all-one-side", instances=[
            _instance(g, side, x, {}, "2-separation: all roots on one side", (u, v))])
    if len(on) == 2:
        return ReductionResult("both-boundary-roots", no_minor=True)
    if len(on) == 0:
        if len(in_a) == 2:
            la, lb = in_a, in_b
            inst_a = _instance(g, side_a, {l: x[l] for l in la}, {lb[0]: u, lb[1]: v},
                               "2-separation 2+2: B-roots moved onto the boundary", (u, v))
            inst_b = _instance(g, side_b, {l: x[l] for l in lb}, {la[0]: u, la[1]: v},
                               "2-separation 2+2: A-roots moved onto the boundary", (u, v))
            return ReductionResult("two-two", instances=[inst_a, inst_b])
        lone, side = (in_a[0], side_b) if len(in_a) == 1 else (in_b[0], side_a)
        rest = {l: x[l] for l in LABELS if l != lone}
        return ReductionResult("one-three", instances=[
            _instance(g, side, rest, {lone: w}, f"2-separation 1+3: root {lone} moved onto {w!r}", (u, v))
            for w in (u, v)])
    # exactly one root on the boundary, the other three split 1 + 2
    w = x[on[0]]
    other = v if w == u else u
    lone, side = (in_a[0], side_b) if len(in_a) == 1 else (in_b[0], side_a)
    rest = {l: x[l] for l in LABELS if l != lone}
    return ReductionResult("boundary-root", instances=[
        _instance(g, side, rest, {lone: other}, f"2-separation: root {lone} moved onto {other!r}", (u, v))])


# -------------------------------------------------------- cycles through X

def cycle_through_roots(g: LabeledGraph, roots: Optional[Mapping[str, Vertex]] = None
                        ) -> Optional[List[Vertex]]:
    """Lexicographically least cycle (as a vertex sequence from the least root) through all roots."""
    x = _roots(g, roots)
    gx = nx.Graph()
    gx.add_nodes_from(g.vertices)
    gx.add_edges_from((e.u, e.v) for e in g.edges if e.u != e.v)
    targets = set(x.values())
    start = min(targets, key=vkey)
    nbrs = {v: sorted(gx.neighbors(v), key=vkey) for v in gx.nodes}
    path = [start]
    on_path = {start}

    def viable(end: Vertex) -> bool:
        blocked = on_path - {end, start}
        need = (targets - on_path) | {start}
        seen, stack = {end}, [end]
        while stack:
            w = stack.pop()
            for y in nbrs[w]:
                if y not in seen and y not in blocked and (y == start or y not in on_path):
                    seen.add(y)
                    if y != start:
                        stack.append(y)
        return need <= seen | {end}

    def dfs(end: Vertex) -> bool:
        for y in nbrs[end]:
            if y == start and len(path) >= 3 and targets <= on_path:
                return True
            if y in on_path:
                continue
            path.append(y)
            on_path.add(y)
            if viable(y) and dfs(y):
                return True
            path.pop()
            on_path.discard(y)
        return False

    return list(path) if dfs(start) else None


# ------------------------------------------------------------ obstructions

@dataclass
class Obstruction:
    kind: str
    separations: List[Separation]
    cycle: List[Vertex]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "cycle": [str(v) for v in self.cycle],
            "separations": [{"a": sorted(map(str, s.side_a)), "b": sorted(map(str, s.side_b)),
                             "boundary": sorted(map(str, s.boundary))} for s in self.separations],
        }


def _oriented_two_separations(g: LabeledGraph, on: FrozenSet[Vertex]) -> List[Separation]:
    out = []
    for s in enumerate_separations(g, 2, exact=True):
        if s.boundary <= on:
            out.extend([s, s.flipped()])
    return out


def _count(xs: FrozenSet[Vertex], part: FrozenSet[Vertex]) -> int:
    return len(xs & part)


def find_obstruction(g: LabeledGraph, cycle: Optional[Sequence[Vertex]] = None,
                     roots: Optional[Mapping[str, Vertex]] = None) -> Optional[Obstruction]:
    """Search for a terminal separating 2-chain or triangle with boundaries on ``cycle``.

    Without a cycle the least cycle through the roots is used; none exists means no witness.
    """
    x = _roots(g, roots)
    xs = frozenset(x.values())
    if cycle is None:
        cycle = cycle_through_roots(g, x)
        if cycle is None:
            return None
    if not xs <= set(cycle):
        raise StructureError("cycle must contain every root")
    seps = _oriented_two_separations(g, frozenset(cycle))
    # a triangle whose first boundary holds a root also yields a chain, so report the triangle first
    tri = _find_triangle(seps, xs)
    if tri is not None:
        return Obstruction("triangle", tri, list(cycle))
    chain = _find_chain(seps, xs)
    if chain is not None:
        return Obstruction("chain", chain, list(cycle))
    return None


def _find_chain(seps: List[Separation], xs: FrozenSet[Vertex]) -> Optional[List[Separation]]:
    starts = [i for i, s in enumerate(seps) if s.boundary & xs and _count(xs, s.strict_a()) == 1]
    ends = {i for i, s in enumerate(seps) if s.boundary & xs and _count(xs, s.strict_b()) == 1}
    succ: Dict[int, List[int]] = {}
    for i, s in enumerate(seps):
        succ[i] = [j for j, t in enumerate(seps)
                   if j != i and s.side_a <= t.side_a and t.side_b <= s.side_b and s.boundary & t.boundary]
    for st in starts:
        parent = {st: None}
        queue = [st]
        while queue:
            i = queue.pop(0)
            # the two remaining roots must sit on the end boundaries
            if i in ends and len(xs & (seps[st].boundary | seps[i].boundary)) == 2:
                out = []
                while i is not None:
                    out.append(seps[i])
                    i = parent[i]
                return out[::-1]
            for j in succ[i]:
                if j not in parent:
                    parent[j] = i
                    queue.append(j)
    return None


def _find_triangle(seps: List[Separation], xs: FrozenSet[Vertex]) -> Optional[List[Separation]]:
    for s1 in seps:
        if len(xs & s1.side_a) != 2 or not s1.boundary & xs:
            continue
        x_, y_ = sorted(s1.boundary, key=vkey)
        for s2 in seps:
            if x_ not in s2.boundary or s2.boundary == s1.boundary:
                continue
            (w,) = tuple(s2.boundary - {x_})
            if w == y_ or _count(xs, s2.strict_a()) != 1 or s2.strict_a() & s1.strict_a():
                continue
            for s3 in seps:
                if s3.boundary != frozenset((w, y_)):
                    continue
                if _count(xs, s3.strict_a()) != 1:
                    continue
                if s3.strict_a() & s1.strict_a() or s3.strict_a() & s2.strict_a():
                    continue
                return [s1, s2, s3]
    return None


# -------------------------------------------------------------- widths

DEFAULT_EDGE_CAP = 20


def _edge_setup(g: LabeledGraph, cap: int) -> Tuple[int, List[int]]:
    m = len(g.edges)
    if m > cap:
        raise StructureError(f"graph has {m} edges, above the cap of {cap}")
    inc = {v: 0 for v in g.vertices}
    for k, e in enumerate(g.edges):
        inc[e.u] |= 1 << k
        inc[e.v] |= 1 << k
    return m, [mask for mask in inc.values() if mask]


def _boundary(s: int, full: int, inc: List[int]) -> int:
    rest = full & ~s
    return sum(1 for mask in inc if mask & s and mask & rest)


def _orderable(m: int, inc: List[int], limit: int, ok=lambda s: True) -> bool:
    full = (1 << m) - 1
    frontier = {0}
    seen = {0}
    while frontier:
        if full in frontier:
            return True
        nxt = set()
        for s in frontier:
            for k in range(m):
                t = s | 1 << k
                if t == s or t in seen:
                    continue
                seen.add(t)
                if _boundary(t, full, inc) <= limit and ok(t):
                    nxt.add(t)
        frontier = nxt
    return False


def vertex_width(g: LabeledGraph, cap: int = DEFAULT_EDGE_CAP) -> int:
    """Least, over edge orders, of the largest vertex boundary between a prefix and its suffix."""
    m, inc = _edge_setup(g, cap)
    if m == 0:
        return 0
    w = 0
    while not _orderable(m, inc, w):
        w += 1
    return w


def is_3_constructable_with_last(g: LabeledGraph, last: Sequence[Vertex], cap: int = DEFAULT_EDGE_CAP) -> bool:
    """An edge order with every prefix boundary at most 3 whose last three new vertices are ``last``."""
    last = frozenset(last)
    if len(last) != 3 or not last <= set(g.vertices):
        raise StructureError("need three distinct vertices of the graph")
    m, inc = _edge_setup(g, cap)
    ends = [(e.u, e.v) for e in g.edges]
    others = frozenset(v for v in g.vertices if v not in last and any(v in p for p in ends))

    def ok(s: int) -> bool:
        seen = set()
        for k in range(m):
            if s >> k & 1:
                seen.update(ends[k])
        return not (seen & last) or others <= seen

    return _orderable(m, inc, 3, ok)
