"""Labeled multigraphs: storage, deletion/contraction, spanning structures, separations.

Graphs are immutable.  Vertices are ints or strings, edges carry stable integer
ids (the Schwinger variable of edge ``k`` is ``x<k>``), edges may be parallel
or loops, and up to four vertices carry terminal labels ``a``-``d``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from .poly import VarId, mass_square, schwinger

Vertex = Hashable
TERMINAL_LABELS = ("a", "b", "c", "d")
DEFAULT_KINEMATICS = (("ab|cd", "s"), ("ac|bd", "t"), ("ad|bc", "u"))


class GraphError(ValueError):
    """Invalid graph operation or malformed graph input."""


class TerminalMergeError(GraphError):
    """Contraction would merge two terminals; use rooted-minor semantics instead."""


def vkey(v: Vertex) -> Tuple[int, Union[int, str]]:
    """Sort key placing integer vertices before string vertices."""
    return (0, v) if isinstance(v, int) else (1, str(v))


@dataclass(frozen=True)
class Edge:
    id: int
    u: Vertex
    v: Vertex

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, w: Vertex) -> Vertex:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise GraphError(f"vertex {w!r} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class Separation:
    side_a: FrozenSet[Vertex]
    side_b: FrozenSet[Vertex]

    @property
    def boundary(self) -> FrozenSet[Vertex]:
        return self.side_a & self.side_b

    @property
    def order(self) -> int:
        return len(self.boundary)

    def strict_a(self) -> FrozenSet[Vertex]:
        return self.side_a - self.side_b

    def strict_b(self) -> FrozenSet[Vertex]:
        return self.side_b - self.side_a

    def flipped(self) -> "Separation":
        return Separation(self.side_b, self.side_a)


@dataclass(frozen=True)
class LabeledGraph:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    massive: FrozenSet[int] = frozenset()
    terminals: Tuple[Tuple[Vertex, str], ...] = ()
    kinematics: Tuple[Tuple[str, str], ...] = DEFAULT_KINEMATICS

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge ids")
        for e in self.edges:
            if e.u not in vs or e.v not in vs:
                raise GraphError(f"edge {e.id} has an endpoint outside the vertex set")
            if e.id < 0:
                raise GraphError(f"edge id {e.id} is negative")
        if not set(self.massive) <= set(ids):
            raise GraphError("mass flag on an unknown edge")
        tv = [t for t, _ in self.terminals]
        labels = [lab for _, lab in self.terminals]
        if len(set(tv)) != len(tv):
            raise GraphError("terminal vertices must be distinct")
        if len(set(labels)) != len(labels) or not set(labels) <= set(TERMINAL_LABELS):
            raise GraphError("terminal labels must be distinct members of a,b,c,d")
        if not set(tv) <= vs:
            raise GraphError("terminal on an unknown vertex")
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=vkey)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        object.__setattr__(self, "terminals", tuple(sorted(self.terminals, key=lambda t: t[1])))

    # ------------------------------------------------------------ lookups
    def edge(self, eid: int) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise GraphError(f"unknown edge id {eid}")

    def edge_ids(self) -> List[int]:
        return [e.id for e in self.edges]

    def schwinger(self, eid: int) -> VarId:
        self.edge(eid)
        return schwinger(eid)

    def mass(self, eid: int) -> Optional[VarId]:
        return mass_square(eid) if eid in self.massive else None

    def schwinger_vars(self) -> List[VarId]:
        return [schwinger(e.id) for e in self.edges]

    def terminal_map(self) -> Dict[str, Vertex]:
        return {lab: v for v, lab in self.terminals}

    def label_of(self, v: Vertex) -> Optional[str]:
        for t, lab in self.terminals:
            if t == v:
                return lab
        return None

    def terminal_vertices(self) -> List[Vertex]:
        return [v for v, _ in self.terminals]

    def incident(self, v: Vertex) -> List[Edge]:
        return [e for e in self.edges if e.u == v or e.v == v]

    def neighbors(self, v: Vertex) -> Set[Vertex]:
        out = set()
        for e in self.edges:
            if e.u == v and e.v != v:
                out.add(e.v)
            elif e.v == v and e.u != v:
                out.add(e.u)
        return out

    def adjacency(self) -> Dict[Vertex, Set[Vertex]]:
        adj: Dict[Vertex, Set[Vertex]] = {v: set() for v in self.vertices}
        for e in self.edges:
            if e.u != e.v:
                adj[e.u].add(e.v)
                adj[e.v].add(e.u)
        return adj

    def degree(self, v: Vertex) -> int:
        return sum((2 if e.is_loop else 1) for e in self.incident(v))

    def next_edge_id(self) -> int:
        return max((e.id for e in self.edges), default=0) + 1

    def next_vertex_id(self) -> Vertex:
        ints = [v for v in self.vertices if isinstance(v, int)]
        return max(ints, default=-1) + 1

    # ------------------------------------------------------ construction
    def with_terminals(self, terminals: Union[Mapping[str, Vertex], Sequence[Tuple[Vertex, str]]]) -> "LabeledGraph":
        if isinstance(terminals, Mapping):
            terms = tuple((v, lab) for lab, v in terminals.items())
        else:
            terms = tuple(terminals)
        return replace(self, terminals=terms)

    def without_terminals(self) -> "LabeledGraph":
        return replace(self, terminals=())

    def with_masses(self, eids: Iterable[int]) -> "LabeledGraph":
        return replace(self, massive=frozenset(eids))

    def add_edge(self, u: Vertex, v: Vertex, eid: Optional[int] = None) -> "LabeledGraph":
        eid = self.next_edge_id() if eid is None else eid
        return replace(self, edges=self.edges + (Edge(eid, u, v),))

    def induced(self, keep: Iterable[Vertex]) -> "LabeledGraph":
        """Induced subgraph; terminals outside ``keep`` are dropped."""
        keep = set(keep)
        edges = tuple(e for e in self.edges if e.u in keep and e.v in keep)
        ids = {e.id for e in edges}
        return LabeledGraph(
            tuple(v for v in self.vertices if v in keep),
            edges,
            frozenset(self.massive & ids),
            tuple((v, lab) for v, lab in self.terminals if v in keep),
            self.kinematics,
        )

    def delete_vertex(self, v: Vertex) -> "LabeledGraph":
        return self.induced(w for w in self.vertices if w != v)

    def simple_edges(self) -> Set[FrozenSet[Vertex]]:
        return {frozenset((e.u, e.v)) for e in self.edges if not e.is_loop}

    def to_networkx(self, multigraph: bool = False) -> nx.Graph:
        g = nx.MultiGraph() if multigraph else nx.Graph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            if multigraph:
                g.add_edge(e.u, e.v, key=e.id)
            elif not e.is_loop:
                g.add_edge(e.u, e.v)
        return g

    def components(self) -> List[FrozenSet[Vertex]]:
        adj = self.adjacency()
        seen: Set[Vertex] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            stack, comp = [v], set()
            while stack:
                w = stack.pop()
                if w in comp:
                    continue
                comp.add(w)
                stack.extend(adj[w] - comp)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def make_graph(edges: Iterable[Tuple[Vertex, Vertex]], *, vertices: Optional[Iterable[Vertex]] = None,
               terminals: Optional[Mapping[str, Vertex]] = None, massive: Iterable[int] = (),
               first_id: int = 1) -> LabeledGraph:
    """Build a graph from an endpoint list; edge ids count up from ``first_id``."""
    edge_list = [Edge(first_id + i, u, v) for i, (u, v) in enumerate(edges)]
    vs = set(vertices or ())
    for e in edge_list:
        vs.update((e.u, e.v))
    terms = tuple((v, lab) for lab, v in (terminals or {}).items())
    return LabeledGraph(tuple(vs), tuple(edge_list), frozenset(massive), terms)


# ------------------------------------------------------ deletion/contraction

def delete_edge(g: LabeledGraph, eid: int) -> LabeledGraph:
    g.edge(eid)
    return replace(g, edges=tuple(e for e in g.edges if e.id != eid), massive=g.massive - {eid})


def contract_edge(g: LabeledGraph, eid: int) -> LabeledGraph:
    """Merge the endpoints of a non-loop edge into the smaller vertex id."""
    e = g.edge(eid)
    if e.is_loop:
        raise GraphError(f"cannot contract loop edge {eid}")
    la, lb = g.label_of(e.u), g.label_of(e.v)
    if la is not None and lb is not None:
        raise TerminalMergeError(f"contracting edge {eid} merges terminals {la} and {lb}")
    keep, gone = sorted((e.u, e.v), key=vkey)
    edges = []
    for f in g.edges:
        if f.id == eid:
            continue
        u = keep if f.u == gone else f.u
        v = keep if f.v == gone else f.v
        edges.append(Edge(f.id, u, v))
    label = la if la is not None else lb
    terms = [(v, lab) for v, lab in g.terminals if v not in (e.u, e.v)]
    if label is not None:
        terms.append((keep, label))
    return LabeledGraph(
        tuple(v for v in g.vertices if v != gone),
        tuple(edges),
        g.massive - {eid},
        tuple(terms),
        g.kinematics,
    )


# ---------------------------------------------------- spanning structures

def _index(g: LabeledGraph) -> Tuple[Dict[Vertex, int], List[Tuple[int, int, int]]]:
    idx = {v: i for i, v in enumerate(g.vertices)}
    es = [(e.id, idx[e.u], idx[e.v]) for e in g.edges if not e.is_loop]
    return idx, es


def _reachable_components(comp: List[int], es: Sequence[Tuple[int, int, int]], start: int) -> int:
    """Number of components after adding every edge in ``es[start:]`` to ``comp``."""
    parent: Dict[int, int] = {c: c for c in set(comp)}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    n = len(parent)
    for _, a, b in es[start:]:
        ra, rb = find(comp[a]), find(comp[b])
        if ra != rb:
            parent[ra] = rb
            n -= 1
    return n


def _forests(g: LabeledGraph, target: int) -> Iterator[FrozenSet[int]]:
    """Edge sets of spanning forests with exactly ``target`` components.

    Each edge is either contracted into the forest or deleted; deletion is only
    explored while the target is still reachable (bridges are forced) and
    loops never enter.
    """
    _, es = _index(g)
    n = len(g.vertices)
    if n == 0:
        if target == 1:
            yield frozenset()
        return
    chosen: List[int] = []

    def rec(i: int, comp: List[int], ncomp: int) -> Iterator[FrozenSet[int]]:
        if ncomp == target:
            yield frozenset(chosen)
            return
        if i == len(es):
            return
        eid, a, b = es[i]
        ca, cb = comp[a], comp[b]
        if ca != cb:
            merged = [ca if c == cb else c for c in comp]
            chosen.append(eid)
            yield from rec(i + 1, merged, ncomp - 1)
            chosen.pop()
        if _reachable_components(comp, es, i + 1) <= target:
            yield from rec(i + 1, comp, ncomp)

    start = list(range(n))
    if _reachable_components(start, es, 0) > target:
        return
    yield from rec(0, start, n)


def spanning_trees(g: LabeledGraph) -> Iterator[FrozenSet[int]]:
    """Edge-id sets of all spanning trees (none when ``g`` is disconnected)."""
    return _forests(g, 1)


@dataclass(frozen=True)
class TwoForest:
    tree_a: FrozenSet[int]
    tree_b: FrozenSet[int]
    side_a: FrozenSet[Vertex]
    side_b: FrozenSet[Vertex]

    @property
    def edges(self) -> FrozenSet[int]:
        return self.tree_a | self.tree_b


def spanning_2forests(g: LabeledGraph) -> Iterator[TwoForest]:
    """Unordered spanning 2-forests; the side holding the least vertex comes first."""
    ends = {e.id: (e.u, e.v) for e in g.edges}
    for es in _forests(g, 2):
        adj: Dict[Vertex, Set[Vertex]] = {v: set() for v in g.vertices}
        for eid in es:
            u, v = ends[eid]
            adj[u].add(v)
            adj[v].add(u)
        first = g.vertices[0]
        stack, side = [first], set()
        while stack:
            w = stack.pop()
            if w not in side:
                side.add(w)
                stack.extend(adj[w])
        side_a = frozenset(side)
        side_b = frozenset(g.vertices) - side_a
        tree_a = frozenset(eid for eid in es if ends[eid][0] in side_a)
        yield TwoForest(tree_a, frozenset(es) - tree_a, side_a, side_b)


# --------------------------------------------------------- connectivity

def connectivity(g: LabeledGraph) -> int:
    """Vertex connectivity (complete graphs on n vertices give n - 1)."""
    n = len(g.vertices)
    if n <= 1:
        return 0
    if not g.is_connected():
        return 0
    return nx.node_connectivity(g.to_networkx())


def cut_vertices(g: LabeledGraph) -> List[Vertex]:
    return sorted(nx.articulation_points(g.to_networkx()), key=vkey)


def enumerate_separations(g: LabeledGraph, k: int, *, exact: bool = False) -> List[Separation]:
    """All proper separations of order at most ``k`` (exactly ``k`` if ``exact``).

    A separation is determined by its boundary and a split of the components of
    ``g - boundary`` into two non-empty groups; mirror images are reported once.
    """
    adj = g.adjacency()
    verts = list(g.vertices)
    out: Dict[FrozenSet[FrozenSet[Vertex]], Separation] = {}
    sizes = [k] if exact else range(0, k + 1)
    for size in sizes:
        for boundary in combinations(verts, size):
            bset = frozenset(boundary)
            comps = _components_without(verts, adj, bset)
            if len(comps) < 2:
                continue
            first, rest = comps[0], comps[1:]
            for r in range(0, len(rest)):
                for group in combinations(range(len(rest)), r):
                    a = set(first)
                    for i in group:
                        a |= rest[i]
                    side_a = frozenset(a) | bset
                    side_b = frozenset(verts) - frozenset(a)
                    key = frozenset((side_a, side_b))
                    if key not in out:
                        out[key] = Separation(side_a, side_b)
    return sorted(out.values(), key=lambda s: (s.order, sorted(map(vkey, s.boundary)), sorted(map(vkey, s.side_a))))


def _components_without(verts: Sequence[Vertex], adj: Mapping[Vertex, Set[Vertex]], removed: FrozenSet[Vertex]) -> List[FrozenSet[Vertex]]:
    seen: Set[Vertex] = set(removed)
    comps = []
    for v in verts:
        if v in seen:
            continue
        stack, comp = [v], set()
        while stack:
            w = stack.pop()
            if w in comp:
                continue
            comp.add(w)
            stack.extend(x for x in adj[w] if x not in removed and x not in comp)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def components_without(g: LabeledGraph, removed: Iterable[Vertex]) -> List[FrozenSet[Vertex]]:
    return _components_without(list(g.vertices), g.adjacency(), frozenset(removed))


def is_separation(g: LabeledGraph, sep: Separation) -> bool:
    if sep.side_a | sep.side_b != frozenset(g.vertices):
        return False
    sa, sb = sep.strict_a(), sep.strict_b()
    for e in g.edges:
        if (e.u in sa and e.v in sb) or (e.u in sb and e.v in sa):
            return False
    return True


# -------------------------------------------------------- isomorphism etc.

def is_isomorphic(g: LabeledGraph, h: LabeledGraph) -> bool:
    """Multigraph isomorphism ignoring ids, masses and terminals."""
    return nx.is_isomorphic(g.to_networkx(multigraph=True), h.to_networkx(multigraph=True))


def split_vertex(g: LabeledGraph, v: Vertex, part: Iterable[Vertex]) -> LabeledGraph:
    """Replace ``v`` by adjacent ``v`` and a new vertex taking the neighbors in ``part``."""
    nbrs = g.neighbors(v)
    part = set(part)
    if not part <= nbrs:
        raise GraphError("split part must consist of neighbors of the split vertex")
    rest = nbrs - part
    if len(nbrs) < 4 or len(part) < 2 or len(rest) < 2:
        raise GraphError("split needs degree >= 4 and at least two neighbors on each side")
    new = g.next_vertex_id()
    edges = []
    for e in g.edges:
        if e.is_loop and e.u == v:
            edges.append(e)
        elif e.u == v and e.v in part:
            edges.append(Edge(e.id, new, e.v))
        elif e.v == v and e.u in part:
            edges.append(Edge(e.id, e.u, new))
        else:
            edges.append(e)
    edges.append(Edge(g.next_edge_id(), v, new))
    return replace(g, vertices=g.vertices + (new,), edges=tuple(edges))


# ------------------------------------------------------------------ I/O

def _parse_vertex(x: object, where: str) -> Vertex:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise GraphError(f"{where}: vertex ids must be integers or strings")
    return x


def from_json(data: Union[str, Mapping]) -> LabeledGraph:
    """Parse the JSON graph schema; errors name the offending field."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, Mapping):
        raise GraphError("graph document must be a JSON object")
    if "edges" not in data:
        raise GraphError("missing field 'edges'")
    edges = []
    massive = set()
    for i, item in enumerate(data["edges"]):
        where = f"edges[{i}]"
        if not isinstance(item, Mapping):
            raise GraphError(f"{where}: expected an object")
        for key in ("id", "u", "v"):
            if key not in item:
                raise GraphError(f"{where}: missing field '{key}'")
        if isinstance(item["id"], bool) or not isinstance(item["id"], int):
            raise GraphError(f"{where}.id: expected an integer")
        edges.append(Edge(item["id"], _parse_vertex(item["u"], where + ".u"), _parse_vertex(item["v"], where + ".v")))
        mass = item.get("mass", False)
        if not isinstance(mass, bool):
            raise GraphError(f"{where}.mass: expected a boolean")
        if mass:
            massive.add(item["id"])
    vertices = set()
    for i, v in enumerate(data.get("vertices", [])):
        vertices.add(_parse_vertex(v, f"vertices[{i}]"))
    for e in edges:
        vertices.update((e.u, e.v))
    terms = []
    for i, t in enumerate(data.get("terminals", [])):
        where = f"terminals[{i}]"
        if not isinstance(t, Mapping) or "vertex" not in t or "label" not in t:
            raise GraphError(f"{where}: expected an object with 'vertex' and 'label'")
        terms.append((_parse_vertex(t["vertex"], where + ".vertex"), t["label"]))
    kin = data.get("kinematics", dict(DEFAULT_KINEMATICS))
    if not isinstance(kin, Mapping):
        raise GraphError("kinematics: expected an object")
    kin_items = tuple(sorted((str(k), str(v)) for k, v in kin.items()))
    for k, _ in kin_items:
        if k not in dict(DEFAULT_KINEMATICS):
            raise GraphError(f"kinematics: unknown split {k!r}")
    return LabeledGraph(tuple(vertices), tuple(edges), frozenset(massive), tuple(terms), kin_items)


def to_json(g: LabeledGraph) -> Dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "mass": e.id in g.massive} for e in g.edges],
        "terminals": [{"vertex": v, "label": lab} for v, lab in g.terminals],
        "kinematics": dict(g.kinematics),
    }


def parse_dsl(text: str) -> LabeledGraph:
    """Line format: ``edge u v [mass]``, ``vertex v``, ``terminal v label``; ``#`` comments."""
    edges: List[Tuple[Vertex, Vertex, bool]] = []
    extra: List[Vertex] = []
    terms: Dict[str, Vertex] = {}

    def tok(x: str) -> Vertex:
        return int(x) if x.lstrip("-").isdigit() else x

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "edge" and len(parts) in (3, 4):
            if len(parts) == 4 and parts[3] != "mass":
                raise GraphError(f"line {lineno}: expected 'mass' flag")
            edges.append((tok(parts[1]), tok(parts[2]), len(parts) == 4))
        elif parts[0] == "vertex" and len(parts) == 2:
            extra.append(tok(parts[1]))
        elif parts[0] == "terminal" and len(parts) == 3:
            terms[parts[2]] = tok(parts[1])
        else:
            raise GraphError(f"line {lineno}: cannot parse {raw.strip()!r}")
    g = make_graph([(u, v) for u, v, _ in edges], vertices=extra, terminals=terms)
    return replace(g, massive=frozenset(i + 1 for i, (_, _, m) in enumerate(edges) if m))


def load_graph(path: str) -> LabeledGraph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return from_json(text)
    return parse_dsl(text)
