"""Plain and rooted graph minors by exhaustive branch-set search.

A model of H in G assigns each vertex of H a connected, nonempty set of G
vertices (its branch set) so that the sets are disjoint and every edge of H is
realised by an edge of G between the corresponding sets.  A rooted model also
places each root label inside the branch set prescribed by a placement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .graphcore import LabeledGraph
from .catalog import V8_EDGES, complete

Vertex = Hashable


class MinorError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    """A small simple graph used as a minor pattern."""

    name: str
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Tuple[Vertex, Vertex], ...]

    @staticmethod
    def from_graph(name: str, g: LabeledGraph) -> "Pattern":
        edges = sorted((tuple(sorted(e, key=repr)) for e in g.simple_edges()), key=repr)
        return Pattern(name, tuple(g.vertices), tuple(edges))

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(self.vertices)
        h.add_edges_from(self.edges)
        return h


@dataclass(frozen=True)
class RootedMinorSpec:
    pattern: Pattern
    roots: Tuple[str, ...]
    placements: Tuple[Tuple[Tuple[str, Vertex], ...], ...]

    def __post_init__(self) -> None:
        if not self.placements:
            raise MinorError("a rooted minor spec needs at least one placement")
        for pl in self.placements:
            targets = [h for _, h in pl]
            if len(set(targets)) != len(targets):
                raise MinorError(f"placement {pl} is not injective")
            if sorted(lab for lab, _ in pl) != sorted(self.roots):
                raise MinorError(f"placement {pl} does not cover the roots")
            if any(h not in self.pattern.vertices for h in targets):
                raise MinorError(f"placement {pl} leaves the pattern")

    @property
    def name(self) -> str:
        return self.pattern.name


@dataclass
class MinorModel:
    branch: Dict[Vertex, FrozenSet[Vertex]]
    witness: Dict[Tuple[Vertex, Vertex], Tuple[Vertex, Vertex]]
    placement: Optional[Dict[str, Vertex]] = None

    def as_dict(self) -> dict:
        return {
            "branch": {str(h): sorted(map(str, s)) for h, s in sorted(self.branch.items(), key=lambda kv: str(kv[0]))},
            "placement": None if self.placement is None else {k: str(v) for k, v in sorted(self.placement.items())},
        }


# ------------------------------------------------------------ the families

def _injections(labels: Sequence[str], targets: Sequence[Vertex]):
    return tuple(tuple(zip(labels, perm)) for perm in permutations(targets, len(labels)))


ROOTS4 = ("a", "b", "c", "d")
ROOTS3 = ("a", "b", "c")


def _pattern(name: str, edges: Iterable[Tuple[Vertex, Vertex]]) -> Pattern:
    edges = tuple(edges)
    verts: List[Vertex] = []
    for u, v in edges:
        for x in (u, v):
            if x not in verts:
                verts.append(x)
    return Pattern(name, tuple(verts), edges)


def k4x() -> RootedMinorSpec:
    p = _pattern("k4x", [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    return RootedMinorSpec(p, ROOTS4, _injections(ROOTS4, (1, 2, 3, 4)))


def w4x() -> RootedMinorSpec:
    """Wheel with hub ``h`` and rim r1..r4; roots go to distinct rim vertices."""
    rim = ["r1", "r2", "r3", "r4"]
    p = _pattern("w4x", [("h", r) for r in rim] + [(rim[i], rim[(i + 1) % 4]) for i in range(4)])
    return RootedMinorSpec(p, ROOTS4, _injections(ROOTS4, rim))


def _kmn(name: str, m: int, n: int) -> Pattern:
    return _pattern(name, [(f"s{i}", f"t{j}") for i in range(1, m + 1) for j in range(1, n + 1)])


def k24x() -> RootedMinorSpec:
    return RootedMinorSpec(_kmn("k24x", 2, 4), ROOTS4, _injections(ROOTS4, ("t1", "t2", "t3", "t4")))


L_EDGES = [("v1", "v2"), ("v1", "v5"), ("v2", "v7"), ("v2", "v8"), ("v2", "v3"), ("v3", "v4"),
           ("v4", "v5"), ("v4", "v7"), ("v5", "v6"), ("v6", "v7"), ("v6", "v8"), ("v7", "v8")]


def lx() -> RootedMinorSpec:
    return RootedMinorSpec(_pattern("lx", L_EDGES), ROOTS4, _injections(ROOTS4, ("v1", "v3", "v4", "v5")))


def k22x() -> RootedMinorSpec:
    p = _kmn("k22x", 2, 2)
    placements = tuple(
        (("a", sa), ("b", sb), ("c", tc), ("d", td))
        for sa, sb in (("s1", "s2"), ("s2", "s1"))
        for tc, td in (("t1", "t2"), ("t2", "t1"))
    )
    return RootedMinorSpec(p, ROOTS4, placements)


def k23x() -> RootedMinorSpec:
    return RootedMinorSpec(_kmn("k23x", 2, 3), ROOTS3, _injections(ROOTS3, ("t1", "t2", "t3")))


def k33x() -> RootedMinorSpec:
    return RootedMinorSpec(_kmn("k33x", 3, 3), ROOTS3, _injections(ROOTS3, ("t1", "t2", "t3")))


def k31x() -> RootedMinorSpec:
    return RootedMinorSpec(_kmn("k31x", 1, 3), ROOTS3, _injections(ROOTS3, ("t1", "t2", "t3")))


def k3x() -> RootedMinorSpec:
    p = _pattern("k3x", [(1, 2), (2, 3), (1, 3)])
    return RootedMinorSpec(p, ROOTS3, _injections(ROOTS3, (1, 2, 3)))


def plain_pattern(name: str) -> Pattern:
    """Plain patterns: ``k34``, ``k6``, ``v8e`` (V8 plus the chord 02), ``k5``, ``k33``."""
    if name == "k34":
        return _kmn("k34", 3, 4)
    if name == "k33":
        return _kmn("k33", 3, 3)
    if name == "k6":
        return Pattern.from_graph("k6", complete(6))
    if name == "k5":
        return Pattern.from_graph("k5", complete(5))
    if name == "v8e":
        return _pattern("v8e", V8_EDGES + [(0, 2)])
    raise MinorError(f"unknown plain pattern {name!r}")


ROOTED_FAMILIES: Dict[str, Callable[[], RootedMinorSpec]] = {
    "k4x": k4x, "w4x": w4x, "k24x": k24x, "lx": lx, "k22x": k22x,
    "k23x": k23x, "k31x": k31x, "k33x": k33x, "k3x": k3x,
}


# ------------------------------------------------------------- the search

def _automorphisms(p: Pattern) -> List[Dict[Vertex, Vertex]]:
    h = p.to_networkx()
    return list(nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())


def _reduce_placements(spec: RootedMinorSpec) -> List[Dict[str, Vertex]]:
    """One placement per orbit under pattern automorphisms."""
    autos = _automorphisms(spec.pattern)
    seen = set()
    out = []
    for pl in spec.placements:
        key = tuple(sorted(pl))
        if key in seen:
            continue
        out.append(dict(pl))
        for a in autos:
            seen.add(tuple(sorted((lab, a[h]) for lab, h in pl)))
    return out


class _Search:
    """Backtracking over vertices in BFS order; each vertex joins a branch set or is discarded."""

    def __init__(self, g: nx.Graph, p: Pattern) -> None:
        self.gverts = list(g.nodes)
        self.gidx = {v: i for i, v in enumerate(self.gverts)}
        self.n = len(self.gverts)
        self.adj = [0] * self.n
        for u, v in g.edges:
            if u != v:
                i, j = self.gidx[u], self.gidx[v]
                self.adj[i] |= 1 << j
                self.adj[j] |= 1 << i
        self.hverts = list(p.vertices)
        self.hidx = {h: i for i, h in enumerate(self.hverts)}
        self.k = len(self.hverts)
        self.hedges = [(self.hidx[a], self.hidx[b]) for a, b in p.edges]
        self.hadj = [set() for _ in range(self.k)]
        for a, b in self.hedges:
            self.hadj[a].add(b)
            self.hadj[b].add(a)
        self.autos = [{self.hidx[a]: self.hidx[b] for a, b in m.items()} for m in _automorphisms(p)]

    def _nbhd(self, mask: int) -> int:
        out = 0
        while mask:
            low = mask & -mask
            out |= self.adj[low.bit_length() - 1]
            mask ^= low
        return out

    def _reach(self, start: int, within: int) -> int:
        seen = start
        frontier = start
        while frontier:
            frontier = self._nbhd(frontier) & within & ~seen
            seen |= frontier
        return seen

    def _feasible(self, branch: List[int], free: int) -> bool:
        empty = sum(1 for b in branch if not b)
        if empty > bin(free).count("1"):
            return False
        reach = [0] * self.k
        for i, b in enumerate(branch):
            if b:
                r = self._reach(b & -b, b | free)
                if r & b != b:
                    return False
                reach[i] = r
        free_nb = None
        for a, c in self.hedges:
            ra, rc = reach[a], reach[c]
            if ra and rc:
                if not self._nbhd(ra) & branch[c]:
                    return False
            elif ra or rc:
                if not (ra | rc) & free:
                    return False
            else:
                if free_nb is None:
                    free_nb = self._nbhd(free) & free
                if not free_nb:
                    return False
        return True

    def _complete(self, branch: List[int]) -> bool:
        if any(not b for b in branch):
            return False
        for a, c in self.hedges:
            if not self._nbhd(branch[a]) & branch[c]:
                return False
        return all(self._reach(b & -b, b) == b for b in branch)

    def _order(self, seeds: List[int]) -> List[int]:
        order: List[int] = []
        seen = set()
        starts = seeds + sorted(range(self.n), key=lambda i: -bin(self.adj[i]).count("1"))
        for s in starts:
            if s in seen:
                continue
            queue = [s]
            seen.add(s)
            while queue:
                v = queue.pop(0)
                order.append(v)
                for w in range(self.n):
                    if self.adj[v] >> w & 1 and w not in seen:
                        seen.add(w)
                        queue.append(w)
        return order

    def run(self, fixed: Mapping[int, int]) -> Optional[List[int]]:
        """``fixed`` maps G indices to pattern indices; returns branch masks or None."""
        if self.n < self.k:
            return None
        branch = [0] * self.k
        free = (1 << self.n) - 1
        for gi, hi in fixed.items():
            branch[hi] |= 1 << gi
            free &= ~(1 << gi)
        order = [v for v in self._order(sorted(fixed)) if v not in fixed]
        pinned = set(fixed.values())
        if not self._feasible(branch, free):
            return None

        def opened_stabilizer_reps(empties: List[int]) -> List[int]:
            fixed_set = [i for i in range(self.k) if branch[i] or i in pinned]
            reps: List[int] = []
            covered = set()
            for e in empties:
                if e in covered:
                    continue
                reps.append(e)
                for a in self.autos:
                    if all(a[i] == i for i in fixed_set):
                        covered.add(a[e])
            return reps

        def rec(pos: int) -> bool:
            nonlocal free
            if self._complete(branch):
                return True
            if pos == len(order):
                return False
            v = order[pos]
            bit = 1 << v
            free &= ~bit
            nb = self.adj[v]
            touching = [i for i in range(self.k) if branch[i] & nb]
            others = [i for i in range(self.k) if branch[i] and i not in touching]
            empties = opened_stabilizer_reps([i for i in range(self.k) if not branch[i]])
            for i in touching + empties + others:
                branch[i] |= bit
                if self._feasible(branch, free) and rec(pos + 1):
                    return True
                branch[i] &= ~bit
            if self._feasible(branch, free) and rec(pos + 1):
                return True
            free |= bit
            return False

        return list(branch) if rec(0) else None

    def model(self, masks: List[int], placement: Optional[Dict[str, Vertex]] = None) -> MinorModel:
        branch = {}
        for hi, m in enumerate(masks):
            branch[self.hverts[hi]] = frozenset(self.gverts[i] for i in range(self.n) if m >> i & 1)
        witness = {}
        for a, c in self.hedges:
            done = False
            for i in range(self.n):
                if masks[a] >> i & 1:
                    hit = self.adj[i] & masks[c]
                    if hit:
                        j = (hit & -hit).bit_length() - 1
                        witness[(self.hverts[a], self.hverts[c])] = (self.gverts[i], self.gverts[j])
                        done = True
                        break
            if not done:
                raise MinorError("internal: model misses a pattern edge")
        return MinorModel(branch, witness, placement)


def _suppress(gx: nx.Graph) -> Tuple[nx.Graph, Dict[Vertex, FrozenSet[Vertex]]]:
    """Delete vertices of degree at most one and contract vertices of degree two.

    Valid for patterns of minimum degree three; each surviving vertex maps to the
    connected set of original vertices it absorbed.
    """
    gx = gx.copy()
    groups = {v: {v} for v in gx.nodes}
    changed = True
    while changed:
        changed = False
        for v in sorted(gx.nodes, key=repr):
            d = gx.degree(v)
            if d <= 1:
                gx.remove_node(v)
                del groups[v]
                changed = True
            elif d == 2:
                u, w = sorted(gx.neighbors(v), key=repr)
                groups[u] |= groups.pop(v)
                gx.remove_node(v)
                gx.add_edge(u, w)
                changed = True
    return gx, {v: frozenset(s) for v, s in groups.items()}


def has_minor(g: LabeledGraph, h) -> Optional[MinorModel]:
    """Plain minor test; ``h`` is a Pattern, a LabeledGraph or a plain pattern name."""
    if isinstance(h, str):
        h = plain_pattern(h)
    elif isinstance(h, LabeledGraph):
        h = Pattern.from_graph("H", h)
    gx = _simple_nx(g)
    hx = h.to_networkx()
    groups = {v: frozenset((v,)) for v in gx.nodes}
    if hx.number_of_nodes() and min(d for _, d in hx.degree) >= 3:
        if not nx.check_planarity(hx)[0] and nx.check_planarity(gx)[0]:
            return None
        gx, groups = _suppress(gx)
    if gx.number_of_edges() < hx.number_of_edges() or gx.number_of_nodes() < hx.number_of_nodes():
        return None
    s = _Search(gx, h)
    masks = s.run({})
    if masks is None:
        return None
    core = s.model(masks)
    branch = {hv: frozenset().union(*(groups[v] for v in bs)) for hv, bs in core.branch.items()}
    model = MinorModel(branch, _witnesses(g, h, branch))
    if not verify_model(g, h, model):
        raise MinorError("internal: produced an invalid model")
    return model


def _witnesses(g: LabeledGraph, h: Pattern, branch: Mapping[Vertex, FrozenSet[Vertex]]):
    gx = _simple_nx(g)
    out = {}
    for a, c in h.edges:
        for x in sorted(branch[a], key=repr):
            hits = sorted((y for y in gx.neighbors(x) if y in branch[c]), key=repr)
            if hits:
                out[(a, c)] = (x, hits[0])
                break
    return out


def has_rooted_minor(g: LabeledGraph, spec: RootedMinorSpec) -> Optional[MinorModel]:
    """Rooted minor test over every placement in the family (up to pattern symmetry)."""
    tmap = g.terminal_map()
    missing = [r for r in spec.roots if r not in tmap]
    if missing:
        raise MinorError(f"graph lacks terminals {missing}")
    roots = {r: tmap[r] for r in spec.roots}
    if len(set(roots.values())) != len(roots):
        return None
    s = _Search(_simple_nx(g), spec.pattern)
    for placement in _reduce_placements(spec):
        fixed = {s.gidx[roots[lab]]: s.hidx[h] for lab, h in placement.items()}
        masks = s.run(fixed)
        if masks is not None:
            model = s.model(masks, dict(placement))
            if not verify_model(g, spec.pattern, model, spec, roots):
                raise MinorError("internal: produced an invalid rooted model")
            return model
    return None


def verify_model(g: LabeledGraph, h: Pattern, model: MinorModel, spec: Optional[RootedMinorSpec] = None,
                 roots: Optional[Mapping[str, Vertex]] = None) -> bool:
    """Independent check of a model using networkx primitives."""
    gx = nx.Graph()
    gx.add_nodes_from(g.vertices)
    gx.add_edges_from((e.u, e.v) for e in g.edges if e.u != e.v)
    if set(model.branch) != set(h.vertices):
        return False
    used = set()
    for hv, bs in model.branch.items():
        if not bs or not bs <= set(gx.nodes) or used & bs:
            return False
        used |= bs
        if not nx.is_connected(gx.subgraph(bs)):
            return False
    for a, c in h.edges:
        if not any(gx.has_edge(x, y) for x in model.branch[a] for y in model.branch[c]):
            return False
    if spec is not None:
        if model.placement is None or roots is None:
            return False
        if tuple(sorted(model.placement.items(), key=repr)) not in {
            tuple(sorted(pl, key=repr)) for pl in spec.placements
        }:
            return False
        for lab, hv in model.placement.items():
            if roots[lab] not in model.branch[hv]:
                return False
    return True


# ---------------------------------------------------------- criteria

def _disjoint_pair(gx: nx.Graph, s1, t1, s2, t2) -> bool:
    """Vertex-disjoint (s1,t1)- and (s2,t2)-paths, by enumeration of the first path."""
    if len({s1, t1, s2, t2}) < 4:
        return False
    rest = gx.copy()
    rest.remove_nodes_from([s2, t2])
    if s1 not in rest or t1 not in rest:
        return False
    for path in nx.all_simple_paths(rest, s1, t1):
        other = gx.copy()
        other.remove_nodes_from(path)
        if nx.has_path(other, s2, t2):
            return True
    return False


def _simple_nx(g: LabeledGraph) -> nx.Graph:
    gx = nx.Graph()
    gx.add_nodes_from(g.vertices)
    gx.add_edges_from((e.u, e.v) for e in g.edges if e.u != e.v)
    return gx


def k22_path_criterion(g: LabeledGraph, roots: Optional[Mapping[str, Vertex]] = None) -> bool:
    """K22(X) exists iff both crossing disjoint path pairs exist."""
    x = dict(roots) if roots is not None else g.terminal_map()
    a, b, c, d = (x[k] for k in ROOTS4)
    gx = _simple_nx(g)
    return _disjoint_pair(gx, a, c, b, d) and _disjoint_pair(gx, a, d, b, c)


def rooted_k3_criterion(g: LabeledGraph, roots: Optional[Mapping[str, Vertex]] = None) -> bool:
    """K3 rooted at a, b, c exists iff no vertex leaves the roots pairwise separated."""
    x = dict(roots) if roots is not None else g.terminal_map()
    rs = [x[k] for k in ROOTS3]
    if len(set(rs)) < 3:
        return False
    gx = _simple_nx(g)
    for v in gx.nodes:
        rest = gx.copy()
        rest.remove_node(v)
        comp = {}
        for i, cc in enumerate(nx.connected_components(rest)):
            for w in cc:
                comp[w] = i
        labels = [comp[r] for r in rs if r != v]
        if len(set(labels)) == len(labels):
            return False
    return True


# ---------------------------------------------------------- scans

@dataclass
class ScanHit:
    pattern: str
    model: MinorModel

    def as_dict(self) -> dict:
        return {"pattern": self.pattern, "model": self.model.as_dict()}


@dataclass
class ScanReport:
    mode: str
    hits: List[ScanHit] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.hits

    def as_dict(self) -> dict:
        return {"mode": self.mode, "clean": self.clean, "hits": [h.as_dict() for h in self.hits]}


def forbidden_minor_scan(g: LabeledGraph, include_k6: bool = False) -> ScanReport:
    """Known obstructions: plain K34 and V8+02, plus rooted K4, W4, K24, L with four terminals."""
    if g.massive:
        raise MinorError("forbidden-minor scan expects a massless graph")
    labels = set(g.terminal_map())
    if labels and labels != set(ROOTS4):
        raise MinorError("expected no terminals or exactly the four terminals a, b, c, d")
    mode = "psiphi" if labels else "psi"
    report = ScanReport(mode)
    plain = ["k34", "v8e"] + (["k6"] if include_k6 else [])
    for name in plain:
        m = has_minor(g, name)
        if m is not None:
            report.hits.append(ScanHit(name, m))
    if mode == "psiphi":
        for name in ("k4x", "w4x", "k24x", "lx"):
            m = has_rooted_minor(g, ROOTED_FAMILIES[name]())
            if m is not None:
                report.hits.append(ScanHit(name, m))
    return report


@dataclass
class CertifyEntry:
    operation: str
    edge: int
    verdict: str

    def as_dict(self) -> dict:
        return {"operation": self.operation, "edge": self.edge, "verdict": self.verdict}


@dataclass
class CertifyReport:
    itself: str
    entries: List[CertifyEntry]

    @property
    def forbidden(self) -> Optional[bool]:
        """True when minimal non-reducible, False when not, None when any run timed out."""
        verdicts = [self.itself] + [e.verdict for e in self.entries]
        if "timeout" in verdicts:
            return None
        return self.itself == "not-reducible" and all(e.verdict == "reducible" for e in self.entries)

    def as_dict(self) -> dict:
        return {"itself": self.itself, "forbidden": self.forbidden, "entries": [e.as_dict() for e in self.entries]}


def certify_forbidden(g: LabeledGraph, reducer: Callable[[List], Optional[bool]], which: str = "both"
                      ) -> CertifyReport:
    """Check that ``g`` is non-reducible while every single-edge deletion and contraction is reducible.

    Deletion of edge e acts on the polynomials as d/dx_e and contraction as
    x_e = 0, which for massless graphs are the Symanzik polynomials of the minors
    (a contracted edge between two terminals merges their momenta).  ``reducer``
    returns True, False or None for a timeout.
    """
    from .poly import eval_zero, partial
    from .symanzik import phi, psi

    if g.massive:
        raise MinorError("certification expects a massless graph")
    polys = {"psi": [psi(g)], "phi": [phi(g)], "both": [psi(g), phi(g)]}[which]

    def verdict(ps) -> str:
        r = reducer(ps)
        return "timeout" if r is None else ("reducible" if r else "not-reducible")

    entries = []
    for e in g.edges:
        x = g.schwinger(e.id)
        entries.append(CertifyEntry("delete", e.id, verdict([partial(p, x) for p in polys])))
        entries.append(CertifyEntry("contract", e.id, verdict([eval_zero(p, x) for p in polys])))
    return CertifyReport(verdict(polys), entries)
