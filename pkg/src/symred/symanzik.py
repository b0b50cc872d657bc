"""First and second Symanzik polynomials and identity checks for them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .graphcore import (
    TERMINAL_LABELS,
    Edge,
    GraphError,
    LabeledGraph,
    Separation,
    TerminalMergeError,
    contract_edge,
    delete_edge,
    spanning_2forests,
    spanning_trees,
)
from .poly import ONE, ZERO, Poly, VarId, kinematic, mono_var, schwinger

SPLITS = ("ab|cd", "ac|bd", "ad|bc")


class SymanzikError(ValueError):
    """Precondition violation for a Symanzik construction or identity check."""


def split_key(side: Iterable[str], labels: Iterable[str] = TERMINAL_LABELS) -> str:
    """Canonical name of the 2+2 split of the four labels with ``side`` on one side."""
    side = set(side)
    rest = set(labels) - side
    first = side if "a" in side else rest
    other = rest if first is side else side
    return "".join(sorted(first)) + "|" + "".join(sorted(other))


@dataclass(frozen=True)
class Kinematics:
    """Squared momenta seen by forest splits.

    ``invariants`` maps each 2+2 split name to a kinematic variable; terminals
    are on-shell unless ``off_shell`` gives their squared momentum.
    """

    invariants: Tuple[Tuple[str, VarId], ...] = tuple((k, kinematic(v)) for k, v in zip(SPLITS, "stu"))
    off_shell: Tuple[Tuple[str, Poly], ...] = ()

    @staticmethod
    def from_graph(g: LabeledGraph) -> "Kinematics":
        names = dict(g.kinematics)
        defaults = dict(zip(SPLITS, "stu"))
        return Kinematics(tuple((k, kinematic(names.get(k, defaults[k]))) for k in SPLITS))

    def invariant(self, split: str) -> VarId:
        return dict(self.invariants)[split]

    def square_of(self, label: str) -> Optional[Poly]:
        return dict(self.off_shell).get(label)

    def is_on_shell(self, label: str) -> bool:
        return label not in dict(self.off_shell)


def momentum_term(kin: Kinematics, side: Iterable[str], labels: Iterable[str] = TERMINAL_LABELS) -> Poly:
    """Squared total momentum flowing across a forest whose one side holds ``side``.

    Momentum conservation makes both sides equal, so the smaller side decides:
    no terminal gives 0, a single terminal gives its mass-shell value (0 when
    on-shell), and a 2+2 split of four terminals gives the split's invariant.
    """
    labels = list(labels)
    side = [lab for lab in side if lab in labels]
    rest = [lab for lab in labels if lab not in side]
    small = side if len(side) <= len(rest) else rest
    if len(small) == 0:
        return ZERO
    if len(small) == 1:
        sq = kin.square_of(small[0])
        return ZERO if sq is None else sq
    if len(labels) == 4 and len(small) == 2:
        return Poly.var(kin.invariant(split_key(small, labels)))
    raise SymanzikError(f"no squared momentum known for the split {sorted(side)}|{sorted(rest)}")


def _full_mono(g: LabeledGraph) -> int:
    m = 0
    for e in g.edges:
        m += mono_var(schwinger(e.id))
    return m


def _edge_mono(eids: Iterable[int]) -> int:
    m = 0
    for eid in eids:
        m += mono_var(schwinger(eid))
    return m


def psi(g: LabeledGraph) -> Poly:
    """Sum over spanning trees of the product of the non-tree Schwinger variables."""
    full = _full_mono(g)
    terms: Dict[int, int] = {}
    for tree in spanning_trees(g):
        m = full - _edge_mono(tree)
        terms[m] = terms.get(m, 0) + 1
    return Poly(terms)


def mass_term(g: LabeledGraph) -> Poly:
    out = ZERO
    for eid in sorted(g.massive):
        out = out + Poly.var(schwinger(eid)) * Poly.var(g.mass(eid))
    return out


def phi(g: LabeledGraph, kin: Optional[Kinematics] = None) -> Poly:
    """Second Symanzik polynomial, momentum part plus ``psi * sum(alpha_e * m_e^2)``."""
    kin = kin or Kinematics.from_graph(g)
    labels = [lab for _, lab in g.terminals]
    if len(labels) not in (0, 1, 2, 3, 4):
        raise SymanzikError("at most four terminals are supported")
    if len(labels) == 4 and not all(kin.is_on_shell(lab) for lab in labels):
        raise SymanzikError("four terminals must all be on-shell")
    if len(g.components()) > 2:
        return ZERO
    full = _full_mono(g)
    label_at = dict(g.terminals)
    terms: Dict[int, Poly] = {}
    result = ZERO
    if labels:
        for forest in spanning_2forests(g):
            side = [label_at[v] for v in forest.side_a if v in label_at]
            rho = momentum_term(kin, side, labels)
            if not rho.terms:
                continue
            m = full - _edge_mono(forest.edges)
            terms.setdefault(m, ZERO)
            terms[m] = terms[m] + rho
        for m, rho in terms.items():
            result = result + rho * Poly({m: 1})
    if g.massive:
        result = result + psi(g) * mass_term(g)
    return result


# ------------------------------------------------------------------ checks

@dataclass
class Report:
    """Outcome of an identity check; ``lhs``/``rhs`` hold the compared sides."""

    identity: str
    passed: bool
    lhs: Dict[str, Poly] = field(default_factory=dict)
    rhs: Dict[str, Poly] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict:
        return {
            "identity": self.identity,
            "passed": self.passed,
            "lhs": {k: str(v) for k, v in self.lhs.items()},
            "rhs": {k: str(v) for k, v in self.rhs.items()},
            "notes": list(self.notes),
        }


def check_deletion_contraction(g: LabeledGraph, eid: int, kin: Optional[Kinematics] = None) -> Report:
    e = g.edge(eid)
    if e.is_loop:
        raise SymanzikError(f"edge {eid} is a loop")
    if eid in g.massive:
        raise SymanzikError(f"edge {eid} is massive")
    kin = kin or Kinematics.from_graph(g)
    a = Poly.var(schwinger(eid))
    deleted = delete_edge(g, eid)
    report = Report("deletion-contraction", True)
    try:
        contracted = contract_edge(g, eid)
    except TerminalMergeError:
        contracted = None
    if contracted is None:
        contracted_plain = contract_edge(g.without_terminals(), eid)
        lhs_psi = psi(g)
        rhs_psi = psi(deleted) * a + psi(contracted_plain)
        report.notes.append("contraction merges two terminals: phi identity not applicable")
    else:
        lhs_psi = psi(g)
        rhs_psi = psi(deleted) * a + psi(contracted)
        lhs_phi = phi(g, kin)
        rhs_phi = phi(deleted, kin) * a + phi(contracted, kin)
        report.lhs["phi"], report.rhs["phi"] = lhs_phi, rhs_phi
        report.passed &= lhs_phi == rhs_phi
    report.lhs["psi"], report.rhs["psi"] = lhs_psi, rhs_psi
    report.passed &= lhs_psi == rhs_psi
    return report


def check_loop_law(g: LabeledGraph, eid: int, kin: Optional[Kinematics] = None) -> Report:
    e = g.edge(eid)
    if not e.is_loop:
        raise SymanzikError(f"edge {eid} is not a loop")
    kin = kin or Kinematics.from_graph(g)
    a = Poly.var(schwinger(eid))
    h = delete_edge(g, eid)
    report = Report("loop", True)
    report.lhs = {"psi": psi(g), "phi": phi(g, kin)}
    rhs_phi = phi(h, kin) * a
    if eid in g.massive:
        rhs_phi = rhs_phi + psi(g) * a * Poly.var(g.mass(eid))
    report.rhs = {"psi": psi(h) * a, "phi": rhs_phi}
    report.passed = report.lhs == report.rhs
    return report


def _side_graph(g: LabeledGraph, side: FrozenSet, terminals: Mapping[str, object]) -> LabeledGraph:
    return g.induced(side).with_terminals(dict(terminals))


def _strip_boundary_edges(h: LabeledGraph, boundary: FrozenSet) -> LabeledGraph:
    """Drop edges lying inside the boundary, so loops at the cut vertex are counted on one side only."""
    keep = tuple(e for e in h.edges if not (e.u in boundary and e.v in boundary))
    ids = {e.id for e in keep}
    return replace(h, edges=keep, massive=h.massive & ids)


def check_one_separation_factorization(g: LabeledGraph, sep: Separation, kin: Optional[Kinematics] = None) -> Report:
    """Factorization of psi and phi across a cut vertex (or across two components).

    The lemma is chosen by where the terminals sit; the cut vertex inherits the
    momentum of the side it stands in for.
    """
    kin = kin or Kinematics.from_graph(g)
    if sep.order == 0:
        return check_two_component_law(g, kin)
    if sep.order != 1:
        raise SymanzikError("separation must have a single boundary vertex")
    (v,) = tuple(sep.boundary)
    tmap = g.terminal_map()
    in_a = {lab for lab, w in tmap.items() if w in sep.strict_a()}
    in_b = {lab for lab, w in tmap.items() if w in sep.strict_b()}
    at_v = {lab for lab, w in tmap.items() if w == v}
    ga_plain = g.induced(sep.side_a).without_terminals()
    gb_plain = _strip_boundary_edges(g.induced(sep.side_b).without_terminals(), sep.boundary)
    psi_a, psi_b = psi(ga_plain), psi(gb_plain)
    report = Report("one-separation", True)
    report.lhs["psi"], report.rhs["psi"] = psi(g), psi_a * psi_b
    lhs_phi = phi(g, kin)
    if len(in_b) > len(in_a):
        in_a, in_b = in_b, in_a
        sep = sep.flipped()
        ga_plain = g.induced(sep.side_a).without_terminals()
        gb_plain = _strip_boundary_edges(g.induced(sep.side_b).without_terminals(), sep.boundary)
        psi_a, psi_b = psi(ga_plain), psi(gb_plain)
    if not in_b:
        report.identity = "one-separation: all terminals on one side"
        ga = g.induced(sep.side_a)
        rhs_phi = phi(ga, kin) * psi_b + psi_a * phi(gb_plain, kin)
    elif at_v:
        raise SymanzikError("cut vertex is a terminal with terminals on both sides: no factorization")
    elif len(in_b) == 1:
        (d,) = tuple(in_b)
        report.identity = "one-separation: three terminals against one"
        ga = _side_graph(g, sep.side_a, {**{lab: tmap[lab] for lab in in_a}, d: v})
        rhs_phi = phi(ga, kin) * psi_b + psi_a * phi(gb_plain, kin)
    else:
        report.identity = "one-separation: two terminals on each side"
        square = Poly.var(kin.invariant(split_key(in_a)))
        vlab_a = next(lab for lab in TERMINAL_LABELS if lab not in in_a)
        vlab_b = next(lab for lab in TERMINAL_LABELS if lab not in in_b)
        ga = g.induced(sep.side_a).with_terminals([(tmap[lab], lab) for lab in in_a] + [(v, vlab_a)])
        gb = _strip_boundary_edges(g.induced(sep.side_b), sep.boundary).with_terminals([(tmap[lab], lab) for lab in in_b] + [(v, vlab_b)])
        ka = Kinematics(kin.invariants, ((vlab_a, square),))
        kb = Kinematics(kin.invariants, ((vlab_b, square),))
        rhs_phi = phi(ga, ka) * psi_b + phi(gb, kb) * psi_a
    report.lhs["phi"], report.rhs["phi"] = lhs_phi, rhs_phi
    report.passed = report.lhs == report.rhs
    return report


def check_two_component_law(g: LabeledGraph, kin: Optional[Kinematics] = None) -> Report:
    """Two components with two terminals each: phi = (p1 + p2)^2 * psi_1 * psi_2."""
    kin = kin or Kinematics.from_graph(g)
    comps = g.components()
    if len(comps) != 2:
        raise SymanzikError("graph must have exactly two components")
    tmap = g.terminal_map()
    first = {lab for lab, w in tmap.items() if w in comps[0]}
    psi1 = psi(g.induced(comps[0]).without_terminals())
    psi2 = psi(g.induced(comps[1]).without_terminals())
    rho = momentum_term(kin, first, list(tmap))
    report = Report("two-component", True)
    report.lhs = {"psi": psi(g), "phi": phi(g, kin)}
    report.rhs = {"psi": ZERO, "phi": rho * psi1 * psi2}
    report.passed = report.lhs == report.rhs
    return report


def subdivide(g: LabeledGraph, eid: int) -> Tuple[LabeledGraph, int, int]:
    """Subdivide edge ``eid``; returns the new graph and the two new edge ids."""
    e = g.edge(eid)
    if e.is_loop:
        raise SymanzikError("cannot subdivide a loop")
    w = g.next_vertex_id()
    e1 = g.next_edge_id()
    e2 = e1 + 1
    edges = tuple(f for f in g.edges if f.id != eid) + (Edge(e1, e.u, w), Edge(e2, w, e.v))
    return replace(g, vertices=g.vertices + (w,), edges=edges, massive=g.massive - {eid}), e1, e2


def check_subdivision(g: LabeledGraph, eid: int, kin: Optional[Kinematics] = None) -> Report:
    if eid in g.massive:
        raise SymanzikError(f"edge {eid} is massive")
    if g.edge(eid).is_loop:
        raise SymanzikError("cannot subdivide a loop")
    kin = kin or Kinematics.from_graph(g)
    sub, e1, e2 = subdivide(g, eid)
    both = Poly.var(schwinger(e1)) + Poly.var(schwinger(e2))
    deleted = delete_edge(g, eid)
    report = Report("subdivision", True)
    report.lhs["psi"] = psi(sub)
    try:
        contracted = contract_edge(g, eid)
    except TerminalMergeError:
        raise SymanzikError("edge joins two terminals; contraction is undefined") from None
    report.rhs["psi"] = psi(deleted) * both + psi(contracted)
    report.lhs["phi"] = phi(sub, kin)
    report.rhs["phi"] = phi(deleted, kin) * both + phi(contracted, kin)
    report.passed = report.lhs == report.rhs
    return report
