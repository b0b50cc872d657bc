"""Independent oracles and random generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import networkx as nx
import sympy

from symred.graphcore import LabeledGraph, make_graph
from symred.poly import Poly, mono_exponents, parse, to_str

LABELS = "abcd"


# ------------------------------------------------------------- sympy bridge

def to_sympy(p: Poly) -> sympy.Expr:
    out = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
        for v, e in mono_exponents(m).items():
            term *= sympy.Symbol(v.name) ** e
        out += term
    return sympy.expand(out)


def from_sympy(e: sympy.Expr) -> Poly:
    return parse(str(sympy.expand(e)).replace("**", "^"))


def sympy_irreducible_factors(p: Poly) -> List[sympy.Expr]:
    """Non-constant irreducible factors, each normalized to a primitive polynomial with positive leading term."""
    _, facs = sympy.factor_list(to_sympy(p))
    out = []
    for f, _ in facs:
        out.append(sympy.Poly(f, *sorted(f.free_symbols, key=str)).primitive()[1].as_expr())
    return out


# ----------------------------------------------------------- graph oracles

def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 11, loops: bool = True,
                 terminals: Optional[int] = None, connected: bool = True) -> LabeledGraph:
    """Random multigraph on at most ``max_vertices`` vertices."""
    while True:
        n = rng.randint(2, max_vertices)
        m = rng.randint(n - 1, max(n - 1, min(max_edges, n + 4)))
        edges = []
        order = list(range(n))
        rng.shuffle(order)
        if connected:
            for i in range(1, n):
                edges.append((order[i], order[rng.randrange(i)]))
        while len(edges) < m:
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v and not loops:
                continue
            edges.append((u, v))
        g = make_graph(edges, vertices=range(n))
        k = rng.choice([0, 0, 2, 3, 4]) if terminals is None else terminals
        if k > n:
            continue
        if k:
            g = g.with_terminals(dict(zip(LABELS, rng.sample(range(n), k))))
        return g


def psi_matrix_tree(g: LabeledGraph) -> Poly:
    """First Symanzik polynomial from Kirchhoff's determinant with edge weights y_e.

    The tree polynomial sum_T prod_{e in T} y_e is multilinear, so each monomial
    maps to the product of x_e over the complementary edges.
    """
    vs = list(g.vertices)
    idx = {v: i for i, v in enumerate(vs)}
    n = len(vs)
    ys = {e.id: sympy.Symbol(f"y{e.id}") for e in g.edges}
    lap = sympy.zeros(n, n)
    for e in g.edges:
        if e.u == e.v:
            continue
        i, j = idx[e.u], idx[e.v]
        w = ys[e.id]
        lap[i, i] += w
        lap[j, j] += w
        lap[i, j] -= w
        lap[j, i] -= w
    det = sympy.expand(lap[1:, 1:].det(method="berkowitz")) if n > 1 else sympy.Integer(1)
    out = sympy.Integer(0)
    for term in sympy.Add.make_args(det):
        coeff, factors = term.as_coeff_mul()
        inside = {int(str(f)[1:]) for f in factors}
        out += coeff * sympy.Mul(*[sympy.Symbol(f"x{e.id}") for e in g.edges if e.id not in inside])
    return from_sympy(out)


def _poly_from_counts(counts: Counter) -> Poly:
    terms = ["*".join([str(c)] + list(mono)) for mono, c in sorted(counts.items())]
    return parse("+".join(terms)) if terms else Poly()


def _spanning_forest_sets(g: LabeledGraph, size: int, components: int):
    for chosen in itertools.combinations(g.edges, size):
        h = nx.MultiGraph()
        h.add_nodes_from(g.vertices)
        h.add_edges_from((e.u, e.v) for e in chosen)
        if nx.is_forest(h) and nx.number_connected_components(h) == components:
            yield chosen, h


def psi_tree_enumeration(g: LabeledGraph) -> Poly:
    """First Symanzik polynomial by testing every (|V|-1)-edge subset for being a spanning tree."""
    counts: Counter = Counter()
    for tree, _ in _spanning_forest_sets(g, len(g.vertices) - 1, 1):
        inside = {e.id for e in tree}
        counts[tuple(f"x{e.id}" for e in g.edges if e.id not in inside)] += 1
    return _poly_from_counts(counts)


def phi_brute_force(g: LabeledGraph) -> Poly:
    """Second Symanzik polynomial (massless, on-shell, default s/t/u) by edge-subset enumeration."""
    names = {"ab|cd": "s", "ac|bd": "t", "ad|bc": "u"}
    lab = dict(g.terminals)
    counts: Counter = Counter()
    for forest, h in _spanning_forest_sets(g, len(g.vertices) - 2, 2):
        comp = next(iter(nx.connected_components(h)))
        side = "".join(sorted(lab[v] for v in comp if v in lab))
        other = "".join(sorted(set(lab.values()) - set(side)))
        if len(side) != 2 or len(other) != 2:
            continue
        inside = {e.id for e in forest}
        mono = tuple(f"x{e.id}" for e in g.edges if e.id not in inside)
        counts[(names["|".join(sorted([side, other]))],) + mono] += 1
    return _poly_from_counts(counts)


def brute_force_minor(g: LabeledGraph, pattern_vertices: Sequence, pattern_edges: Sequence,
                      fixed: Optional[Dict] = None) -> bool:
    """Exhaustive branch-set assignment; ``fixed`` maps graph vertices to pattern vertices."""
    gx = nx.Graph()
    gx.add_nodes_from(g.vertices)
    gx.add_edges_from((e.u, e.v) for e in g.edges if e.u != e.v)
    vs = list(gx.nodes)
    hs = list(pattern_vertices)
    for assign in itertools.product(range(len(hs) + 1), repeat=len(vs)):
        if fixed and any(assign[vs.index(gv)] != hs.index(hv) for gv, hv in fixed.items()):
            continue
        branch = [[vs[i] for i in range(len(vs)) if assign[i] == k] for k in range(len(hs))]
        if any(not b or not nx.is_connected(gx.subgraph(b)) for b in branch):
            continue
        if all(any(gx.has_edge(x, y) for x in branch[hs.index(a)] for y in branch[hs.index(c)])
               for a, c in pattern_edges):
            return True
    return False


def brute_force_rooted(g: LabeledGraph, spec) -> bool:
    roots = g.terminal_map()
    return any(brute_force_minor(g, spec.pattern.vertices, spec.pattern.edges,
                                 {roots[lab]: hv for lab, hv in placement})
               for placement in spec.placements)


# ------------------------------------------------------ polynomial samples

def random_multilinear(rng: random.Random, variables: Sequence[str], max_terms: int = 4) -> Poly:
    """Random multilinear polynomial with small integer coefficients."""
    while True:
        terms = []
        for _ in range(rng.randint(2, max_terms)):
            k = rng.randint(1, min(3, len(variables)))
            mono = "*".join(sorted(rng.sample(list(variables), k)))
            terms.append(f"{rng.choice([1, 1, 1, 2, -1])}*{mono}")
        p = parse("+".join(terms).replace("+-", "-"))
        if len(p.variables()) >= 2:
            return p


def show(polys) -> List[str]:
    return sorted(to_str(p) for p in polys)


# ------------------------------------------------------ identity suite

def disjoint_union(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    base = g.next_vertex_id()
    rename = {v: base + i for i, v in enumerate(h.vertices)}
    edges = [(e.u, e.v) for e in g.edges] + [(rename[e.u], rename[e.v]) for e in h.edges]
    out = make_graph(edges, vertices=list(g.vertices) + list(rename.values()))
    return out.with_terminals([(v, lab) for v, lab in g.terminals] + [(rename[v], lab) for v, lab in h.terminals])


def identity_suite(count: int, seed: int = 0, max_vertices: int = 8) -> Counter:
    """Run every Symanzik identity on ``count`` random graphs.

    Each left-hand side is also compared with the brute-force enumeration
    oracles, so an identity cannot pass on a wrong polynomial.  Returns a
    tally of checks by name; failures raise AssertionError.
    """
    from symred.graphcore import TerminalMergeError, contract_edge, enumerate_separations
    from symred.symanzik import (SymanzikError, check_deletion_contraction, check_loop_law,
                                 check_one_separation_factorization, check_subdivision,
                                 check_two_component_law, subdivide)

    rng = random.Random(seed)
    tally: Counter = Counter()

    def verify(report, g, what):
        assert report.passed, (what, report.as_dict())
        assert report.lhs["psi"] == psi_tree_enumeration(g), what
        if "phi" in report.lhs and not g.massive:
            assert report.lhs["phi"] == phi_brute_force(g), what
        tally[what] += 1

    for i in range(count):
        g = random_graph(rng, max_vertices=max_vertices, terminals=rng.choice([0, 4]))
        if len(g.vertices) < 4 and g.terminals:
            g = g.without_terminals()
        plain = [e.id for e in g.edges if not e.is_loop]
        loops = [e.id for e in g.edges if e.is_loop]
        if plain:
            e = rng.choice(plain)
            verify(check_deletion_contraction(g, e), g, "deletion-contraction")
            try:
                contract_edge(g, e)
                verify(check_subdivision(g, e), subdivide(g, e)[0], "subdivision")
            except TerminalMergeError:
                pass
        if loops:
            verify(check_loop_law(g, rng.choice(loops)), g, "loop")
        seps = enumerate_separations(g, 1, exact=True)
        if seps:
            try:
                verify(check_one_separation_factorization(g, rng.choice(seps)), g, "one-separation")
            except SymanzikError:
                tally["one-separation: not factorizable"] += 1
        if i % 4 == 0:
            n1 = rng.randint(2, max(2, max_vertices // 2))
            a = random_graph(rng, max_vertices=n1, max_edges=6, terminals=2)
            b = random_graph(rng, max_vertices=max(2, max_vertices - len(a.vertices)), max_edges=6, terminals=0)
            labs = rng.sample(LABELS, 4)
            a = a.with_terminals(dict(zip(labs[:2], [v for v, _ in a.terminals])))
            b = b.with_terminals(dict(zip(labs[2:], rng.sample(list(b.vertices), 2))))
            u = disjoint_union(a, b)
            verify(check_two_component_law(u), u, "two-component")
    return tally


# ------------------------------------------------- reduction properties

ALGORITHMS = ("simple", "fubini", "brown", "panzer")


def reducible_along(polys, algorithm: str, order) -> bool:
    """Reducibility along a fixed order; variables absent from ``polys`` are eliminated as no-ops."""
    from symred.reduce import ReductionState, SubsetReducer, initial_set, panzer_step, simple_step

    order = list(order)
    if algorithm == "simple":
        cur = initial_set(polys)
        for v in order:
            cur = simple_step(cur, v)
            if cur is None:
                return False
        return True
    if algorithm == "panzer":
        st = ReductionState.initial(polys)
        for v in order:
            st = panzer_step(st, v)
            if st is None:
                return False
        return True
    trace = SubsetReducer(polys, algorithm, variables=order).trace(order)
    return len(trace.steps) == len(order) and all(s.linear for s in trace.steps)


def _lc_pair_identity(f1: Poly, f2: Poly, a1, al) -> bool:
    from symred.poly import coefficients_in, eval_zero, partial

    def lc(f):
        cs = coefficients_in(f, al)
        return cs[-1] if cs else f

    left = partial(lc(f1), a1) * eval_zero(lc(f2), a1) - partial(lc(f2), a1) * eval_zero(lc(f1), a1)
    right = lc(partial(f1, a1) * eval_zero(f2, a1) - partial(f2, a1) * eval_zero(f1, a1))
    return not left.terms or left == right


def reduction_property_suite(count: int, seed: int = 0) -> Counter:
    """Randomized reducibility lemmas on sets of at most 4 polynomials in at most 5 variables.

    Every implication is checked along the same fixed order; failures raise
    AssertionError.  Returns a tally of how often each premise held.
    """
    from symred.poly import coefficients_in, eval_zero, schwinger
    from symred.reduce import brown_reducible, fubini_reducible, panzer_reducible, simple_search

    rng = random.Random(seed)
    tally: Counter = Counter()
    names = [f"x{i}" for i in range(1, 6)]
    searches = {"simple": simple_search, "fubini": fubini_reducible, "brown": brown_reducible,
                "panzer": panzer_reducible}
    for _ in range(count):
        nv = rng.randint(3, 5)
        vs = names[:nv]
        polys = [random_multilinear(rng, vs, rng.choice([3, 6])) for _ in range(rng.randint(1, 4))]
        order = [schwinger(int(v[1:])) for v in vs]
        rng.shuffle(order)
        verdict = {a: reducible_along(polys, a, order) for a in ALGORITHMS}
        # containment of the algorithm hierarchy
        if verdict["simple"]:
            assert verdict["fubini"], show(polys)
        if verdict["fubini"]:
            assert verdict["brown"], show(polys)
        tally["reducible"] += verdict["brown"]
        # subset lemma
        sub = rng.sample(polys, rng.randint(1, len(polys)))
        for a in ALGORITHMS:
            if verdict[a]:
                assert reducible_along(sub, a, order), ("subset", a, show(polys), show(sub))
                tally["subset " + a] += 1
        # splitting a product into its factors
        if len(polys) >= 2:
            p, q = rng.sample(polys, 2)
            merged = [r for r in polys if r is not p and r is not q] + [p * q]
            if all(coefficients_in(m, order[0])[2:] == [] for m in merged):
                for a in ALGORITHMS:
                    assert reducible_along(merged, a, order) == verdict[a], ("split", a, show(polys))
                tally["split"] += 1
        # evaluation and leading-coefficient closure
        v = rng.choice(order)
        evaluated = [eval_zero(p, v) for p in polys]
        leading = [coefficients_in(p, v)[-1] for p in polys]
        for a in ("simple", "fubini", "brown"):
            if verdict[a]:
                assert reducible_along(evaluated, a, order), ("evaluation", a, v.name, show(polys))
                assert reducible_along(leading, a, order), ("leading", a, v.name, show(polys))
                tally["closure " + a] += 1
        # the case split behind leading-coefficient closure, on linear pairs
        a1, al = rng.sample(order, 2)
        lin = [p for p in polys if coefficients_in(p, a1)[2:] == []]
        if len(lin) >= 2:
            assert _lc_pair_identity(lin[0], lin[1], a1, al), show(lin[:2])
            tally["lc identity"] += 1
    # variable-disjoint unions, by full search
    for _ in range(max(1, count // 8)):
        left = [random_multilinear(rng, ["x1", "x2", "x3"], rng.choice([3, 5])) for _ in range(rng.randint(1, 2))]
        right = [random_multilinear(rng, ["x4", "x5"], 3) for _ in range(rng.randint(1, 2))]
        for a, search in searches.items():
            both = search(left + right).reducible
            assert both == (search(left).reducible and search(right).reducible), ("disjoint", a, show(left + right))
        tally["disjoint"] += 1
    return tally
