"""Reduction algorithms: printed replays, non-reducibility, lemmas and search plumbing."""

from __future__ import annotations

import itertools
import os
import random

import pytest

import golden
from helpers import random_multilinear, reducible_along, reduction_property_suite, show
from symred.catalog import complete_bipartite, cycle, k4, w4
from symred.poly import canonical, eval_rational, parse, schwinger
from symred.reduce import (ReductionError, ReductionState, ReductionTimeout, SubsetReducer, bracket, brown_reducible,
                           brown_step, cross_resultant, discriminant, fubini_reducible, fubini_set, initial_set,
                           nontrivial_factors, panzer_reducible, parse_order, reduce, simple_search, simple_step,
                           simply_reducible, split_linear, strip_trivial)
from symred.symanzik import phi, psi

x = schwinger


def _set(texts):
    return sorted(str(canonical(parse(t))) for t in texts)


def _vars(names):
    return [x(int(n[1:])) for n in names]


# ---------------------------------------------------------------- basics

def test_strip_trivial():
    assert strip_trivial([parse("x4+x6"), parse("x3"), parse("1")]) == [parse("x4+x6")]
    assert strip_trivial([]) == []
    assert strip_trivial([parse("x1*x2^2")]) == []


def test_simple_step_first_step_of_k4_psi():
    out = simple_step(initial_set([psi(k4())]), x(1))
    assert sorted(map(str, out)) == _set(golden.K4_REPLAY_SETS[0])


def test_simple_step_with_both_polynomials_contains_pieces_and_cross_term():
    p, q = psi(k4()), phi(k4())
    out = set(simple_step(initial_set([p, q]), x(1)))
    for f in (p, q):
        for piece in split_linear(f, x(1)):
            assert set(nontrivial_factors(piece)) <= out
    cross = cross_resultant(p, q, x(1))
    assert len(nontrivial_factors(cross)) == 1 and nontrivial_factors(cross)[0] in out


def test_simple_step_rejects_quadratic():
    assert simple_step([parse("x1^2 + x2")], x(1)) is None


def test_simply_reducible_examples():
    ok, _ = simply_reducible([parse("x1+x2+x3+x4")], _vars(["x1", "x2", "x3", "x4"]))
    assert ok
    with pytest.raises(ReductionError):
        simply_reducible([psi(k4())], _vars(["x1", "x2"]))


# ------------------------------------------------------- K4 psi replay

def test_k4_psi_replay_matches_printed_sets():
    # the printed order stops once the set is empty; x4 completes the permutation
    ok, trace = simply_reducible([psi(k4())], _vars(golden.K4_REPLAY_ORDER + ("x4",)))
    assert ok
    sets = trace.sets()
    assert len(sets) == len(golden.K4_REPLAY_SETS) + 1 and sets[-1] == ()
    for ours, printed in zip(sets, golden.K4_REPLAY_SETS):
        assert sorted(map(str, ours)) == _set(printed)


def test_k4_psi_replay_square_factor():
    before = initial_set(simple_step(initial_set([psi(k4())]), x(1)))
    square = parse(golden.K4_SQUARE_FACTOR)
    crosses = [cross_resultant(f, g, x(2)) for f, g in itertools.combinations(before, 2)]
    assert any(c == square * square * -1 or c == square * square for c in crosses)
    assert canonical(square) in simple_step(before, x(2))


def test_trace_is_replayable():
    _, trace = simply_reducible([psi(k4())], _vars(golden.K4_REPLAY_ORDER + ("x4",)))
    for step in trace.steps:
        again = simple_step([parse(s) for s in step.input], x(int(step.variable[1:])))
        assert sorted(map(str, again)) == sorted(step.output)


# ------------------------------------------------- non-reducibility of K4, W4

@pytest.mark.parametrize("graph", [k4, w4], ids=["K4", "W4"])
def test_both_polynomials_fail_at_second_step_for_every_pair(graph):
    polys = [psi(graph()), phi(graph())]
    start = initial_set(polys)
    variables = sorted({v for p in polys for v in p.variables() if v.kind == "schwinger"}, key=lambda v: v.index)
    for first, second in itertools.permutations(variables, 2):
        after = simple_step(start, first)
        assert after is not None
        assert simple_step(after, second) is None, (first.name, second.name)


@pytest.mark.parametrize("graph", [k4, w4], ids=["K4", "W4"])
def test_both_polynomials_not_reducible_by_any_algorithm(graph):
    polys = [psi(graph()), phi(graph())]
    assert not simple_search(polys).reducible
    assert not fubini_reducible(polys).reducible
    assert not brown_reducible(polys).reducible
    assert not panzer_reducible(polys).reducible


def test_k4_psi_alone_is_reducible_everywhere():
    polys = [psi(k4())]
    for algo in ("simple", "fubini", "brown", "panzer"):
        v = reduce(polys, algo)
        assert v.reducible and v.order is not None
        assert reducible_along(polys, algo, v.order)


def _disc(g, first, v, extra=None):
    f = cross_resultant(psi(g), phi(g), x(first))
    d = discriminant(f, x(v))
    point = {y: 1 for y in d.variables()}
    point.update({x(i): c for i, c in (extra or {}).items()})
    return eval_rational(d, point)


def test_discriminant_spot_values():
    values = [_disc(k4(), 1, 2), _disc(k4(), 1, 3, {5: 2})]
    values += [_disc(w4(), 1, v) for v in (5, 4, 8, 6)]
    values += [_disc(w4(), 2, v) for v in (1, 4, 5)]
    assert tuple(values) == golden.DISCRIMINANT_POINT_VALUES
    assert set(values) == set(golden.DISCRIMINANT_VALUES)
    assert all(v != 0 for v in values)


# ---------------------------------------------------------------- Fubini

def _after(subset, v):
    return set(simple_step(fubini_set([psi(k4())], _vars(subset)), x(int(v[1:]))))


def test_fubini_pruning_intersection():
    common = _after(["x1", "x3"], "x2") & _after(["x1", "x2"], "x5")
    assert sorted(map(str, common)) == _set(golden.FUBINI_K4_PRUNED)


def test_fubini_pruning_with_third_variable_x3():
    common = _after(["x1", "x3"], "x2") & _after(["x1", "x2"], "x3")
    assert sorted(map(str, common)) == _set(["x4+x5", "x4+x6", "x4+x5+x6", "x4*x5+x4*x6+x5*x6"])


def test_fubini_set_examples():
    polys = [psi(k4())]
    simple12 = simple_step(simple_step(initial_set(polys), x(1)), x(2))
    assert set(fubini_set(polys, _vars(["x1", "x2"]))) == set(simple12)
    s125 = set(fubini_set(polys, _vars(["x1", "x2", "x5"])))
    assert canonical(parse("x4+x6")) in s125
    assert len(s125) < len(simple_step(simple12, x(5)))
    assert set(fubini_set(polys, [])) == set(initial_set(polys))


def test_fubini_set_is_independent_of_variable_order():
    rng = random.Random(3)
    for _ in range(10):
        polys = [random_multilinear(rng, ["x1", "x2", "x3", "x4"], 5) for _ in range(2)]
        vs = [x(i) for i in range(1, 5)]
        subset = rng.sample(vs, 3)
        perm = vs[:]
        rng.shuffle(perm)
        a = SubsetReducer(polys, "fubini", variables=vs).polys_of(subset)
        b = SubsetReducer(polys, "fubini", variables=perm).polys_of(subset)
        assert a == b, show(polys)


def test_fubini_examples():
    assert fubini_reducible([psi(k4())]).reducible
    assert fubini_reducible([psi(cycle(5))]).reducible


# ---------------------------------------------------------------- Brown

def test_initial_compatibility_graph_is_complete():
    st = ReductionState.initial([psi(k4()), phi(k4())])
    assert st.compat == frozenset(itertools.combinations(range(len(st.polys)), 2))


def test_single_polynomial_step_has_no_cross_terms():
    st = brown_step(ReductionState.initial([parse("x1*x2 + x3")]), x(1))
    assert st.polys == () and st.compat == frozenset()
    st = brown_step(ReductionState.initial([parse("x1*x2 + x1*x4 + x3*x5")]), x(1))
    assert st.polys == (canonical(parse("x2+x4")),)
    assert st.compat == frozenset()


def _index_of(state, piece):
    (f,) = nontrivial_factors(piece)
    return state.polys.index(f)


def test_brown_step_separates_contracted_psi_from_deleted_phi():
    g = w4()
    e = x(2)
    st = brown_step(ReductionState.initial([psi(g), phi(g)]), e)
    g_psi, h_psi = split_linear(psi(g), e)
    g_phi, h_phi = split_linear(phi(g), e)
    assert not st.compatible(_index_of(st, h_psi), _index_of(st, g_phi))
    assert st.compatible(_index_of(st, h_phi), _index_of(st, g_phi))


def test_brown_search_examples():
    assert brown_reducible([psi(k4())]).reducible
    v = brown_reducible([psi(cycle(5))])
    assert v.reducible and len(v.order) == 5


# ---------------------------------------------------------------- Panzer

def test_bracket_examples():
    f, g = parse("x1*a + x2"), parse("x3*a + x4")
    a = parse("a").variables()[0]
    assert bracket(f, g, a) == parse("x1*x4 - x3*x2")
    assert bracket(parse("x1*a"), "inf", a) == parse("x1")
    assert bracket(f, "0", a) == parse("x1")
    assert bracket(f, "inf", a) == parse("x2")


def test_panzer_examples():
    assert panzer_reducible([psi(cycle(4))]).reducible
    assert not panzer_reducible([psi(k4()), phi(k4())]).reducible


# ---------------------------------------------------------------- properties

def test_reducibility_lemmas_on_random_sets():
    tally = reduction_property_suite(120, seed=5)
    assert tally["reducible"] > 20 and tally["disjoint"] > 0 and tally["lc identity"] > 0


# ---------------------------------------------------------------- plumbing

def test_parse_order_and_dispatch_errors():
    assert parse_order("x1, x3,x2") == _vars(["x1", "x3", "x2"])
    with pytest.raises(ReductionError):
        reduce([psi(k4())], "nope")


def test_timeout_is_reported_not_a_verdict(tmp_path, monkeypatch):
    monkeypatch.setenv("SYMRED_CACHE_DIR", str(tmp_path))
    polys = [psi(complete_bipartite(3, 4))]
    reducer = SubsetReducer(polys, "brown")
    with pytest.raises(ReductionTimeout):
        reducer.search(timeout=0.5)
    assert os.path.exists(reducer.checkpoint)
    resumed = SubsetReducer(polys, "brown")
    assert resumed.resumed > 0
    assert resumed.memo.keys() >= reducer.memo.keys()


def test_checkpoint_from_other_input_is_rejected(tmp_path):
    path = str(tmp_path / "ck.json")
    SubsetReducer([psi(cycle(4))], "brown", checkpoint=path).search()
    with pytest.raises(ReductionError):
        SubsetReducer([psi(cycle(5))], "brown", checkpoint=path)


def test_minor_closure_on_small_reducible_graphs():
    from symred.graphcore import TerminalMergeError, contract_edge, delete_edge, make_graph

    corpus = [
        make_graph([(0, 1), (1, 2), (2, 3), (3, 0)], terminals=dict(zip("abcd", (0, 1, 2, 3)))),
        make_graph([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], terminals=dict(zip("abcd", (0, 1, 2, 3)))),
        make_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)], terminals=dict(zip("abcd", (0, 1, 3, 4)))),
    ]
    checked = 0
    for g in corpus:
        assert brown_reducible([psi(g), phi(g)]).reducible
        for e in g.edge_ids():
            minors = [delete_edge(g, e)]
            try:
                minors.append(contract_edge(g, e))
            except TerminalMergeError:
                pass
            for h in minors:
                assert brown_reducible([psi(h), phi(h)]).reducible
                checked += 1
    assert checked > 10
