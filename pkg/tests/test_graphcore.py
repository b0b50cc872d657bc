"""Graph kernel: schema, minors of graphs, spanning structures, separations."""

from __future__ import annotations

import itertools
import json
import random

import networkx as nx
import pytest

from helpers import _spanning_forest_sets, random_graph
from symred.catalog import class_a, complete, complete_bipartite, cycle, k4, w4, wheel
from symred.graphcore import (GraphError, TerminalMergeError, connectivity, contract_edge, delete_edge,
                              enumerate_separations, from_json, is_isomorphic, is_separation, make_graph,
                              parse_dsl, spanning_2forests, spanning_trees, split_vertex, to_json)


def test_json_round_trip():
    g = w4().with_masses([2])
    h = from_json(json.dumps(to_json(g)))
    assert h == g


@pytest.mark.parametrize("doc, where", [
    ("{", "line 1"),
    ('{"vertices": []}', "edges"),
    ('{"edges": [{"id": 1, "u": 0}]}', "edges[0]"),
    ('{"edges": [{"id": "x", "u": 0, "v": 1}]}', "edges[0].id"),
    ('{"edges": [{"id": 1, "u": 0, "v": 1, "mass": 3}]}', "edges[0].mass"),
    ('{"edges": [{"id": 1, "u": 0, "v": 1}], "terminals": [{"vertex": 0}]}', "terminals[0]"),
])
def test_schema_errors_name_the_field(doc, where):
    with pytest.raises(GraphError, match=where.replace("[", r"\[").replace("]", r"\]")):
        from_json(doc)


def test_dsl():
    g = parse_dsl("edge 0 1\nedge 1 2 mass\n# comment\nterminal 0 a\nvertex 7\n")
    assert len(g.edges) == 2 and 7 in g.vertices
    assert g.massive == frozenset({2})
    assert g.terminal_map() == {"a": 0}
    with pytest.raises(GraphError, match="line 1"):
        parse_dsl("edge 0")


def test_delete_examples():
    c3 = cycle(3)
    p = delete_edge(c3, 1)
    assert nx.is_isomorphic(p.to_networkx(), nx.path_graph(3))
    assert len(delete_edge(complete(4), 1).edges) == 5
    loop = make_graph([(0, 1), (1, 1)])
    assert delete_edge(loop, 2).vertices == loop.vertices


def test_contract_examples():
    c3 = contract_edge(cycle(3), 1)
    assert len(c3.vertices) == 2 and len(c3.edges) == 2
    k = contract_edge(complete(4), 1)
    assert len(k.vertices) == 3 and len(k.edges) == 5
    assert len(k.simple_edges()) == 3
    g = make_graph([(0, 1), (1, 2)], terminals={"a": 1})
    h = contract_edge(g, 1)
    assert h.terminal_map() == {"a": 0}
    with pytest.raises(TerminalMergeError):
        contract_edge(k4(), 1)
    with pytest.raises(GraphError):
        contract_edge(make_graph([(0, 0)]), 1)


def test_deletion_and_contraction_commute():
    rng = random.Random(3)
    for _ in range(60):
        g = random_graph(rng, terminals=0)
        ids = [e.id for e in g.edges if not e.is_loop]
        if len(ids) < 2:
            continue
        e, f = rng.sample(ids, 2)
        a = delete_edge(contract_edge(g, f), e)
        b = contract_edge(delete_edge(g, e), f)
        assert a == b


@pytest.mark.parametrize("g, trees", [(cycle(5), 5), (cycle(3), 3), (complete(4), 16), (w4(False), 45)])
def test_spanning_tree_counts(g, trees):
    assert sum(1 for _ in spanning_trees(g)) == trees


def test_spanning_tree_count_matches_kirchhoff():
    rng = random.Random(5)
    for _ in range(60):
        g = random_graph(rng, terminals=0)
        mg = nx.MultiGraph()
        mg.add_nodes_from(g.vertices)
        mg.add_edges_from((e.u, e.v) for e in g.edges if not e.is_loop)
        expected = round(nx.number_of_spanning_trees(mg)) if len(g.vertices) > 1 else 1
        assert sum(1 for _ in spanning_trees(g)) == expected


def test_two_forest_examples():
    k3 = list(spanning_2forests(complete(3)))
    assert len(k3) == 3 and all(len(f.edges) == 1 for f in k3)
    assert len(list(spanning_2forests(make_graph([(0, 1)])))) == 1
    # every 2-edge subset of K4 is a forest with two components
    assert len(list(spanning_2forests(complete(4)))) == 15


def test_two_forests_match_brute_force():
    rng = random.Random(7)
    for _ in range(60):
        g = random_graph(rng, max_vertices=6, terminals=0)
        ours = {f.tree_a | f.tree_b for f in spanning_2forests(g)}
        assert len(ours) == len(list(spanning_2forests(g)))
        brute = {frozenset(e.id for e in chosen) for chosen, _ in _spanning_forest_sets(g, len(g.vertices) - 2, 2)}
        assert ours == brute


def test_connectivity_examples():
    assert connectivity(complete(4)) == 3
    assert connectivity(cycle(6)) == 2
    seps = enumerate_separations(class_a(), 2, exact=True)
    assert any(s.boundary == frozenset("de") for s in seps)


def _brute_separations(g, k):
    verts = list(g.vertices)
    adj = g.adjacency()
    found = set()
    for r in range(k + 1):
        for boundary in itertools.combinations(verts, r):
            rest = [v for v in verts if v not in boundary]
            for mask in range(1, 2 ** len(rest) - 1):
                a = {rest[i] for i in range(len(rest)) if mask >> i & 1}
                b = set(rest) - a
                if all(not (adj[v] & b) for v in a):
                    found.add(frozenset((frozenset(a | set(boundary)), frozenset(b | set(boundary)))))
    return found


def test_separations_agree_with_brute_force():
    rng = random.Random(9)
    for _ in range(40):
        g = random_graph(rng, max_vertices=7, terminals=0)
        for k in (1, 2):
            ours = enumerate_separations(g, k)
            assert all(is_separation(g, s) for s in ours)
            assert {frozenset((s.side_a, s.side_b)) for s in ours} == _brute_separations(g, k)


def test_isomorphism_examples():
    c4 = cycle(4)
    relabeled = make_graph([(10, 12), (12, 11), (11, 13), (13, 10)])
    assert is_isomorphic(c4, relabeled)
    assert is_isomorphic(complete(4), wheel(3))
    assert not is_isomorphic(complete_bipartite(2, 3), cycle(5))


def test_split_vertex_examples():
    g = split_vertex(complete(6), 0, [1, 2, 3])
    assert len(g.vertices) == 7
    gx = g.to_networkx()
    # seven vertices, so a K3,4 minor must be a K3,4 subgraph
    assert any(all(gx.has_edge(a, b) for a in side for b in set(gx) - set(side))
               for side in itertools.combinations(gx, 3))
    with pytest.raises(GraphError):
        split_vertex(complete(6), 0, [1])
    w = split_vertex(w4(False), 0, [1, 2])
    assert len(w.vertices) == 6 and connectivity(w) == 3
