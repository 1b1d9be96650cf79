"""Problem verifiers and brute-force solution oracles."""

import itertools

import networkx as nx
import pytest

from unilocal.graph import Configuration, Graph, all_graphs, generate
from unilocal.problems import (MAXIMAL_MATCHING, MIS, OracleCapExceeded,
                               check_coloring, check_mm, check_ruling,
                               check_slc, check_slc_instance,
                               deg_plus_one_coloring, matched_pair,
                               ruling_set, strong_list_coloring)


def path3():
    return Configuration(Graph([1, 2, 3], [(0, 1), (1, 2)]))


def test_check_ruling_hand_cases():
    c = path3()
    assert check_ruling(c, {1: 1, 2: 0, 3: 1}, 2, 1)
    assert not check_ruling(c, {1: 1, 2: 1, 3: 0}, 2, 1)  # adjacent picks
    assert not check_ruling(c, {1: 1, 2: 0, 3: 0}, 2, 1)  # 3 uncovered
    assert check_ruling(c, {1: 1, 2: 0, 3: 0}, 2, 2)      # but covered at 2
    assert check_ruling(c, {1: 1, 2: "0", 3: 1}, 2, 1)    # garbage = out
    with pytest.raises(ValueError):
        check_ruling(c, {}, 0, 1)


def test_ruling_requires_reachability():
    # two components: each needs its own selected node
    c = Configuration(Graph([1, 2, 3, 4], [(0, 1), (2, 3)]))
    assert not check_ruling(c, {1: 1, 2: 0, 3: 0, 4: 0}, 2, 3)
    assert check_ruling(c, {1: 1, 2: 0, 3: 1, 4: 0}, 2, 1)


def test_mis_enumeration_matches_brute_force():
    for g in all_graphs(4):
        c = Configuration(g)
        gx = nx.Graph()
        gx.add_nodes_from(range(g.n))
        gx.add_edges_from(g.edges())
        oracle = set()
        for r in range(g.n + 1):
            for subset in itertools.combinations(range(g.n), r):
                sub = set(subset)
                if any(gx.has_edge(a, b)
                       for a, b in itertools.combinations(sub, 2)):
                    continue
                if all(set(gx[v]) & sub for v in range(g.n)
                       if v not in sub):
                    oracle.add(frozenset(sub))
        got = {frozenset(v for v in range(g.n) if y[g.ids[v]] == 1)
               for y in MIS.enumerate_solutions(c)}
        assert got == oracle, g


def test_matched_pair_requires_canonical_label():
    c = path3()
    # pair (1,2): canonical label is 1
    assert matched_pair(c, {1: 1, 2: 1, 3: 0}, 0, 1)
    assert not matched_pair(c, {1: 2, 2: 2, 3: 0}, 0, 1)  # wrong label
    assert not matched_pair(c, {1: 1, 2: 1, 3: 1}, 0, 1)  # label reused
    assert not matched_pair(c, {1: 1, 2: 0, 3: 0}, 0, 1)  # one-sided
    assert not matched_pair(c, {1: 1, 2: 1, 3: 0}, 0, 2)  # no edge


def test_check_mm_hand_cases():
    c = path3()
    assert check_mm(c, {1: 1, 2: 1, 3: 0})
    assert check_mm(c, {1: 0, 2: 2, 3: 2})
    assert not check_mm(c, {1: 0, 2: 0, 3: 0})  # edge (1,2) unmatched
    # isolated nodes are vacuously fine
    iso = Configuration(Graph([1, 2, 3], [(0, 1)]))
    assert check_mm(iso, {1: 1, 2: 1, 3: 0})


def test_matching_enumeration_matches_brute_force():
    for g in all_graphs(4):
        c = Configuration(g)
        edges = list(g.edges())
        oracle = set()
        for r in range(len(edges) + 1):
            for combo in itertools.combinations(edges, r):
                nodes = [v for e in combo for v in e]
                if len(set(nodes)) != len(nodes):
                    continue  # not a matching
                covered = set(nodes)
                if any(u not in covered and v not in covered
                       for u, v in edges):
                    continue  # not maximal
                oracle.add(frozenset(combo))
        got = set()
        for y in MAXIMAL_MATCHING.enumerate_solutions(c):
            pairs = frozenset((u, v) for u, v in edges
                              if matched_pair(c, y, u, v))
            got.add(pairs)
        assert got == oracle, g


def test_check_coloring():
    c = path3()
    assert check_coloring(c, {1: 1, 2: 2, 3: 1})
    assert not check_coloring(c, {1: 1, 2: 1, 3: 2})
    assert not check_coloring(c, {1: 1, 2: 2, 3: "0"})
    assert not check_coloring(c, {1: 1, 2: 3, 3: 1}, palette_size=2)


def test_deg_plus_one_coloring_problem():
    pr = deg_plus_one_coloring()
    c = path3()
    sols = pr.enumerate_solutions(c)
    # ends have palette {1,2}, middle {1,2,3}; count by hand: the middle
    # color constrains both ends to the other value(s)
    assert all(pr.verify(c, y) for y in sols)
    assert {1: 1, 2: 2, 3: 1} in sols
    assert {1: 1, 2: 3, 3: 1} in sols
    assert not pr.verify(c, {1: 1, 2: 4, 3: 1})  # above deg+1


def slc_config():
    g = Graph([1, 2, 3], [(0, 1), (1, 2)])
    lists = [(k, j) for k in (1, 2, 3) for j in (1, 2, 3)]
    return Configuration(
        g, {nid: {"id": nid, "deg_bound": 2, "lists": list(lists)}
            for nid in g.ids})


def test_check_slc_instance():
    c = slc_config()
    assert check_slc_instance(c)
    # degree bound below the true maximum degree
    g = c.graph
    bad = Configuration(g, {nid: {"id": nid, "deg_bound": 1,
                                  "lists": [(1, 1), (1, 2), (2, 1), (2, 2)]}
                            for nid in g.ids})
    assert not check_slc_instance(bad)
    # a color class with fewer than deg+1 entries
    small = Configuration(g, {nid: {"id": nid, "deg_bound": 2,
                                    "lists": [(1, 1), (2, 1), (2, 2), (2, 3)],
                                    "palette": 2}
                              for nid in g.ids})
    assert not check_slc_instance(small)


def test_check_slc_solution():
    c = slc_config()
    assert check_slc(c, {1: (1, 1), 2: (2, 1), 3: (1, 1)})
    assert not check_slc(c, {1: (1, 1), 2: (1, 1), 3: (2, 1)})  # conflict
    assert not check_slc(c, {1: (1, 1), 2: (5, 1), 3: (1, 1)})  # off-list
    pr = strong_list_coloring()
    sols = pr.enumerate_solutions(c)
    assert all(pr.verify(c, y) for y in sols)
    assert len(sols) == 9 * 8 * 8  # middle differs from both ends


def test_disjoint_union_solutions_are_componentwise():
    a = Graph([1, 2], [(0, 1)])
    b = Graph([3, 4, 5], [(0, 1), (1, 2)])
    both = Graph([1, 2, 3, 4, 5], [(0, 1), (2, 3), (3, 4)])
    sols_a = MIS.enumerate_solutions(Configuration(a))
    sols_b = MIS.enumerate_solutions(Configuration(b))
    sols = MIS.enumerate_solutions(Configuration(both))
    merged = {tuple(sorted({**ya, **yb}.items()))
              for ya in sols_a for yb in sols_b}
    assert {tuple(sorted(y.items())) for y in sols} == merged


def test_oracle_cap():
    big = Configuration(generate("path", n=11))
    with pytest.raises(OracleCapExceeded):
        MIS.enumerate_solutions(big)
    with pytest.raises(OracleCapExceeded):
        ruling_set(2, 2).enumerate_solutions(big)
    # explicit cap override
    assert MIS.enumerate_solutions(big, cap=11)
