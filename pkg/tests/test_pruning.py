"""Pruning algorithms: certification against the brute-force oracles."""

import pytest

from unilocal.graph import Configuration, Graph, all_graphs, generate
from unilocal.pruning import (PruningAlgorithm, certify_pruning,
                              check_monotone, combine_outputs, prune_mm,
                              prune_ruling, prune_slc, residual_config)
from unilocal.problems import ruling_set


def small_configs(max_n):
    for n in range(1, max_n + 1):
        for g in all_graphs(n):
            yield Configuration(g)


def slc_configs(max_n):
    for n in range(1, max_n + 1):
        for g in all_graphs(n):
            d = max(g.max_degree, 1)
            lists = [(k, j) for k in range(1, d + 2)
                     for j in range(1, d + 2)]
            yield Configuration(g, {nid: {"id": nid, "deg_bound": d,
                                          "lists": list(lists)}
                                    for nid in g.ids})


def test_certify_prune_ruling_beta1_exhaustive():
    report = certify_pruning(prune_ruling(1), small_configs(4))
    assert report["ok"]
    assert report["checked"]["detection"] > 0
    assert report["checked"]["gluing"] > 0


def test_certify_prune_ruling_beta2_exhaustive():
    assert certify_pruning(prune_ruling(2), small_configs(4))["ok"]


def test_certify_prune_mm_exhaustive():
    report = certify_pruning(prune_mm(), small_configs(4))
    assert report["ok"]


def test_certify_prune_slc_exhaustive():
    assert certify_pruning(prune_slc(), slc_configs(3))["ok"]


def test_certify_writes_report(tmp_path):
    path = tmp_path / "report.json"
    certify_pruning(prune_ruling(1), small_configs(2), report_path=path)
    assert path.exists()


def test_certify_sampling_mode():
    report = certify_pruning(prune_mm(), small_configs(4),
                             max_tentatives=5)
    assert report["ok"]


def test_residual_config_patches():
    g = Graph([1, 2, 3], [(0, 1), (1, 2)])
    c = Configuration(g, {nid: {"id": nid, "tag": "a"} for nid in g.ids})
    res = residual_config(c, keep_ids=[1, 3], extra={3: {"tag": "b"}})
    assert sorted(res.graph.ids) == [1, 3]
    assert res.graph.num_edges == 0
    assert res.input[1]["tag"] == "a"
    assert res.input[3]["tag"] == "b"


def test_combine_outputs_prefers_residual_values():
    assert combine_outputs({1: 0, 2: 1}, {1: 1}) == {1: 1, 2: 1}


def test_ruling_prune_keeps_confirmed_and_covered():
    g = generate("path", n=5, seed=0)
    c = Configuration(g)
    pr = prune_ruling(1)
    # select the two path ends (indices 0 and 4)
    y = {nid: 0 for nid in g.ids}
    y[g.ids[0]] = 1
    y[g.ids[4]] = 1
    kept, res = pr.apply(c, y)
    expect = {g.ids[0], g.ids[1], g.ids[3], g.ids[4]}
    assert set(kept) == expect
    assert set(res.graph.ids) == {g.ids[2]}


def test_mm_prune_rejects_label_collisions():
    # two disjoint edges; a non-canonical shared label must not be kept
    g = Graph([1, 2, 3, 4], [(0, 1), (2, 3)])
    c = Configuration(g)
    pr = prune_mm()
    kept, _ = pr.apply(c, {1: 1, 2: 1, 3: 1, 4: 1})
    assert 3 not in kept and 4 not in kept
    kept, _ = pr.apply(c, {1: 1, 2: 1, 3: 3, 4: 3})
    assert set(kept) == {1, 2, 3, 4}


def test_monotonicity_on_growing_paths():
    pr = prune_ruling(1)
    import random
    rng = random.Random(5)
    for n in range(2, 7):
        small = Configuration(Graph(list(range(1, n + 1)),
                                    [(i, i + 1) for i in range(n - 1)]))
        big = Configuration(Graph(list(range(1, n + 2)),
                                  [(i, i + 1) for i in range(n)]))
        for _ in range(20):
            y = {nid: rng.choice([0, 1]) for nid in small.graph.ids}
            assert check_monotone(pr, small, big, y)


def _broken_ruling_pruner():
    """Keeps every selected node without confirming independence."""
    base = prune_ruling(1)

    def bad_apply(c, y):
        g = c.graph
        keep = [u for u in range(g.n) if y.get(g.ids[u]) == 1]
        covered = [u for u in range(g.n)
                   if any(v in keep for v in g.adj[u])]
        kept = {g.ids[u]: (1 if u in keep else 0)
                for u in set(keep) | set(covered)}
        rest = [g.ids[u] for u in range(g.n) if g.ids[u] not in kept]
        return kept, residual_config(c, rest)

    return PruningAlgorithm("prune_ruling_broken", ruling_set(2, 1), bad_apply,
                            base.program_factory, base.declared_rounds)


def test_certification_catches_broken_pruner():
    with pytest.raises(AssertionError):
        certify_pruning(_broken_ruling_pruner(), small_configs(3))
