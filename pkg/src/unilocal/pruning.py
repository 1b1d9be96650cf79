"""Pruning algorithms: salvage the correct part of a tentative output.

A pruning algorithm takes a configuration together with a tentative
output vector (possibly garbage) and selects a node set W on which the
tentative values are kept, returning also a residual input for the
nodes outside W.  Contract, checked by certify():

  * detection: on a correct tentative output, W is everything;
  * gluing: kept values merged with any valid solution of the residual
    instance solve the original instance;
  * converse: if W is everything, the kept values are a valid solution;
  * locality: runs as a constant-round node program.
"""

from __future__ import annotations

import itertools
import json

from .graph import Configuration, Graph, induced_subgraph
from .problems import (MAXIMAL_MATCHING, Problem, check_mm, check_ruling,
                       check_slc, check_slc_instance, matched_pair,
                       ruling_set, strong_list_coloring)


class PruningAlgorithm:
    """Bundle of problem, centralized apply(), and node program."""

    def __init__(self, name: str, problem: Problem, apply,
                 program_factory, declared_rounds: int):
        self.name = name
        self.problem = problem
        self.apply = apply
        self.program_factory = program_factory
        self.declared_rounds = declared_rounds

    def program(self):
        return self.program_factory()


def combine_outputs(kept: dict, residual_solution: dict) -> dict:
    merged = dict(kept)
    merged.update(residual_solution)
    return merged


def residual_config(c: Configuration, keep_ids, extra=None) -> Configuration:
    """Instance induced on the nodes outside W, with optional per-node
    input patches (e.g. shrunk color lists)."""
    g = c.graph
    sub = induced_subgraph(g, [g.index_of(i) for i in keep_ids])
    inp = {nid: dict(c.input[nid]) for nid in sub.ids}
    if extra:
        for nid, patch in extra.items():
            if nid in inp:
                inp[nid].update(patch)
    return Configuration(sub, inp)


# ---------------------------------------------------------------------------
# Ruling sets with alpha = 2: keep confirmed selections and everything
# they already cover.

def _ruling_keep(c: Configuration, y, beta: int):
    g = c.graph
    good = set()
    for u in range(g.n):
        if y.get(g.ids[u]) == 1 and \
                all(y.get(g.ids[v]) != 1 for v in g.adj[u]):
            good.add(u)
    keep = set(good)
    for u in range(g.n):
        if u in good:
            continue
        if any(v in good for v in g.ball(u, beta)):
            keep.add(u)
    return good, keep


def apply_prune_ruling(beta: int):
    def apply(c: Configuration, y):
        g = c.graph
        good, keep = _ruling_keep(c, y, beta)
        kept = {g.ids[u]: (1 if u in good else 0) for u in keep}
        rest = [g.ids[u] for u in range(g.n) if u not in keep]
        return kept, residual_config(c, rest)

    return apply


class _RulingPruneProgram:
    """Round 1: exchange tentative bits to confirm selections.  Rounds
    2..beta+1: flood confirmations beta hops.  Output (w, kept value)."""

    def __init__(self, beta: int):
        self.beta = beta

    def init(self, ctx):
        return {"r": 0, "sel": ctx.input["tentative"] == 1, "good": False,
                "covered": False}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, ctx.input["tentative"], None
        r = state["r"]
        state["r"] = r + 1
        if r == 1:
            state["good"] = state["sel"] and \
                all(m != 1 for m in inbox.values())
            signal = state["good"]
        else:
            state["covered"] = state["covered"] or any(inbox.values())
            signal = state["covered"] or state["good"]
        if r == self.beta + 1:
            w = state["good"] or state["covered"]
            val = 1 if state["good"] else 0
            return state, None, (1 if w else 0, val)
        return state, signal, None


def prune_ruling(beta: int) -> PruningAlgorithm:
    return PruningAlgorithm(
        f"prune_ruling_2_{beta}", ruling_set(2, beta),
        apply_prune_ruling(beta),
        lambda: _RulingPruneProgram(beta), 1 + beta)


# ---------------------------------------------------------------------------
# Maximal matching: keep nodes with a confirmed matched neighbor, or all
# of whose neighbors are confirmed matched.

def apply_prune_mm(c: Configuration, y):
    g = c.graph
    matched = [any(matched_pair(c, y, u, v) for v in g.adj[u])
               for u in range(g.n)]
    keep = set()
    kept = {}
    for u in range(g.n):
        if matched[u]:
            keep.add(u)
            kept[g.ids[u]] = y[g.ids[u]]
        elif all(matched[v] for v in g.adj[u]):
            keep.add(u)
            kept[g.ids[u]] = 0
    rest = [g.ids[u] for u in range(g.n) if u not in keep]
    return kept, residual_config(c, rest)


class _MMPruneProgram:
    """Round 1: exchange labels.  Round 2: exchange label neighborhoods
    to confirm matches.  Round 3: exchange matched flags."""

    def init(self, ctx):
        val = ctx.input["tentative"]
        lbl = val if isinstance(val, int) and val > 0 else 0
        return {"r": 0, "lbl": lbl, "nbrs": {}, "matched": False}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, (ctx.id, state["lbl"]), None
        r = state["r"]
        state["r"] = r + 1
        if r == 1:
            state["nbrs"] = dict(inbox)
            # a dict outbox is port-addressed, so fan the view out by hand
            view = {p: state["nbrs"] for p in range(ctx.degree)}
            return state, view, None
        if r == 2:
            # confirm: a neighbor carries my label, the label is the
            # smaller of our identities, and it appears nowhere else in
            # either neighborhood (in their view exactly once: me)
            lbl = state["lbl"]
            for p, their_view in inbox.items():
                their_id, their_lbl = state["nbrs"][p]
                if lbl == 0 or their_lbl != lbl or \
                        lbl != min(ctx.id, their_id):
                    continue
                mine_ok = all(l != lbl
                              for q, (_i, l) in state["nbrs"].items()
                              if q != p)
                theirs_ok = sum(
                    1 for (_i, l) in their_view.values() if l == lbl) == 1
                if mine_ok and theirs_ok:
                    state["matched"] = True
                    break
            return state, state["matched"], None
        w_match = state["matched"]
        nbrs_matched = all(inbox.values())
        if w_match:
            return state, None, (1, state["lbl"])
        if nbrs_matched:
            return state, None, (1, 0)
        return state, None, (0, None)


def prune_mm() -> PruningAlgorithm:
    return PruningAlgorithm("prune_mm", MAXIMAL_MATCHING, apply_prune_mm,
                            _MMPruneProgram, 3)


# ---------------------------------------------------------------------------
# Strong list coloring: keep nodes whose tentative color is on their list
# and conflict-free; residual lists drop colors taken by kept neighbors.

def apply_prune_slc(c: Configuration, y):
    g = c.graph
    keep = set()
    for u in range(g.n):
        cu = y.get(g.ids[u])
        lists = c.input[g.ids[u]]["lists"]
        if isinstance(cu, tuple) and cu in set(lists) and \
                all(cu != y.get(g.ids[v]) for v in g.adj[u]):
            keep.add(u)
    kept = {g.ids[u]: y[g.ids[u]] for u in keep}
    rest = [g.ids[u] for u in range(g.n) if u not in keep]
    patches = {}
    for u in range(g.n):
        if u in keep:
            continue
        taken = {y[g.ids[v]] for v in g.adj[u] if v in keep}
        if taken:
            lists = [col for col in c.input[g.ids[u]]["lists"]
                     if col not in taken]
            patches[g.ids[u]] = {"lists": lists}
    return kept, residual_config(c, rest, patches)


class _SLCPruneProgram:
    """Round 1: exchange tentative colors.  Round 2: exchange keep flags;
    dropped nodes shrink their lists by kept neighbors' colors."""

    def init(self, ctx):
        return {"r": 0, "col": ctx.input["tentative"], "nbr_cols": {}}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, state["col"], None
        r = state["r"]
        state["r"] = r + 1
        col = state["col"]
        if r == 1:
            state["nbr_cols"] = dict(inbox)
            lists = ctx.input["lists"]
            state["keep"] = (isinstance(col, tuple) and col in set(lists)
                             and all(col != m for m in inbox.values()))
            return state, state["keep"], None
        if state["keep"]:
            return state, None, (1, col)
        taken = {state["nbr_cols"][p] for p, kept in inbox.items() if kept}
        lists = [c for c in ctx.input["lists"] if c not in taken]
        return state, None, (0, {"lists": lists})


def prune_slc() -> PruningAlgorithm:
    return PruningAlgorithm("prune_slc", strong_list_coloring(),
                            apply_prune_slc, _SLCPruneProgram, 2)


# ---------------------------------------------------------------------------
# Certification harness.

def _all_outputs_for(problem: Problem, c: Configuration, values):
    g = c.graph
    for combo in itertools.product(values, repeat=g.n):
        yield {g.ids[v]: combo[v] for v in range(g.n)}


def _tentative_values(name: str, c: Configuration):
    g = c.graph
    if name.startswith("prune_ruling"):
        return [0, 1, "0"]
    if name == "prune_mm":
        return [0, "0"] + sorted({min(g.ids[u], g.ids[v])
                                  for u, v in g.edges()})
    if name == "prune_slc":
        vals = {"0"}
        for nid in g.ids:
            vals.update(c.input[nid]["lists"][:2])
        return sorted(vals, key=repr)
    raise ValueError(name)


def _sampled_outputs(c: Configuration, values, count: int, rng):
    g = c.graph
    for _ in range(count):
        yield {nid: rng.choice(values) for nid in g.ids}


def certify_pruning(pr: PruningAlgorithm, configs, report_path=None,
                    values=None, max_tentatives=None, seed=0) -> dict:
    """Check detection, gluing, converse, and locality of a pruning
    algorithm over small configurations.  Tentative outputs are
    exhaustive over the relevant values by default; ``values`` overrides
    the value set and ``max_tentatives`` switches a configuration to that
    many seeded random assignments when the full product is larger.
    Returns a JSON-ready report; raises AssertionError with a
    counterexample on failure."""
    import random

    from .runtime import run_sync

    configs = list(configs)
    checked = {"detection": 0, "gluing": 0, "converse": 0, "locality": 0}
    for c in configs:
        g = c.graph
        solutions = pr.problem.enumerate_solutions(c)
        for y in solutions:
            kept, _res = pr.apply(c, y)
            assert set(kept) == set(g.ids), \
                f"{pr.name}: detection failed on a valid solution: {y}"
            checked["detection"] += 1
        vals = _tentative_values(pr.name, c) if values is None else values
        if max_tentatives is not None and \
                len(vals) ** g.n > max_tentatives:
            rng = random.Random(f"certify|{pr.name}|{seed}|{g.n}")
            tentatives = _sampled_outputs(c, vals, max_tentatives, rng)
        else:
            tentatives = _all_outputs_for(pr.problem, c, vals)
        for y in tentatives:
            kept, res = pr.apply(c, y)
            if set(kept) == set(g.ids):
                assert pr.problem.verify(c, kept), \
                    f"{pr.name}: converse failed: {y} -> {kept}"
                checked["converse"] += 1
                continue
            for z in pr.problem.enumerate_solutions(res):
                merged = combine_outputs(kept, z)
                assert pr.problem.verify(c, merged), \
                    f"{pr.name}: gluing failed: {y} kept {kept} res {z}"
                checked["gluing"] += 1
            # locality: the node program must reproduce apply()
            inp = {nid: {**c.input[nid], "tentative": y[nid]}
                   for nid in g.ids}
            outs, rep = run_sync(pr.program(), Configuration(g, inp))
            assert rep.rounds_total <= pr.declared_rounds, \
                f"{pr.name}: ran {rep.rounds_total} > {pr.declared_rounds}"
            prog_w = {nid for nid, (w, _v) in outs.items() if w == 1}
            assert prog_w == set(kept), \
                f"{pr.name}: program W {prog_w} != apply W {set(kept)} on {y}"
            for nid in kept:
                assert outs[nid][1] == kept[nid], \
                    f"{pr.name}: kept value mismatch at {nid} on {y}"
            checked["locality"] += 1
    report = {"algorithm": pr.name, "declared_rounds": pr.declared_rounds,
              "configs": len(list(configs)), "checked": checked, "ok": True}
    if report_path:
        with open(report_path, "w") as fh:
            json.dump(report, fh, indent=2)
    return report


def check_monotone(pr: PruningAlgorithm, small: Configuration,
                   big: Configuration, y_small: dict) -> bool:
    """W computed on the small instance, extended by unselected values on
    the larger one, never grows past what the larger instance certifies.
    Used to spot pruning rules that depend on global quantities."""
    kept_small, _ = pr.apply(small, y_small)
    y_big = {nid: y_small.get(nid, "0") for nid in big.graph.ids}
    kept_big, _ = pr.apply(big, y_big)
    common = set(kept_small) & set(kept_big)
    return all(kept_small[nid] == kept_big[nid] for nid in common)
