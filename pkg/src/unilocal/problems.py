"""Problem predicates and brute-force solution oracles.

A Problem bundles a verifier over (Configuration, output vector) with an
exhaustive solution enumerator usable on small graphs.  Output vectors
are dicts keyed by node identity.  All shipped problems are closed under
disjoint union, which the test suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .graph import Configuration

ORACLE_CAP = 10


class OracleCapExceeded(ValueError):
    pass


def _check_cap(c: Configuration, cap=None):
    cap = ORACLE_CAP if cap is None else cap
    if c.graph.n > cap:
        raise OracleCapExceeded(
            f"enumeration refused: {c.graph.n} nodes > cap {cap}")


def _selected(y, nid):
    return y.get(nid) == 1


def check_ruling(c: Configuration, y, alpha: int, beta: int) -> bool:
    """Selected nodes pairwise at distance >= alpha; every node within
    distance beta of a selected one.  Anything but the value 1 counts as
    unselected (garbage tolerance)."""
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be >= 1")
    g = c.graph
    sel = [v for v in range(g.n) if _selected(y, g.ids[v])]
    sel_set = set(sel)
    for v in sel:
        dist = g.distances_from(v)
        for w in sel:
            if w != v and dist.get(w, alpha) < alpha:
                return False
    for v in range(g.n):
        if v in sel_set:
            continue
        dist = g.distances_from(v)
        if not any(w in dist and dist[w] <= beta for w in sel_set):
            return False
    return True


def _mm_label(y, nid):
    val = y.get(nid)
    return val if isinstance(val, int) and val > 0 else 0


def matched_pair(c: Configuration, y, u: int, v: int) -> bool:
    """Nodes u, v (indices) carry the pair's canonical label (the smaller
    endpoint identity) and nobody else around them carries it.  Canonical
    labels cannot collide across disjoint pair sets, which is what makes
    partial matchings mergeable."""
    g = c.graph
    lu = _mm_label(y, g.ids[u])
    if lu == 0 or lu != _mm_label(y, g.ids[v]) or not g.has_edge(u, v):
        return False
    if lu != min(g.ids[u], g.ids[v]):
        return False
    around = (set(g.adj[u]) | set(g.adj[v])) - {u, v}
    return all(_mm_label(y, g.ids[w]) != lu for w in around)


def check_mm(c: Configuration, y) -> bool:
    """Every node is either matched to a neighbor or all of its neighbors
    are matched (to somebody)."""
    g = c.graph

    def is_matched(u):
        return any(matched_pair(c, y, u, v) for v in g.adj[u])

    matched = [is_matched(u) for u in range(g.n)]
    for u in range(g.n):
        if matched[u]:
            continue
        if not g.adj[u]:
            continue
        if not all(matched[v] for v in g.adj[u]):
            return False
    return True


def check_coloring(c: Configuration, y, palette_size=None) -> bool:
    g = c.graph
    for u in range(g.n):
        cu = y.get(g.ids[u])
        if not isinstance(cu, int) or cu < 1:
            return False
        if palette_size is not None and cu > palette_size:
            return False
        for v in g.adj[u]:
            if u < v and cu == y.get(g.ids[v]):
                return False
    return True


def _slc_fields(c: Configuration, nid):
    rec = c.input[nid]
    if "lists" not in rec or "deg_bound" not in rec:
        raise ValueError(f"node {nid}: not a list-coloring input record")
    return rec["lists"], rec["deg_bound"]


def check_slc_instance(c: Configuration) -> bool:
    """Lists over [1, palette(deg_bound)] x [1, deg_bound+1] where every
    color class holds at least deg+1 entries, and the shared degree bound
    covers the true maximum degree."""
    g = c.graph
    bounds = set()
    for u in range(g.n):
        try:
            lists, dhat = _slc_fields(c, g.ids[u])
        except ValueError:
            return False
        bounds.add(dhat)
        if dhat < g.degree(u):
            return False
        classes = {}
        for (k, j) in lists:
            classes.setdefault(k, set()).add(j)
        gmax = c.input[g.ids[u]].get("palette")
        if gmax is None:
            gmax = max(classes, default=0)
        for k in range(1, gmax + 1):
            if len(classes.get(k, ())) < g.degree(u) + 1:
                return False
        if any(not (1 <= k <= gmax and 1 <= j <= dhat + 1)
               for (k, j) in lists):
            return False
    return len(bounds) <= 1


def check_slc(c: Configuration, y) -> bool:
    g = c.graph
    for u in range(g.n):
        lists, _ = _slc_fields(c, g.ids[u])
        cu = y.get(g.ids[u])
        if not (isinstance(cu, tuple) and cu in set(lists)):
            return False
        for v in g.adj[u]:
            if u < v and cu == y.get(g.ids[v]):
                return False
    return True


def _enumerate_binary(c: Configuration, verify, cap=None):
    _check_cap(c, cap)
    g = c.graph
    sols = []
    for bits in product((0, 1), repeat=g.n):
        y = {g.ids[v]: bits[v] for v in range(g.n)}
        if verify(c, y):
            sols.append(y)
    return sols


def _enumerate_matchings(c: Configuration, cap=None):
    _check_cap(c, cap)
    g = c.graph
    edges = list(g.edges())
    sols = []

    def rec(i, used, chosen):
        if i == len(edges):
            y = {nid: 0 for nid in g.ids}
            for (u, v) in chosen:
                lbl = min(g.ids[u], g.ids[v])
                y[g.ids[u]] = lbl
                y[g.ids[v]] = lbl
            if check_mm(c, y):
                sols.append(y)
            return
        rec(i + 1, used, chosen)
        u, v = edges[i]
        if u not in used and v not in used:
            rec(i + 1, used | {u, v}, chosen + [(u, v)])

    rec(0, set(), [])
    return sols


def _enumerate_colorings(c: Configuration, palette_of, verify, cap=None):
    _check_cap(c, cap)
    g = c.graph
    domains = [palette_of(v) for v in range(g.n)]
    sols = []
    for combo in product(*domains):
        y = {g.ids[v]: combo[v] for v in range(g.n)}
        if verify(c, y):
            sols.append(y)
    return sols


@dataclass(frozen=True)
class Problem:
    name: str
    verify: callable
    enumerate_solutions: callable


def ruling_set(alpha: int, beta: int) -> Problem:
    return Problem(
        f"ruling_{alpha}_{beta}",
        lambda c, y: check_ruling(c, y, alpha, beta),
        lambda c, cap=None: _enumerate_binary(
            c, lambda cc, yy: check_ruling(cc, yy, alpha, beta), cap),
    )


MIS = Problem(
    "mis",
    lambda c, y: check_ruling(c, y, 2, 1),
    lambda c, cap=None: _enumerate_binary(
        c, lambda cc, yy: check_ruling(cc, yy, 2, 1), cap),
)

MAXIMAL_MATCHING = Problem("mm", check_mm, _enumerate_matchings)


def deg_plus_one_coloring() -> Problem:
    def verify(c, y):
        g = c.graph
        if not check_coloring(c, y):
            return False
        return all(y[g.ids[v]] <= g.degree(v) + 1 for v in range(g.n))

    def enum(c, cap=None):
        g = c.graph
        return _enumerate_colorings(
            c, lambda v: range(1, g.degree(v) + 2), verify, cap)

    return Problem("deg_plus_one_coloring", verify, enum)


def strong_list_coloring() -> Problem:
    def enum(c, cap=None):
        return _enumerate_colorings(
            c, lambda v: list(dict.fromkeys(
                c.input[c.graph.ids[v]]["lists"])),
            check_slc, cap)

    return Problem("slc", check_slc, enum)
