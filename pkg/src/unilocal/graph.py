"""Immutable simple undirected graphs with unique positive integer identities.

Node indices are dense ints 0..n-1; identities are arbitrary distinct
positive ints.  Derived constructions (induced subgraph, line graph,
clique-product graph, degree layering) preserve or derive identities
deterministically.
"""

from __future__ import annotations

import random
from collections import deque


def pair_id(a: int, b: int) -> int:
    """Cantor pairing of two non-negative ints, shifted to stay positive."""
    s = a + b
    return s * (s + 1) // 2 + b + 1


class Graph:
    """Simple undirected graph, read-only after construction."""

    __slots__ = ("n", "ids", "adj", "_index_of")

    def __init__(self, ids, edges):
        ids = list(ids)
        if len(set(ids)) != len(ids):
            raise ValueError("identities must be pairwise distinct")
        if any(i <= 0 for i in ids):
            raise ValueError("identities must be positive")
        self.n = len(ids)
        self.ids = tuple(ids)
        nbrs = [set() for _ in range(self.n)]
        for u, v in edges:
            if u == v:
                raise ValueError("self-loop")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.adj = tuple(tuple(sorted(s)) for s in nbrs)
        self._index_of = {nid: i for i, nid in enumerate(ids)}

    def index_of(self, node_id: int) -> int:
        return self._index_of[node_id]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @property
    def max_id(self) -> int:
        return max(self.ids, default=0)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def distances_from(self, src: int) -> dict:
        """BFS distance map {node index: hops}, reachable nodes only."""
        dist = {src: 0}
        q = deque([src])
        while q:
            u = q.popleft()
            for w in self.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def ball(self, v: int, r: int) -> set:
        """Indices at distance <= r from v (v included)."""
        return {u for u, d in self.distances_from(v).items() if d <= r}

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.ids == other.ids
            and self.adj == other.adj
        )

    def __hash__(self):
        return hash((self.ids, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


class Configuration:
    """A graph plus one input record per node, keyed by identity.

    Every record carries its node's identity under the key "id".
    """

    __slots__ = ("graph", "input")

    def __init__(self, graph: Graph, input=None):
        self.graph = graph
        if input is None:
            input = {nid: {"id": nid} for nid in graph.ids}
        for nid in graph.ids:
            if nid not in input:
                raise ValueError(f"missing input record for node {nid}")
            if input[nid].get("id") != nid:
                raise ValueError(f"input record of node {nid} has wrong id")
        self.input = {nid: dict(input[nid]) for nid in graph.ids}

    def restricted(self, sub: Graph) -> "Configuration":
        return Configuration(sub, {nid: self.input[nid] for nid in sub.ids})


def induced_subgraph(g: Graph, keep) -> Graph:
    keep = set(keep)
    order = sorted(keep)
    newidx = {old: i for i, old in enumerate(order)}
    edges = [
        (newidx[u], newidx[v])
        for u, v in g.edges()
        if u in keep and v in keep
    ]
    return Graph([g.ids[old] for old in order], edges)


def line_graph(g: Graph):
    """Graph with one node per edge; returns (graph, {line id: endpoint ids}).

    Two line-graph nodes are adjacent iff the underlying edges share an
    endpoint.  Line identities come from pairing the endpoint identities
    (smaller first), so they are deterministic and distinct.
    """
    es = list(g.edges())
    ids = []
    edge_map = {}
    for u, v in es:
        a, b = sorted((g.ids[u], g.ids[v]))
        lid = pair_id(a, b)
        ids.append(lid)
        edge_map[lid] = (a, b)
    ledges = []
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            if set(es[i]) & set(es[j]):
                ledges.append((i, j))
    return Graph(ids, ledges), edge_map


def product_graph(g: Graph):
    """Per-node cliques of size deg+1 joined by index-matched cross edges.

    Returns (graph, {product id: (original id, slot index)}), slots 1-based.
    """
    ids = []
    clique_map = {}
    idx = {}
    for u in range(g.n):
        for i in range(1, g.degree(u) + 2):
            pid = pair_id(g.ids[u], i)
            idx[(u, i)] = len(ids)
            ids.append(pid)
            clique_map[pid] = (g.ids[u], i)
    edges = []
    for u in range(g.n):
        k = g.degree(u) + 1
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                edges.append((idx[(u, i)], idx[(u, j)]))
    for u, v in g.edges():
        for i in range(1, 2 + min(g.degree(u), g.degree(v))):
            edges.append((idx[(u, i)], idx[(v, i)]))
    return Graph(ids, edges), clique_map


def degree_layers(g: Graph, thresholds) -> dict:
    """Partition node indices by degree ranges [D_i, D_{i+1}-1].

    thresholds must start at 1 and strictly increase; it must extend far
    enough to cover the maximum degree.  Degree-0 nodes land in layer 1.
    """
    d = list(thresholds)
    if not d or d[0] != 1 or any(b <= a for a, b in zip(d, d[1:])):
        raise ValueError("thresholds must start at 1 and strictly increase")
    layers: dict = {}
    for v in range(g.n):
        deg = max(g.degree(v), 1)
        layer = None
        for i in range(len(d)):
            hi = d[i + 1] - 1 if i + 1 < len(d) else None
            if deg >= d[i] and (hi is None or deg <= hi):
                layer = i + 1
                break
        layers.setdefault(layer, set()).add(v)
    return layers


def generate(kind: str, n: int = 0, p: float = 0.0, d: int = 0,
             rows: int = 0, cols: int = 0, seed: int = 0) -> Graph:
    """Build a named graph family member with seed-permuted identities."""
    if n < 0 or not (0.0 <= p <= 1.0):
        raise ValueError("invalid generator parameters")
    rng = random.Random(f"gen|{kind}|{n}|{p}|{d}|{rows}|{cols}|{seed}")
    if kind == "grid":
        n = rows * cols
    ids = list(range(1, n + 1))
    rng.shuffle(ids)
    edges = []
    if kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        edges = [(i, (i + 1) % n) for i in range(n)] if n >= 3 else \
            [(i, i + 1) for i in range(n - 1)]
    elif kind == "clique":
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif kind == "grid":
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
    elif kind == "gnp":
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j))
    elif kind == "forest":
        for v in range(1, n):
            if rng.random() < 0.9:
                edges.append((rng.randrange(v), v))
    elif kind == "regular":
        import networkx as nx
        gx = nx.random_regular_graph(d, n, seed=rng.randrange(2**31))
        edges = list(gx.edges())
    else:
        raise ValueError(f"unknown graph kind: {kind}")
    return Graph(ids, edges)


def all_graphs(n: int):
    """Every graph on identities 1..n, one per subset of the possible
    edges.  Meant for exhaustive checks at very small n."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ids = list(range(1, n + 1))
    for mask in range(2 ** len(pairs)):
        yield Graph(ids, [pairs[k] for k in range(len(pairs))
                          if mask >> k & 1])


def write_edgelist(g: Graph, path) -> None:
    """Text interchange format: header "n m", then "id_u id_v" per edge.

    Isolated nodes are recorded as "id 0" lines (identities are positive,
    so 0 is unambiguous).
    """
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.num_edges}\n")
        covered = set()
        for u, v in g.edges():
            covered.update((u, v))
            fh.write(f"{g.ids[u]} {g.ids[v]}\n")
        for u in range(g.n):
            if u not in covered:
                fh.write(f"{g.ids[u]} 0\n")


def read_edgelist(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        n, m = int(header[0]), int(header[1])
        ids = []
        index = {}
        edges = []

        def node(i):
            if i not in index:
                index[i] = len(ids)
                ids.append(i)
            return index[i]

        for line in fh:
            parts = line.split()
            if not parts:
                continue
            a, b = int(parts[0]), int(parts[1])
            if b == 0:
                node(a)
            else:
                edges.append((node(a), node(b)))
    g = Graph(ids, edges)
    if g.n != n or g.num_edges != m:
        raise ValueError("edge-list header disagrees with body")
    return g
