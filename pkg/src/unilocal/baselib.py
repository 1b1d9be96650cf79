"""Concrete base algorithms feeding the transformers.

Deterministic chain: iterated polynomial color reduction from the
identity coloring (guessing an identity bound and a degree bound), then
an MIS extracted by color order.  Randomized: truncated random-value
MIS (guessing a node-count bound).  Derived-graph simulations turn MIS
bases into maximal matching (line graph) and degree-plus-one coloring
(clique-product graph).  The layered pipeline composes all of it into a
uniform coloring algorithm whose palette depends only on the maximum
degree.
"""

from __future__ import annotations

import math
from functools import lru_cache

from sympy import nextprime

from .bounds import PARAM_CAP, AscendingFn, BoundFn, log_star
from .graph import pair_id
from .runtime import NodeCtx, PhaseMachine, Stop, compose, reseat_seed, restrict
from .transformer import NonUniformAlgorithm, uniformize_det

# Truncation factor for the random-value MIS; set by scripts/calibrate_luby.py
# (smallest integer giving >= 0.5 success on all calibration sizes).
LUBY_KAPPA = 1


# ---------------------------------------------------------------------------
# Polynomial color reduction.

def _ceil_pow_reaches(q: int, c: int) -> int:
    """Smallest t with q**t >= c."""
    t, v = 0, 1
    while v < c:
        v *= q
        t += 1
    return t


@lru_cache(maxsize=None)
def reduction_params(c: int, deg_bound: int):
    """Pick (d, q): the smallest polynomial degree d >= 1 whose prime
    q = nextprime(deg_bound * d) satisfies q**(d+1) >= c, so colors in
    [1, c] encode as degree-d polynomials over GF(q) and an evaluation
    point avoiding all <= deg_bound neighbors exists (q > deg_bound * d)."""
    deg_bound = max(deg_bound, 1)
    d = 1
    while True:
        q = int(nextprime(deg_bound * d))
        if q ** (d + 1) >= c:
            return d, q
        d += 1


@lru_cache(maxsize=None)
def palette_chain(m_guess: int, deg_bound: int):
    """Strictly decreasing palette sizes from m_guess down to the stable
    region; returns (steps, final_palette) with steps = [(c, d, q), ...]."""
    c = max(int(m_guess), 1)
    steps = []
    while True:
        d, q = reduction_params(c, deg_bound)
        if q * q >= c:
            return tuple(steps), c
        steps.append((c, d, q))
        c = q * q


@lru_cache(maxsize=None)
def stable_palette(deg_bound: int) -> int:
    """Fixpoint palette of the reduction chain for a degree bound."""
    return palette_chain(PARAM_CAP, deg_bound)[1]


@lru_cache(maxsize=None)
def palette_envelope(deg_bound: int) -> int:
    """Non-decreasing upper envelope of stable_palette: running maximum
    over powers of two up to the next power covering deg_bound."""
    top = max(deg_bound, 1).bit_length()
    if 2 ** (top - 1) >= max(deg_bound, 1):
        top -= 1
    return max(stable_palette(2 ** j) for j in range(top + 2))


def deg_round_bound() -> AscendingFn:
    """Declared rounds charged to the degree guess: color-order MIS
    selection takes at most twice the palette plus slack."""
    return AscendingFn("deg_rounds",
                       lambda x: 2 * palette_envelope(x) + 16)


def id_round_bound() -> AscendingFn:
    """Declared rounds charged to the identity-bound guess: the reduction
    chain shortens the palette iterated-logarithmically."""
    return AscendingFn("chain_rounds", lambda x: 2 * (log_star(x) + 4))


def _poly_coeffs(color: int, d: int, q: int):
    v = (color - 1) % (q ** (d + 1))
    coeffs = []
    for _ in range(d + 1):
        coeffs.append(v % q)
        v //= q
    return coeffs


def _poly_eval(coeffs, a: int, q: int) -> int:
    acc = 0
    for co in reversed(coeffs):
        acc = (acc * a + co) % q
    return acc


def reduce_color(color: int, nbr_colors, d: int, q: int) -> int:
    """One reduction step: encode the color as a polynomial, pick the
    smallest evaluation point disagreeing with every neighbor, output
    point * q + value + 1 in [1, q*q]."""
    mine = _poly_coeffs(color, d, q)
    others = [_poly_coeffs(nc, d, q) for nc in nbr_colors
              if isinstance(nc, int) and nc != color]
    for a in range(q):
        val = _poly_eval(mine, a, q)
        if all(_poly_eval(oc, a, q) != val for oc in others):
            return a * q + val + 1
    return _poly_eval(mine, 0, q) + 1  # unreachable under good guesses


class ChainColoring:
    """Iterates reduce_color from an initial coloring (node identities by
    default, or input key "init_color") for the precomputed chain of the
    guessed (identity bound, degree bound).  One round per step; all
    nodes share the chain, so they finish together."""

    def __init__(self, m_guess: int, deg_guess=None):
        self.m_guess = m_guess
        self.deg_guess = deg_guess

    def _chain(self, ctx):
        dtil = self.deg_guess
        if dtil is None:
            dtil = ctx.input.get("deg_bound", ctx.degree)
        return palette_chain(self.m_guess, max(int(dtil), 1))[0]

    def init(self, ctx):
        color = ctx.input.get("init_color", ctx.id)
        return {"r": 0, "color": color, "steps": self._chain(ctx)}

    def step(self, state, ctx, inbox):
        steps = state["steps"]
        if inbox is None:
            state["r"] = 1
            if not steps:
                return state, None, state["color"]
            return state, state["color"], None
        r = state["r"]
        state["r"] = r + 1
        _c, d, q = steps[r - 1]
        state["color"] = reduce_color(state["color"], inbox.values(), d, q)
        if r == len(steps):
            return state, None, state["color"]
        return state, state["color"], None


class ColorOrderMIS:
    """MIS selection from any integer labeling: a node joins once every
    live neighbor with a smaller (label, identity) pair has declined,
    and declines once a neighbor joins.  The (label, identity) order is
    total, so this terminates with a valid MIS even if the labeling is
    garbage; rounds track the number of distinct labels when it is a
    proper coloring."""

    def __init__(self, use_id: bool = False):
        self.use_id = use_id

    def _label(self, ctx):
        if self.use_id:
            return ctx.id
        val = ctx.input.get("prev_output")
        return val if isinstance(val, int) else 0

    def init(self, ctx):
        return {"r": 0, "labels": None, "done_ports": set()}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, ("lbl", self._label(ctx), ctx.id), None
        state["r"] += 1
        joined_nbr = False
        for p, msg in inbox.items():
            if msg[0] == "lbl":
                if state["labels"] is None:
                    state["labels"] = {}
                state["labels"][p] = (msg[1], msg[2])
            elif msg[0] == "in":
                joined_nbr = True
            elif msg[0] == "out":
                state["done_ports"].add(p)
        if joined_nbr:
            return state, ("out",), 0
        labels = state["labels"] or {}
        mine = (self._label(ctx), ctx.id)
        smaller = [p for p, lab in labels.items() if lab < mine]
        if all(p in state["done_ports"] for p in smaller):
            return state, ("in",), 1
        return state, None, None


def make_coloring_mis(deg_guess: int, m_guess: int):
    """Coloring chain followed by color-order MIS selection."""
    return compose([(ChainColoring(m_guess, deg_guess), "color"),
                    (ColorOrderMIS(), "select")])


def coloring_mis_base() -> NonUniformAlgorithm:
    """Deterministic MIS base guessing (degree bound, identity bound)."""
    def factory(vec):
        dtil, mtil = vec
        return make_coloring_mis(dtil, mtil)

    bound = BoundFn("add", [deg_round_bound(), id_round_bound()])
    return NonUniformAlgorithm("coloring_mis", ("deg", "m"), factory, bound)


def coloring_base() -> NonUniformAlgorithm:
    """Deterministic coloring base (no MIS stage); palette is the stable
    value of the guessed chain."""
    def factory(vec):
        dtil, mtil = vec
        return ChainColoring(mtil, dtil)

    bound = BoundFn("add", [AscendingFn(
        "deg_slack", lambda x: 8), id_round_bound()])
    return NonUniformAlgorithm("chain_coloring", ("deg", "m"), factory, bound)


# ---------------------------------------------------------------------------
# Truncated random-value MIS.

class RandomValueMIS:
    """Repeated rounds of: draw a random value; strict local minima of
    (value, identity) join; neighbors of joiners decline.  Two rounds per
    iteration.  Runs until decided; truncate from outside."""

    def init(self, ctx):
        return {"phase": "cmp", "mine": None}

    def _draw(self, ctx):
        return (ctx.rng.random(), ctx.id)

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["mine"] = self._draw(ctx)
            return state, ("val",) + state["mine"], None
        if any(m[0] == "in" for m in inbox.values()):
            return state, None, 0
        if state["phase"] == "cmp":
            vals = [(m[1], m[2]) for m in inbox.values() if m[0] == "val"]
            if all(state["mine"] < v for v in vals):
                return state, ("in",), 1
            state["phase"] = "val"
            return state, None, None
        state["phase"] = "cmp"
        state["mine"] = self._draw(ctx)
        return state, ("val",) + state["mine"], None


def luby_budget(n_guess: int, kappa: int = None) -> int:
    kappa = LUBY_KAPPA if kappa is None else kappa
    return kappa * math.ceil(math.log2(n_guess)) if n_guess > 1 else 0


def random_mis_base(kappa: int = None) -> NonUniformAlgorithm:
    """Weak Monte-Carlo MIS base guessing a node-count bound: random-value
    rounds truncated at kappa * ceil(log2 n-guess); undecided nodes emit
    the default output."""
    k = LUBY_KAPPA if kappa is None else kappa

    def factory(vec):
        (ntil,) = vec
        return restrict(RandomValueMIS(), luby_budget(ntil, k))

    bound = BoundFn("add", [AscendingFn("trunc", lambda x: luby_budget(x, k))])
    return NonUniformAlgorithm("random_mis", ("n",), factory, bound,
                               flavor="wmc", rho=0.5)


# ---------------------------------------------------------------------------
# Line-graph simulation: maximal matching from an MIS base.

class LineGraphMIS:
    """Each node plays the line-graph vertices of its incident edges whose
    smaller endpoint it is.  Two real rounds per simulated round: owners
    send, shared endpoints relay.  A selected line vertex becomes a
    matched pair labeled by its smaller endpoint identity."""

    def __init__(self, inner):
        self.inner = inner

    def init(self, ctx):
        return {"r": 0, "nbr": {}, "eid": {}, "owned": {}, "vn": {},
                "inbuf": {}, "dec": {}, "incident": set(), "stage": {}}

    def _push(self, outbox, port, item):
        outbox.setdefault(port, []).append(item)

    def _wake_virtuals(self, state, ctx, inc_lists):
        mine = set(state["eid"].values())
        for p, nid in state["nbr"].items():
            vid = state["eid"][p]
            if ctx.id > nid:
                continue  # the other endpoint owns this edge
            theirs = set(inc_lists[p])
            state["vn"][vid] = sorted((mine | theirs) - {vid})
            vctx = NodeCtx({"id": vid}, vid, len(state["vn"][vid]),
                           reseat_seed(ctx.seed_key, vid))
            st = self.inner.init(vctx)
            st, outbox, out = self.inner.step(st, vctx, None)
            state["owned"][vid] = [vctx, st]
            self._route(state, ctx, vid, outbox, out)

    def _route(self, state, ctx, vid, outbox, out):
        """Queue a virtual node's outbox for the next send round and
        record its decision."""
        vn = state["vn"][vid]
        if outbox is not None:
            if not isinstance(outbox, dict):
                outbox = {i: outbox for i in range(len(vn))}
            for vp, msg in outbox.items():
                state["stage"].setdefault(vid, []).append((vn[vp], msg))
        if out is not None and vid not in state["dec"]:
            state["dec"][vid] = 1 if out == 1 else 0
            del state["owned"][vid]

    def _flush(self, state, ctx, outbox):
        """Emit staged virtual messages: direct to a line-neighbor owned
        through my endpoint, or relayed via the opposite endpoint."""
        port_of = {nid: p for p, nid in state["nbr"].items()}
        for vid, items in state["stage"].items():
            a, b = _vid_endpoints(state, vid)
            other = b if ctx.id == a else a
            for tgt, msg in items:
                ta, tb = _vid_endpoints(state, tgt)
                if ctx.id in (ta, tb):  # shares my endpoint
                    owner = min(ta, tb)
                    if owner == ctx.id:
                        self._deliver(state, tgt, vid, msg)
                    else:
                        self._push(outbox, port_of[owner],
                                   ("d", tgt, vid, msg))
                else:  # shares the opposite endpoint: relay
                    self._push(outbox, port_of[other],
                               ("rl", tgt, vid, msg))
        state["stage"] = {}
        for vid, sel in state["new_dec"]:
            a, b = _vid_endpoints(state, vid)
            other = b if ctx.id == a else a
            self._push(outbox, port_of[other], ("dec", vid, sel))
        state["new_dec"] = []

    def _deliver(self, state, tgt, src, msg):
        if tgt in state["owned"]:
            vp = state["vn"][tgt].index(src)
            state["inbuf"].setdefault(tgt, {})[vp] = msg

    def _final(self, state, ctx):
        if state["stage"] or state.get("new_dec"):
            return None
        if set(state["dec"]) != state["incident"]:
            return None
        chosen = sorted(v for v, sel in state["dec"].items() if sel == 1)
        if not chosen:
            return 0
        a, b = _vid_endpoints(state, chosen[0])
        return min(a, b)

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, ("id", ctx.id), None
        r = state["r"]
        state["r"] = r + 1
        state.setdefault("new_dec", [])
        outbox = {}
        if r == 1:
            for p, (_tag, nid) in inbox.items():
                state["nbr"][p] = nid
                vid = pair_id(*sorted((ctx.id, nid)))
                state["eid"][p] = vid
                state["incident"].add(vid)
                state["edge_ends"] = state.get("edge_ends", {})
                state["edge_ends"][vid] = tuple(sorted((ctx.id, nid)))
            if not state["nbr"]:
                return state, None, 0
            return state, ("inc", tuple(sorted(state["incident"]))), None
        if r == 2:
            inc_lists = {p: msg[1] for p, msg in inbox.items()
                         if msg[0] == "inc"}
            self._wake_virtuals(state, ctx, inc_lists)
            self._record_decs(state)
            self._flush(state, ctx, outbox)
            return state, outbox or None, self._final(state, ctx)
        # r >= 3: absorb items
        for _p, items in inbox.items():
            for item in items:
                tag = item[0]
                if tag == "d":
                    self._deliver(state, item[1], item[2], item[3])
                elif tag == "rl":
                    _tag, tgt, src, msg = item
                    ta, tb = _vid_endpoints(state, tgt)
                    owner = min(ta, tb)
                    if owner == ctx.id:
                        self._deliver(state, tgt, src, msg)
                    else:
                        port_of = {nid: p for p, nid in state["nbr"].items()}
                        self._push(outbox, port_of[owner],
                                   ("d", tgt, src, msg))
                elif tag == "dec":
                    state["dec"].setdefault(item[1], item[2])
        if r % 2 == 0:  # step round: all inputs for this virtual round in
            for vid in list(state["owned"]):
                vctx, st = state["owned"][vid]
                vin = state["inbuf"].pop(vid, {})
                st, vout, out = self.inner.step(st, vctx, vin)
                if vid in state["owned"]:
                    state["owned"][vid][1] = st
                self._route(state, ctx, vid, vout, out)
            self._record_decs(state)
        self._flush(state, ctx, outbox)
        return state, outbox or None, self._final(state, ctx)

    def _record_decs(self, state):
        for vid, sel in state["dec"].items():
            if not state.get("_told", {}).get(vid):
                state.setdefault("_told", {})[vid] = True
                state["new_dec"].append((vid, sel))


def _vid_endpoints(state, vid):
    ends = state.get("edge_ends", {})
    if vid in ends:
        return ends[vid]
    # edge owned or seen via a neighbor's incident list: endpoints are
    # recoverable from the pairing function
    a, b = _unpair(vid)
    ends[vid] = (a, b)
    state["edge_ends"] = ends
    return a, b


def _unpair(z: int):
    """Inverse of pair_id for positive identities."""
    z -= 1
    s = int((math.isqrt(8 * z + 1) - 1) // 2)
    b = z - s * (s + 1) // 2
    a = s - b
    return a, b


def matching_base(mis_base: NonUniformAlgorithm) -> NonUniformAlgorithm:
    """Maximal matching base: simulate an MIS base on the line graph.
    The node-count guess of the base becomes an edge-count guess."""
    def factory(vec):
        return LineGraphMIS(mis_base.factory(vec))

    part = mis_base.bound.parts[0]
    bound = BoundFn("add", [AscendingFn(
        f"line_{part.name}", lambda x: 2 * part(x) + 6)])
    return NonUniformAlgorithm(f"mm_{mis_base.name}", ("m",), factory,
                               bound, flavor=mis_base.flavor,
                               rho=mis_base.rho)


# ---------------------------------------------------------------------------
# Product-graph simulation: degree-plus-one coloring from an MIS program.

class ProductGraphColoring:
    """Each node plays a clique of deg+1 virtual vertices; slot i of
    adjacent nodes is cross-linked while i fits both degrees.  An MIS of
    that graph picks exactly one slot per clique, which is the color."""

    def __init__(self, mis_program):
        self.mis = mis_program

    def init(self, ctx):
        return {"r": 0, "nbr": {}, "ndeg": {}, "virt": {}, "vn": {},
                "local": {}, "inbuf": {}, "dec": {}}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            return state, ("hi", ctx.id), None
        r = state["r"]
        state["r"] = r + 1
        if r == 1:
            for p, (_t, nid) in inbox.items():
                state["nbr"][p] = nid
            return state, ("deg", len(state["nbr"])), None
        outbox = {}
        if r == 2:
            for p, (_t, d) in inbox.items():
                state["ndeg"][p] = d
            self._wake(state, ctx, outbox)
        else:
            self._absorb(state, ctx, inbox)
            self._step_virtuals(state, ctx, outbox)
        out = None
        k = len(state["nbr"]) + 1
        if len(state["dec"]) == k:
            sel = [i for i in range(1, k + 1) if state["dec"][i] == 1]
            out = sel[0] if len(sel) == 1 else "0"
        return state, outbox or None, out

    def _slots(self, state):
        return len(state["nbr"]) + 1

    def _cross_ok(self, state, p, i):
        return i <= 1 + min(len(state["nbr"]), state["ndeg"][p])

    def _neighborhood(self, state, ctx, i):
        vids = [(pair_id(ctx.id, j), ("c", j))
                for j in range(1, self._slots(state) + 1) if j != i]
        for p, nid in state["nbr"].items():
            if self._cross_ok(state, p, i):
                vids.append((pair_id(nid, i), ("x", p)))
        vids.sort()
        return vids

    def _wake(self, state, ctx, outbox):
        for i in range(1, self._slots(state) + 1):
            vid = pair_id(ctx.id, i)
            nbrs = self._neighborhood(state, ctx, i)
            vctx = NodeCtx({"id": vid}, vid, len(nbrs),
                           reseat_seed(ctx.seed_key, vid))
            st = self.mis.init(vctx)
            st, vout, out = self.mis.step(st, vctx, None)
            state["virt"][i] = [vctx, st]
            state["vn"][i] = nbrs
            self._route(state, ctx, i, vout, out, outbox)

    def _route(self, state, ctx, i, vout, out, outbox):
        nbrs = state["vn"][i]
        if vout is not None:
            if not isinstance(vout, dict):
                vout = {vp: vout for vp in range(len(nbrs))}
            for vp, msg in vout.items():
                _vid, (kind, ref) = nbrs[vp]
                if kind == "c":
                    state["local"].setdefault(ref, {})[i] = msg
                else:
                    outbox.setdefault(ref, []).append((i, msg))
        if out is not None and i not in state["dec"]:
            state["dec"][i] = 1 if out == 1 else 0
            state["virt"].pop(i, None)

    def _absorb(self, state, ctx, inbox):
        for p, items in inbox.items():
            for (slot, msg) in items:
                state["inbuf"].setdefault(slot, {})[("x", p)] = msg
        for j, by_src in state["local"].items():
            for i, msg in by_src.items():
                state["inbuf"].setdefault(j, {})[("c", i)] = msg
        state["local"] = {}

    def _step_virtuals(self, state, ctx, outbox):
        for i in list(state["virt"]):
            vctx, st = state["virt"][i]
            got = state["inbuf"].pop(i, {})
            vin = {}
            for vp, (_vid, key) in enumerate(state["vn"][i]):
                if key in got:
                    vin[vp] = got[key]
            st, vout, out = self.mis.step(st, vctx, vin)
            if i in state["virt"]:
                state["virt"][i][1] = st
            self._route(state, ctx, i, vout, out, outbox)


# ---------------------------------------------------------------------------
# List-coloring adapter and the layered pipeline.

class ListColorMap:
    """Wraps a coloring program: final color c becomes the list element
    (c, smallest second coordinate available in this node's lists)."""

    def __init__(self, inner):
        self.inner = inner

    def init(self, ctx):
        return self.inner.init(ctx)

    def step(self, state, ctx, inbox):
        state, outbox, out = self.inner.step(state, ctx, inbox)
        if out is None:
            return state, outbox, None
        if not isinstance(out, int):
            return state, outbox, "0"
        lists = ctx.input["lists"]
        cands = [j for (k, j) in lists if k == out]
        if cands:
            return state, outbox, (out, min(cands))
        palette = ctx.input.get("palette")
        if palette is not None and out <= palette:
            raise AssertionError(
                f"color class {out} empty despite a valid instance")
        return state, outbox, "0"


def slc_adapter(base: NonUniformAlgorithm) -> NonUniformAlgorithm:
    """Strong list coloring from a coloring base over (degree bound,
    identity bound): the degree guess is taken from the shared instance
    field "deg_bound" instead of being guessed, so only the identity
    bound remains."""
    def factory(vec):
        (mtil,) = vec
        return ListColorMap(base.factory((None, mtil)))

    bound = BoundFn("add", [base.bound.parts[1]])
    return NonUniformAlgorithm(f"slc_{base.name}", ("m",), factory, bound,
                               flavor=base.flavor, rho=base.rho)


@lru_cache(maxsize=None)
def degree_thresholds(upto: int):
    """Layer thresholds: D_1 = 1, D_{i+1} = least level whose stable
    palette is at least twice the previous layer's; extended past
    ``upto`` by one entry."""
    d = [1]
    while d[-1] <= upto:
        target = 2 * stable_palette(d[-1])
        nxt = d[-1] + 1
        while stable_palette(nxt) < target:
            nxt += 1
        d.append(nxt)
    return tuple(d)


def layer_of(degree: int):
    """(layer index, next threshold) for a node of the given degree."""
    deg = max(degree, 1)
    d = degree_thresholds(deg)
    i = max(j for j in range(len(d)) if d[j] <= deg)
    return i + 1, d[i + 1]


class _LayerPlan:
    """Per-layer pipeline: uniform list coloring on canonical lists, then
    the coloring base rerun with known-good guesses on the list colors
    re-encoded as identities; the final color lands in the layer's
    reserved range (g(D), 2 g(D)]."""

    def __init__(self, base: NonUniformAlgorithm):
        self.base = base
        self._slc_cache = {}

    def _consts(self, ctx):
        d_next = ctx.input["layer_bound"]
        return d_next, stable_palette(d_next)

    def next_phase(self, k, ctx, outputs):
        d_next, pal = self._consts(ctx)
        if k == 0:
            prog = self._slc_cache.get(d_next)
            if prog is None:
                from .pruning import prune_slc
                prog = uniformize_det(slc_adapter(self.base), prune_slc())
                self._slc_cache[d_next] = prog
            lists = [(kk, j) for kk in range(1, pal + 1)
                     for j in range(1, d_next + 2)]
            return prog, f"lists{d_next}", {
                "lists": lists, "deg_bound": d_next, "palette": pal}
        if k == 1:
            kk, j = outputs[0]
            ident = (kk - 1) * (d_next + 1) + j
            prog = self.base.factory((d_next, 2 * d_next * pal))
            return prog, f"refine{d_next}", {"init_color": ident}
        c = outputs[1]
        if not isinstance(c, int) or c > pal:
            raise AssertionError(f"refined color {c} outside palette {pal}")
        return Stop(pal + c)


class LayeredColoring:
    """Uniform coloring whose palette depends only on the maximum degree:
    nodes group into degree layers, each layer colors itself over its own
    disjoint range, and edges across layers are proper by construction."""

    def __init__(self, base: NonUniformAlgorithm = None):
        self.base = base if base is not None else coloring_base()
        self.plan = _LayerPlan(self.base)

    def init(self, ctx):
        return {"r": 0, "v2r": None, "r2v": None, "vctx": None, "st": None}

    def _translate(self, state, outbox):
        if outbox is None:
            return None
        if not isinstance(outbox, dict):
            outbox = {vp: outbox for vp in range(len(state["v2r"]))}
        return {state["v2r"][vp]: m for vp, m in outbox.items()}

    def step(self, state, ctx, inbox):
        if inbox is None:
            state["r"] = 1
            layer, bound = layer_of(ctx.degree)
            state["layer"], state["bound"] = layer, bound
            return state, ("layer", layer), None
        state["r"] += 1
        if state["v2r"] is None:
            same = sorted(p for p, (_t, lay) in inbox.items()
                          if lay == state["layer"])
            state["v2r"] = same
            state["r2v"] = {p: vp for vp, p in enumerate(same)}
            state["vctx"] = ctx.derive(
                "pipe", {"layer_bound": state["bound"]}, degree=len(same))
            inner = PhaseMachine(self.plan)
            st = inner.init(state["vctx"])
            st, outbox, out = inner.step(st, state["vctx"], None)
            state["inner"], state["st"] = inner, st
            return state, self._translate(state, outbox), out
        vin = {state["r2v"][p]: m for p, m in inbox.items()
               if p in state["r2v"]}
        st, outbox, out = state["inner"].step(state["st"], state["vctx"], vin)
        state["st"] = st
        return state, self._translate(state, outbox), out


def layered_coloring(base: NonUniformAlgorithm = None) -> LayeredColoring:
    return LayeredColoring(base)


# ---------------------------------------------------------------------------
# Registry for the command line.

def _registry():
    from .pruning import prune_mm, prune_ruling
    from .transformer import uniformize_lv

    return {
        "coloring_mis": lambda: uniformize_det(coloring_mis_base(),
                                               prune_ruling(1)),
        "random_mis": lambda: uniformize_lv(random_mis_base(),
                                            prune_ruling(1)),
        "matching": lambda: uniformize_lv(matching_base(random_mis_base()),
                                          prune_mm()),
        "greedy_mis": lambda: ColorOrderMIS(use_id=True),
        "layered": lambda: layered_coloring(),
    }


def make_program(name: str):
    reg = _registry()
    try:
        return reg[name]()
    except KeyError:
        raise ValueError(f"unknown algorithm: {name}; "
                         f"choose from {sorted(reg)}") from None
