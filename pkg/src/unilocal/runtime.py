"""Synchronous LOCAL-model executor.

Programs are per-node state machines.  A program object must provide

    init(ctx) -> state
    step(state, ctx, inbox) -> (state, outbox, output)

``inbox`` is None exactly once, at wake-up (round 0, before any message
exchange); afterwards it is a dict {port: message} holding what arrived
this round.  ``outbox`` may be None (silence), a dict {port: message},
or any other value, which is broadcast to all ports.  A non-None
``output`` terminates the node: its state freezes and the outbox
returned alongside the output is delivered once, after which the node
is silent.  Ports number a node's neighbors 0..deg-1 in sorted
node-index order.

Messages are arbitrary Python values (the model does not limit size);
their count is recorded for reporting only.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .graph import Configuration


class LocalFault(RuntimeError):
    """A node program raised; carries the node identity and round."""

    def __init__(self, node_id, round_no, cause):
        super().__init__(f"node {node_id} faulted in round {round_no}: {cause!r}")
        self.node_id = node_id
        self.round_no = round_no
        self.cause = cause


class NodeCtx:
    """Per-node view handed to programs: input record, identity, degree,
    and a deterministic randomness stream derived from (seed, id, labels)."""

    __slots__ = ("input", "id", "degree", "seed_key", "_rng")

    def __init__(self, input, id, degree, seed_key):
        self.input = input
        self.id = id
        self.degree = degree
        self.seed_key = seed_key
        self._rng = None

    @property
    def rng(self) -> random.Random:
        if self._rng is None:
            self._rng = random.Random(self.seed_key)
        return self._rng

    def derive(self, label, overlay=None, degree=None) -> "NodeCtx":
        """Child context for a sub-program: fresh stream, optional input
        overlay and degree override."""
        inp = self.input if not overlay else {**self.input, **overlay}
        return NodeCtx(inp, self.id,
                       self.degree if degree is None else degree,
                       f"{self.seed_key}/{label}")


def reseat_seed(seed_key: str, virtual_id) -> str:
    """Seed key for a virtual node played by a real one: swap the node
    identity component so simulated runs draw the same randomness as a
    direct run on the derived graph."""
    head, sep, tail = seed_key.partition("/")
    base, _, _ = head.rpartition("|")
    return f"{base}|{virtual_id}" + (sep + tail if sep else "")


@dataclass
class RunReport:
    rounds_total: int = 0
    termination_round: dict = field(default_factory=dict)
    messages_sent: int = 0
    phase_breakdown: list = field(default_factory=list)
    forced: set = field(default_factory=set)


def _normalize_outbox(outbox, degree):
    if outbox is None:
        return {}
    if isinstance(outbox, dict):
        return outbox
    return {p: outbox for p in range(degree)}


def run_sync(program, config: Configuration, round_cap=None, seed=0,
             order_seed=None, trace=None):
    """Simulate ``program`` on every node of ``config`` until all nodes
    output or ``round_cap`` rounds have elapsed; capped nodes are forced
    to the default output "0".  Returns ({id: output}, RunReport)."""
    if round_cap is not None and round_cap < 0:
        raise ValueError("round_cap must be >= 0")
    g = config.graph
    order_rng = random.Random(order_seed) if order_seed is not None else None
    ports_of = [{w: p for p, w in enumerate(g.adj[u])} for u in range(g.n)]

    ctxs = [NodeCtx(config.input[g.ids[u]], g.ids[u], g.degree(u),
                    f"{seed}|{g.ids[u]}") for u in range(g.n)]
    states = [None] * g.n
    outputs = {}
    term = {}
    pending = [{}] * g.n
    report = RunReport()
    active = list(range(g.n))

    def run_step(u, inbox, round_no):
        try:
            st, outbox, out = program.step(states[u], ctxs[u], inbox)
        except Exception as exc:  # surface the failing node and round
            raise LocalFault(g.ids[u], round_no, exc) from exc
        states[u] = st
        outbox = _normalize_outbox(outbox, g.degree(u))
        report.messages_sent += len(outbox)
        if trace is not None:
            trace.write(json.dumps({"round": round_no, "node": g.ids[u],
                                    "sent": len(outbox)}) + "\n")
        return outbox, out

    # Wake-up: round 0, no inbox.
    order = list(active)
    if order_rng:
        order_rng.shuffle(order)
    for u in order:
        try:
            states[u] = program.init(ctxs[u])
        except Exception as exc:
            raise LocalFault(g.ids[u], 0, exc) from exc
        outbox, out = run_step(u, None, 0)
        pending[u] = outbox
        if out is not None:
            outputs[g.ids[u]] = out
            term[g.ids[u]] = 0
    active = [u for u in active if g.ids[u] not in outputs]

    k = 0
    while active and (round_cap is None or k < round_cap):
        k += 1
        inboxes = [{} for _ in range(g.n)]
        for u in range(g.n):
            if not pending[u]:
                continue
            for p, msg in pending[u].items():
                v = g.adj[u][p]
                inboxes[v][ports_of[v][u]] = msg
            pending[u] = {}
        order = list(active)
        if order_rng:
            order_rng.shuffle(order)
        still = []
        for u in order:
            outbox, out = run_step(u, inboxes[u], k)
            pending[u] = outbox
            if out is not None:
                outputs[g.ids[u]] = out
                term[g.ids[u]] = k
            else:
                still.append(u)
        active = sorted(still)

    for u in active:  # round cap reached with nodes still running
        outputs[g.ids[u]] = "0"
        term[g.ids[u]] = k
        report.forced.add(g.ids[u])

    report.rounds_total = max(term.values(), default=0)
    report.termination_round = term
    if hasattr(program, "phase_breakdown"):
        by_id = {g.ids[u]: states[u] for u in range(g.n)}
        report.phase_breakdown = program.phase_breakdown(by_id)
    return outputs, report


class Restricted:
    """Run the wrapped program for at most ``t`` rounds; nodes that have
    not produced an output by then output the default "0"."""

    def __init__(self, program, t):
        if t < 0:
            raise ValueError("round budget must be >= 0")
        self.program = program
        self.t = t

    def init(self, ctx):
        return [self.program.init(ctx), 0]

    def step(self, state, ctx, inbox):
        inner, r = state
        if inbox is not None:
            r += 1
        inner, outbox, out = self.program.step(inner, ctx, inbox)
        if out is None and r >= self.t:
            out = "0"
        return [inner, r], outbox, out


def restrict(program, t):
    return Restricted(program, t)


DONE = ("done",)


class Stop:
    """Plan verdict: terminate with the given final output."""

    __slots__ = ("output",)

    def __init__(self, output):
        self.output = output


class PhaseMachine:
    """Runs a per-node sequence of sub-programs, one after another, with
    alpha-synchronizer discipline: each global round every live node
    broadcasts an envelope carrying its position (phase, inner round) and
    any sub-program payloads, tagged by the inner round that consumes
    them.  A node advances its current sub-program by one round only when
    every neighbor is known to have passed the point where it would have
    produced that round's message; neighbors that moved on or terminated
    count as silent.  This makes the staggered execution deliver exactly
    the messages a barrier-synchronized execution would.

    The plan object decides the sequence:

        plan.next_phase(k, ctx, outputs) -> (program, label, overlay) | Stop
    """

    def __init__(self, plan):
        self.plan = plan

    def init(self, ctx):
        return {
            "k": -1, "prog": None, "vctx": None, "inner": None, "r": 0,
            "buf": {}, "know": {}, "outputs": [], "labels": [],
            "fin": [], "g": -1, "done": False,
        }

    def _start_next(self, state, ctx, items):
        """Advance through phases until one needs messages or the plan
        stops; phase wake-ups chain within the same global round."""
        while True:
            state["k"] += 1
            verdict = self.plan.next_phase(state["k"], ctx, state["outputs"])
            if isinstance(verdict, Stop):
                state["done"] = True
                return verdict.output
            prog, label, overlay = verdict
            vctx = ctx.derive(f"ph{state['k']}:{label}", overlay)
            state["prog"], state["vctx"], state["labels"] = \
                prog, vctx, state["labels"] + [label]
            inner = prog.init(vctx)
            inner, outbox, out = prog.step(inner, vctx, None)
            state["inner"], state["r"] = inner, 0
            outbox = _normalize_outbox(outbox, ctx.degree)
            if outbox:
                items.append((state["k"], 1, outbox))
            if out is None:
                return None
            state["outputs"].append(out)
            state["fin"].append(state["g"])

    def _neighbors_ready(self, state, ctx, k, r):
        know = state["know"]
        for p in range(ctx.degree):
            st = know.get(p)
            if st is None:
                return False
            if st != DONE and (st[0] < k or (st[0] == k and st[1] < r)):
                return False
        return True

    def step(self, state, ctx, inbox):
        state["g"] += 1
        if inbox:
            for p, env in inbox.items():
                state["know"][p] = env["st"]
                for (pk, pr, msg) in env["it"]:
                    state["buf"].setdefault((pk, pr), {})[p] = msg
        items = []
        final = None
        if state["k"] < 0:
            final = self._start_next(state, ctx, items)
        elif not state["done"]:
            k, r = state["k"], state["r"]
            if self._neighbors_ready(state, ctx, k, r):
                inner_inbox = state["buf"].pop((k, r + 1), {})
                prog, vctx = state["prog"], state["vctx"]
                inner, outbox, out = prog.step(state["inner"], vctx,
                                               inner_inbox)
                state["inner"], state["r"] = inner, r + 1
                outbox = _normalize_outbox(outbox, ctx.degree)
                if outbox:
                    items.append((k, r + 2, outbox))
                if out is not None:
                    state["outputs"].append(out)
                    state["fin"].append(state["g"])
                    final = self._start_next(state, ctx, items)
        status = DONE if state["done"] else (state["k"], state["r"])
        env_out = {}
        for p in range(ctx.degree):
            mine = [(pk, pr, payload[p])
                    for (pk, pr, payload) in items if p in payload]
            env_out[p] = {"st": status, "it": mine}
        return state, env_out, final

    def phase_breakdown(self, states_by_id):
        spans = {}
        names = {}
        for st in states_by_id.values():
            prev = 0
            for k, fin in enumerate(st["fin"]):
                spans[k] = max(spans.get(k, 0), fin - prev)
                names.setdefault(k, st["labels"][k])
                prev = fin
        return [(names[k], spans[k]) for k in sorted(spans)]

class _ListPlan:
    def __init__(self, phases):
        self.phases = list(phases)

    def next_phase(self, k, ctx, outputs):
        if k >= len(self.phases):
            return Stop(outputs[-1] if outputs else "0")
        prog, label = self.phases[k]
        overlay = {"prev_output": outputs[-1] if outputs else None,
                   "phase_outputs": tuple(outputs)}
        return prog, label, overlay


def compose(phases):
    """Sequential composition of (program, label) pairs.  Each phase sees
    the previous phase's per-node output under input key "prev_output".
    The final output is the last phase's output."""
    return PhaseMachine(_ListPlan(phases))


def run_phases_barrier(phases, config: Configuration, seed=0):
    """Debugging reference for compose: run each phase as a separate
    fully-synchronized execution, feeding outputs forward.  Must produce
    the same outputs as the staggered machine."""
    outputs = {nid: None for nid in config.graph.ids}
    history = {nid: [] for nid in config.graph.ids}
    total = 0
    breakdown = []
    for k, (prog, label) in enumerate(phases):
        inp = {nid: {**config.input[nid],
                     "prev_output": outputs[nid],
                     "phase_outputs": tuple(history[nid])}
               for nid in config.graph.ids}
        sub = Configuration(config.graph, inp)

        class _Shim:
            """Reproduces the per-phase context stream compose derives."""

            def __init__(self, inner, key):
                self.inner, self.key = inner, key

            def init(self, ctx):
                vctx = ctx.derive(self.key)
                return [vctx, self.inner.init(vctx)]

            def step(self, state, ctx, inbox):
                vctx, inner_state = state
                inner_state, outbox, out = self.inner.step(inner_state,
                                                           vctx, inbox)
                return [vctx, inner_state], outbox, out

        shim = _Shim(prog, f"ph{k}:{label}")
        # Re-derive the same per-phase stream the machine would use.
        outs, rep = run_sync(shim, sub, seed=seed)
        for nid, val in outs.items():
            outputs[nid] = val
            history[nid].append(val)
        total += rep.rounds_total
        breakdown.append((label, rep.rounds_total))
    report = RunReport(rounds_total=total, phase_breakdown=breakdown)
    return outputs, report
