"""Uniformizers: turn parameter-guessing algorithms into uniform ones.

A NonUniformAlgorithm promises correct output only when every guessed
parameter is at least its true value.  The transformers interleave
guessed runs (restricted to doubling round budgets) with a pruning
algorithm that salvages the correct part of each tentative output, so
the combined output is correct on termination no matter how many
guesses were bad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Configuration
from .pruning import PruningAlgorithm
from .runtime import PhaseMachine, Restricted, Stop, restrict, run_sync

ROUND_CEILING = 2 ** 20


class CeilingExceeded(RuntimeError):
    """The guess schedule outgrew the round ceiling: either the declared
    bound or the pruner is broken, or the instance violates a promise."""


@dataclass
class NonUniformAlgorithm:
    name: str
    param_names: tuple
    factory: callable          # guess vector -> NodeProgram
    bound: object              # BoundFn-compatible
    flavor: str = "det"        # "det" | "wmc"
    rho: float | None = None   # success guarantee for "wmc"

    def __post_init__(self):
        if self.flavor not in ("det", "wmc"):
            raise ValueError("flavor must be 'det' or 'wmc'")
        if self.flavor == "wmc" and not (self.rho and 0 < self.rho < 1):
            raise ValueError("weak Monte-Carlo flavor needs 0 < rho < 1")


class _Schedule:
    """Lazy shared view over a generator of (label, program) entries."""

    def __init__(self, gen):
        self._gen = gen
        self._cache = []

    def get(self, idx):
        while len(self._cache) <= idx:
            self._cache.append(next(self._gen))
        return self._cache[idx]


class AlternatingPlan:
    """Phase plan alternating scheduled guessed runs with pruning.

    Even phases run schedule entry k//2 on the node's residual input;
    odd phases run the pruner on the tentative output.  A node whose
    prune verdict is w=1 stops with its salvaged value; w=0 carries the
    residual input patch into later phases.  ``entrants`` records which
    nodes reached each sub-iteration, for residual-shrinkage checks.
    """

    def __init__(self, schedule: _Schedule, pruner: PruningAlgorithm):
        self.schedule = schedule
        self.pruner = pruner
        self.entrants: dict = {}

    def _patches(self, outputs):
        patch = {}
        for idx in range(1, len(outputs), 2):
            _w, res = outputs[idx]
            if isinstance(res, dict):
                patch.update(res)
        return patch

    def next_phase(self, k, ctx, outputs):
        if k % 2 == 1:
            overlay = self._patches(outputs)
            overlay["tentative"] = outputs[-1]
            return self.pruner.program(), f"prune{k // 2}", overlay
        if outputs:
            w, val = outputs[-1]
            if w == 1:
                return Stop(val)
        sub = k // 2
        label, prog = self.schedule.get(sub)
        self.entrants.setdefault(sub, set()).add(ctx.id)
        return prog, label, self._patches(outputs)


def _pi_entries(alg: NonUniformAlgorithm, ceiling: int):
    i = 0
    while True:
        i += 1
        budget = alg.bound.c * 2 ** i
        if budget > ceiling:
            raise CeilingExceeded(
                f"{alg.name}: budget {budget} exceeds ceiling {ceiling}; "
                "schedule or pruner violates its contract")
        for idx, vec in enumerate(alg.bound.set_sequence(2 ** i)):
            yield (f"i{i}v{idx}", restrict(alg.factory(vec), budget))


def _tau_entries(alg: NonUniformAlgorithm, ceiling: int):
    i = 0
    while True:
        i += 1
        if alg.bound.c * 2 ** i > ceiling:
            raise CeilingExceeded(
                f"{alg.name}: budget {alg.bound.c * 2 ** i} exceeds ceiling "
                f"{ceiling}; the randomized base never succeeded")
        for j in range(1, i + 1):
            budget = alg.bound.c * 2 ** j
            for idx, vec in enumerate(alg.bound.set_sequence(2 ** j)):
                # label carries (i, j): each replay draws fresh randomness
                yield (f"i{i}j{j}v{idx}", restrict(alg.factory(vec), budget))


def _min_entries(programs, ceiling: int):
    i = 0
    while True:
        i += 1
        if 2 ** i > ceiling:
            raise CeilingExceeded(
                f"min-combine: budget {2 ** i} exceeds ceiling {ceiling}")
        for j, prog in enumerate(programs):
            yield (f"i{i}u{j}", restrict(prog, 2 ** i))


def uniformize_det(alg: NonUniformAlgorithm, pruner: PruningAlgorithm,
                   ceiling: int = ROUND_CEILING) -> PhaseMachine:
    """Deterministic uniformizer: iteration i tries every guess vector of
    set_sequence(2^i), each restricted to c * 2^i rounds, pruning after
    every run.  Terminates once every node is pruned into the output."""
    if alg.flavor != "det":
        raise ValueError("uniformize_det needs a deterministic base")
    sched = _Schedule(_pi_entries(alg, ceiling))
    return PhaseMachine(AlternatingPlan(sched, pruner))


def uniformize_lv(alg: NonUniformAlgorithm, pruner: PruningAlgorithm,
                  ceiling: int = ROUND_CEILING) -> PhaseMachine:
    """Las Vegas uniformizer for weak Monte-Carlo bases: outer iteration
    i replays the first i doubling budgets with fresh randomness, so a
    base succeeding with constant probability terminates almost surely,
    and pruning keeps every emitted value correct."""
    if alg.flavor != "wmc":
        raise ValueError("uniformize_lv needs a weak Monte-Carlo base")
    sched = _Schedule(_tau_entries(alg, ceiling))
    return PhaseMachine(AlternatingPlan(sched, pruner))


def min_combine(programs, pruner: PruningAlgorithm,
                ceiling: int = ROUND_CEILING) -> PhaseMachine:
    """Run several uniform programs in alternation with pruning; total
    rounds track the fastest program on the given instance."""
    programs = list(programs)
    if not programs:
        raise ValueError("min_combine needs at least one program")
    sched = _Schedule(_min_entries(programs, ceiling))
    return PhaseMachine(AlternatingPlan(sched, pruner))


class ScaledBound:
    """BoundFn view with values inflated by an integer factor; used when
    converting expected running times into fixed budgets."""

    def __init__(self, base, factor: int):
        self.base = base
        self.factor = factor
        self.arity = base.arity
        self.c = base.c * factor

    def eval(self, params):
        return self.base.eval(params) * self.factor

    def set_sequence(self, i):
        return self.base.set_sequence(i)

    def seq_number(self, i):
        return self.base.seq_number(i)


def wrap_las_vegas(alg: NonUniformAlgorithm, rho: float = 0.5
                   ) -> NonUniformAlgorithm:
    """A Las Vegas base with expected-time bound T becomes weak
    Monte-Carlo with guarantee rho within time T / (1 - rho), by
    Markov's inequality.  The program is unchanged."""
    if not 0 < rho < 1:
        raise ValueError("rho must be in (0, 1)")
    factor = math.ceil(round(1 / (1 - rho), 9))
    return NonUniformAlgorithm(
        f"{alg.name}_mc{rho}", alg.param_names, alg.factory,
        ScaledBound(alg.bound, factor), flavor="wmc", rho=rho)


class _ComposedCoord:
    """Ascending coordinate built as a sum of f_j(g_j(x)) terms, used to
    fold dominated parameters into their dominating one."""

    def __init__(self, name, terms):
        self.name = name
        self.terms = terms  # list of (AscendingFn f, AscendingFn g | None)

    def __call__(self, x):
        total = 0
        for f, g in self.terms:
            total += f(g(x)) if g is not None else f(x)
        return total

    def inv_max(self, budget):
        from .bounds import AscendingFn
        return AscendingFn(self.name, self.__call__).inv_max(budget)

    def inv_min(self, target):
        from .bounds import AscendingFn
        return AscendingFn(self.name, self.__call__).inv_min(target)


class _ZeroCoord:
    name = "ignored"

    def __call__(self, x):
        return 0

    def inv_max(self, budget):
        from .bounds import PARAM_CAP
        return PARAM_CAP

    def inv_min(self, target):
        return 1


def dominate_uniformize(alg: NonUniformAlgorithm, lam_names,
                        dominations, pruner: PruningAlgorithm,
                        ceiling: int = ROUND_CEILING) -> PhaseMachine:
    """Re-parameterize an additive-bound base over guessable parameters.

    ``lam_names`` lists the parameters the uniform program may guess.
    ``dominations`` maps each base parameter not in lam_names to a pair
    (lam_name, g) with g non-decreasing and g(lam) >= param on every
    instance; the derived guess for that parameter is g(lam guess).
    Parameters of lam_names absent from the base are accepted and
    ignored (their coordinate contributes nothing to the bound).
    """
    from .bounds import BoundFn

    base = alg.bound
    if getattr(base, "kind", None) != "add":
        raise ValueError("domination wrapper supports additive bounds")
    lam_names = tuple(lam_names)
    pos = {n: i for i, n in enumerate(alg.param_names)}
    # where each base coordinate's guess comes from
    source = {}
    for name in alg.param_names:
        if name in lam_names:
            source[name] = (name, None)
        elif name in dominations:
            source[name] = dominations[name]
        else:
            raise ValueError(f"parameter {name} neither guessed nor dominated")
    coords = []
    for lam in lam_names:
        terms = [(base.parts[pos[n]], g) for n, (l, g) in source.items()
                 if l == lam]
        coords.append(_ComposedCoord(lam, terms) if terms else _ZeroCoord())
    lifted_bound = BoundFn("add", coords)

    def lifted_factory(lam_guesses):
        by_lam = dict(zip(lam_names, lam_guesses))
        vec = []
        for name in alg.param_names:
            lam, g = source[name]
            vec.append(by_lam[lam] if g is None else g(by_lam[lam]))
        return alg.factory(tuple(vec))

    lifted = NonUniformAlgorithm(
        f"{alg.name}_via_{'_'.join(lam_names)}", lam_names, lifted_factory,
        lifted_bound, flavor=alg.flavor, rho=alg.rho)
    if alg.flavor == "det":
        return uniformize_det(lifted, pruner, ceiling)
    return uniformize_lv(lifted, pruner, ceiling)


# ---------------------------------------------------------------------------
# Barrier-mode reference execution (debugging): run the same alternating
# schedule with a global barrier between phases.  Must produce outputs
# identical to the staggered PhaseMachine, including randomness.

class _KeyedShim:
    """Runs a program under the derived per-phase context the staggered
    machine would use, so randomness streams line up exactly."""

    def __init__(self, inner, key, overlay):
        self.inner = inner
        self.key = key
        self.overlay = overlay

    def init(self, ctx):
        vctx = ctx.derive(self.key, self.overlay.get(ctx.id))
        return [vctx, self.inner.init(vctx)]

    def step(self, state, ctx, inbox):
        vctx, inner_state = state
        inner_state, outbox, out = self.inner.step(inner_state, vctx, inbox)
        return [vctx, inner_state], outbox, out


def run_alternating_barrier(entries, pruner: PruningAlgorithm,
                            config: Configuration, seed=0):
    """Reference executor: for each (label, program) schedule entry, run
    the program on the current residual subgraph to completion, then the
    pruner; pruned nodes leave with their salvaged value.  Returns
    (outputs, total_rounds, sub_iterations)."""
    from .graph import induced_subgraph

    g = config.graph
    final = {}
    patches = {nid: {} for nid in g.ids}
    live = set(g.ids)
    total = 0
    subs = 0
    for sub, (label, prog) in enumerate(entries):
        if not live:
            break
        subs += 1
        sub_g = induced_subgraph(g, [g.index_of(i) for i in live])
        inp = {nid: {**config.input[nid], **patches[nid]}
               for nid in sub_g.ids}
        cfg = Configuration(sub_g, inp)
        overlay = {nid: patches[nid] for nid in sub_g.ids}
        shim = _KeyedShim(prog, f"ph{2 * sub}:{label}", overlay)
        tentative, rep = run_sync(shim, cfg, seed=seed)
        total += rep.rounds_total
        pinp = {nid: {**inp[nid], "tentative": tentative[nid]}
                for nid in sub_g.ids}
        poverlay = {nid: {**patches[nid], "tentative": tentative[nid]}
                    for nid in sub_g.ids}
        pshim = _KeyedShim(pruner.program(),
                           f"ph{2 * sub + 1}:prune{sub}", poverlay)
        verdicts, prep = run_sync(pshim, Configuration(sub_g, pinp),
                                  seed=seed)
        total += prep.rounds_total
        for nid, (w, val) in verdicts.items():
            if w == 1:
                final[nid] = val
                live.discard(nid)
            elif isinstance(val, dict):
                patches[nid].update(val)
    if live:
        raise CeilingExceeded("barrier reference: schedule exhausted")
    return final, total, subs
