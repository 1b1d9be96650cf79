"""Runtime-bound functions over guessed parameters.

An AscendingFn is a non-decreasing integer function on positive ints
with approximate inverses.  A BoundFn combines coordinate functions
additively or multiplicatively and ships a guess schedule: for a round
budget i it emits a small set of parameter vectors such that whenever
the true bound value is at most i, at least one emitted vector
dominates the true parameters while keeping the bound within c * i.
"""

from __future__ import annotations

import math

PARAM_CAP = 2 ** 40


class AscendingFn:
    """Non-decreasing f: positive ints -> non-negative ints."""

    def __init__(self, name: str, fn):
        self.name = name
        self.fn = fn

    def __call__(self, x: int) -> int:
        if x < 1:
            raise ValueError(f"{self.name}: argument must be >= 1")
        return self.fn(x)

    def inv_max(self, budget: int):
        """Largest x <= PARAM_CAP with f(x) <= budget, found by doubling
        then bisection.  Returns PARAM_CAP when f saturates below the
        budget, None when even f(1) exceeds it."""
        if self(1) > budget:
            return None
        lo = 1
        hi = 1
        while hi < PARAM_CAP and self(hi) <= budget:
            lo = hi
            hi = min(hi * 2, PARAM_CAP)
        if self(hi) <= budget:
            return hi
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self(mid) <= budget:
                lo = mid
            else:
                hi = mid
        return lo

    def inv_min(self, target: int):
        """Smallest x with f(x) >= target, or PARAM_CAP if none below
        the cap reaches it."""
        lo = 1
        hi = 1
        while hi < PARAM_CAP and self(hi) < target:
            lo = hi
            hi = min(hi * 2, PARAM_CAP)
        if self(hi) < target:
            return PARAM_CAP
        while lo < hi:
            mid = (lo + hi) // 2
            if self(mid) >= target:
                hi = mid
            else:
                lo = mid + 1
        return hi

    def __repr__(self):
        return f"AscendingFn({self.name})"


def log_star(x: int) -> int:
    """Iterated base-2 logarithm count; log*(x) = 0 for x <= 1."""
    count = 0
    v = x
    while v > 1:
        v = math.log2(v)
        count += 1
    return count


IDENTITY = AscendingFn("id", lambda x: x)
SQUARE = AscendingFn("sq", lambda x: x * x)
LOG2CEIL = AscendingFn("log", lambda x: max(1, math.ceil(math.log2(x))) if x > 1 else 0)
LOGSTAR = AscendingFn("logstar", log_star)
XLOGX = AscendingFn("xlog", lambda x: x * max(1, math.ceil(math.log2(x))) if x > 1 else 1)
POW2 = AscendingFn("pow2",
                   lambda x: 2 ** x if x <= 63 else 2 ** 63 * (x - 62))

_NAMED = {f.name: f for f in (IDENTITY, SQUARE, LOG2CEIL, LOGSTAR, XLOGX, POW2)}


def named_fn(name: str) -> AscendingFn:
    try:
        return _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown coordinate function: {name}") from None


class BoundFn:
    """Multi-parameter runtime bound with a guess schedule.

    eval(params) gives the bound value; set_sequence(i) yields parameter
    vectors to try for budget i; c bounds eval(vector)/i over emitted
    vectors; seq_number(i) = len(set_sequence(i)) is non-decreasing.
    """

    def __init__(self, kind: str, parts, c: int | None = None):
        if kind not in ("add", "prod"):
            raise ValueError("kind must be 'add' or 'prod'")
        if kind == "prod" and len(parts) != 2:
            raise ValueError("product bounds take exactly two coordinates")
        self.kind = kind
        self.parts = tuple(parts)
        self.arity = len(parts)
        self.c = (len(parts) if kind == "add" else 2) if c is None else c

    def eval(self, params) -> int:
        if len(params) != self.arity:
            raise ValueError("parameter arity mismatch")
        vals = [f(x) for f, x in zip(self.parts, params)]
        if self.kind == "add":
            return sum(vals)
        return vals[0] * vals[1]

    def set_sequence(self, i: int) -> list:
        """Parameter vectors to run with budget c * i."""
        if i < 1:
            raise ValueError("budget must be >= 1")
        if self.kind == "add":
            vec = tuple(f.inv_max(i) for f in self.parts)
            if any(x is None for x in vec):
                return []
            return [vec]
        out = []
        f1, f2 = self.parts
        top = math.ceil(math.log2(i)) if i > 1 else 0
        for j in range(top + 1):
            x1 = f1.inv_max(2 ** j)
            x2 = f2.inv_max(2 ** (top - j + 1))
            if x1 is None or x2 is None:
                continue
            out.append((x1, x2))
        return out

    def seq_number(self, i: int) -> int:
        return len(self.set_sequence(i))

    def __repr__(self):
        inner = ", ".join(f.name for f in self.parts)
        return f"BoundFn({self.kind}({inner}))"


def parse_bound(text: str) -> BoundFn:
    """Parse "add(sq, logstar)" / "prod(xlog, id)" style bound names."""
    text = text.strip()
    if "(" not in text or not text.endswith(")"):
        raise ValueError(f"cannot parse bound expression: {text!r}")
    kind, _, rest = text.partition("(")
    names = [s.strip() for s in rest[:-1].split(",") if s.strip()]
    return BoundFn(kind.strip(), [named_fn(n) for n in names])


class LiftedBound:
    """Bound over an extended parameter list.

    Wraps a base BoundFn f over coordinates x_1..x_l and adds extra
    coordinates y_1..y_t, each tied to a base coordinate h(j) through a
    non-decreasing link g_j.  The lifted value feeds max(x_h(j), g_j(y_j))
    into each base coordinate, so any algorithm bounded by the base f on
    the x's is also bounded by the lift on (x, y).  Guess schedules reuse
    the base schedule and derive each extra coordinate as the smallest y
    with g_j(y) >= the linked guess.
    """

    def __init__(self, base: BoundFn, links):
        # links: list of (h_index, AscendingFn g) per extra coordinate.
        self.base = base
        self.links = tuple(links)
        self.arity = base.arity + len(links)
        self.c = base.c

    def eval(self, params) -> int:
        if len(params) != self.arity:
            raise ValueError("parameter arity mismatch")
        xs = list(params[:self.base.arity])
        ys = params[self.base.arity:]
        for (h, gfn), y in zip(self.links, ys):
            xs[h] = max(xs[h], gfn(y))
        return self.base.eval(xs)

    def set_sequence(self, i: int) -> list:
        out = []
        for vec in self.base.set_sequence(i):
            ys = tuple(gfn.inv_min(vec[h]) for (h, gfn) in self.links)
            out.append(tuple(vec) + ys)
        return out

    def seq_number(self, i: int) -> int:
        return self.base.seq_number(i)
