"""The five concrete effects and their primitives.

``partial`` and ``power`` computations are frozensets of codes.  ``state``,
``reader`` and ``cps`` computations are functions of an observation (a start
state, a parameter index, a continuation).  Those are built lazily: each
observation re-runs the evaluation under its own fuel budget, so one
divergent probe does not poison the others.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from . import _deep
from .algebra import Budget, Effect, _apply
from .syntax import App, Closure, Code, Prim, Var, code_key, code_order, show_code

P1 = Closure(1, Var(0))
P2 = Closure(1, Var(1))


def church(n: int) -> Closure:
    """``<1|0 (0 (... (0 1)))>`` with ``n`` copies of level 0."""
    if n < 0:
        raise ValueError("church numerals are non-negative")
    body = Var(1)
    for _ in range(n):
        body = App(Var(0), body)
    return Closure(1, body)


def church_value(c: Code) -> int | None:
    """Inverse of :func:`church` on canonical numerals, else ``None``."""
    if not isinstance(c, Closure) or c.n != 1:
        return None
    n, e = 0, c.body
    while isinstance(e, App) and e.fun == Var(0):
        n, e = n + 1, e.arg
    return n if e == Var(1) else None


def _show_set(codes) -> str:
    return "{" + ", ".join(show_code(c) for c in sorted(codes, key=code_key)) + "}"


class Partial(Effect):
    """Sub-singleton sets: the classical partial combinatory algebra."""

    name = "partial"

    def ret(self, c):
        return frozenset((c,))

    def bind(self, m, k):
        out = frozenset()
        for x in sorted(m, key=code_order):
            out |= k(x)
        return out

    def eq(self, m1, m2):
        return m1 == m2

    def results(self, m):
        return frozenset(m)

    def empty(self):
        return frozenset()

    def show(self, m):
        if len(m) == 1:
            return show_code(next(iter(m)))
        return _show_set(m)


class Power(Partial):
    """Finite sets of codes with ``#flip`` and ``#fail``."""

    name = "power"
    prims = frozenset({"flip", "fail"})

    def apply_prim(self, prim, arg, budget):
        if prim.kind == "flip":
            return frozenset((P1, P2))
        if prim.kind == "fail":
            return frozenset()
        return super().apply_prim(prim, arg, budget)

    def show(self, m):
        return _show_set(m)


class Lazy:
    """A computation observed by calling it; each key is computed once."""

    __slots__ = ("_run", "_memo")

    def __init__(self, run: Callable):
        self._run = run
        self._memo: dict = {}

    def __call__(self, key):
        if not isinstance(key, (int, Cont)):
            return self._run(key)
        try:
            return self._memo[key]
        except KeyError:
            out = self._memo[key] = self._run(key)
            return out


# budgets of the observations currently in progress, innermost last
_running: list = []


class _LazyEffect(Effect):
    def delay(self, build, fuel):
        def run(key):
            if _running:
                budget = Budget(fuel, _running[-1])
            else:
                budget = Budget(fuel, id_base=getattr(key, "id_base", 1))
            _running.append(budget)
            try:
                return _deep.call(lambda: build(budget)(key), fuel=fuel)
            finally:
                _running.pop()
        return Lazy(run)

    def probes(self) -> Sequence:
        raise NotImplementedError

    def eq(self, m1, m2):
        return all(m1(p) == m2(p) for p in self.probes())


class State(_LazyEffect):
    """Increasing counter state: ``sigma -> {(sigma', code)}``.

    States are naturals; observations are taken at ``probe_states``.
    """

    name = "state"
    prims = frozenset({"get", "inc"})

    def __init__(self, probe_states: Iterable[int] = range(9), **kw):
        super().__init__(**kw)
        self.probe_states = tuple(sorted(set(probe_states)))
        if not self.probe_states or self.probe_states[0] < 0:
            raise ValueError("probe states must be a nonempty set of naturals")

    def probes(self):
        return self.probe_states

    def ret(self, c):
        return lambda s: frozenset(((s, c),))

    def bind(self, m, k):
        def run(s):
            out = frozenset()
            for s1, x in sorted(m(s), key=lambda p: (p[0], code_order(p[1]))):
                out |= k(x)(s1)
            return out
        return run

    def apply_prim(self, prim, arg, budget):
        if prim.kind == "get":
            return lambda s: frozenset(((s, church(s)),))
        if prim.kind == "inc":
            return lambda s: frozenset(((s + 1, arg),))
        return super().apply_prim(prim, arg, budget)

    def empty(self):
        return lambda s: frozenset()

    def results(self, m):
        return frozenset(x for s in self.probe_states for _, x in m(s))

    def increasing(self, m) -> bool:
        return all(s <= s1 for s in self.probe_states for s1, _ in m(s))

    def show_at(self, m, s: int) -> str:
        pairs = sorted(m(s), key=lambda p: (p[0], code_key(p[1])))
        return "{" + ", ".join(f"({s1}, {show_code(x)})" for s1, x in pairs) + "}"

    def show(self, m, states: Iterable[int] | None = None):
        states = self.probe_states if states is None else states
        return "\n".join(f"{s}: {self.show_at(m, s)}" for s in states)


@dataclass(frozen=True)
class Param:
    """A finite-support predicate on codes with values in {0, 1}."""

    name: str
    table: tuple = ()
    default: int = 0

    @classmethod
    def of(cls, name: str, table: dict, default: int = 0) -> "Param":
        items = tuple(sorted(table.items(), key=lambda kv: code_order(kv[0])))
        return cls(name, items, default)

    def __call__(self, c: Code) -> int:
        for k, v in self.table:
            if k == c:
                return v
        return self.default


DEFAULT_PARAMS = (Param("zero", (), 0), Param("one", (), 1))


class Reader(_LazyEffect):
    """Sub-singletons indexed by an oracle parameter; ``#search`` queries it."""

    name = "reader"
    prims = frozenset({"search"})

    def __init__(self, params: Sequence[Param] = DEFAULT_PARAMS, **kw):
        super().__init__(**kw)
        self.params = tuple(params)

    def probes(self):
        return range(len(self.params))

    def ret(self, c):
        return lambda i: frozenset((c,))

    def bind(self, m, k):
        def run(i):
            out = frozenset()
            for x in m(i):
                out |= k(x)(i)
            return out
        return run

    def apply_prim(self, prim, arg, budget):
        if prim.kind == "search":
            return lambda i: frozenset((P1 if self.params[i](arg) == 0 else P2,))
        return super().apply_prim(prim, arg, budget)

    def empty(self):
        return lambda i: frozenset()

    def fiber(self, m, i: int) -> frozenset:
        return m(i)

    def results(self, m):
        return frozenset(x for i in self.probes() for x in m(i))

    def show(self, m):
        return "\n".join(f"{p.name}: {_show_set(m(i))}" for i, p in enumerate(self.params))


# -- continuations ------------------------------------------------------------

HALT = object()


@dataclass(frozen=True)
class Cont:
    """A dictionary continuation: a finite table of answers plus a default.

    The default ``HALT`` answers with the code itself.
    """

    name: str
    table: tuple = ()
    default: Any = field(default=HALT, compare=False)

    def __call__(self, c: Code):
        for k, v in self.table:
            if k == c:
                return v
        return c if self.default is HALT else self.default

    def __hash__(self):
        return hash((self.name, self.table))


halt = Cont("halt")


def const(answer: Hashable) -> Cont:
    return Cont(f"const {answer}", (), answer)


DEFAULT_ANSWERS = ("ok", "abort")
DEFAULT_POLE = frozenset({"ok"})


class Cps(_LazyEffect):
    """Continuation-passing computations ``(Code -> R) -> R`` with ``#cc``."""

    name = "cps"
    prims = frozenset({"cc"})

    def __init__(self, dictionary: Sequence[Cont] | None = None,
                 answers: Sequence[Hashable] = DEFAULT_ANSWERS,
                 pole: Iterable[Hashable] = DEFAULT_POLE, **kw):
        super().__init__(**kw)
        self.answers = tuple(answers)
        self.pole = frozenset(pole)
        if dictionary is None:
            dictionary = [halt] + [const(r) for r in self.answers]
        self.dictionary = tuple(dictionary)

    def probes(self):
        return self.dictionary

    def ret(self, c):
        return lambda k: k(c)

    def bind(self, m, f):
        return lambda k: m(lambda x: f(x)(k))

    def apply_prim(self, prim, arg, budget):
        if prim.kind == "cc":
            def run(u):
                ku = Prim("k", budget.fresh_id(), u)
                return _apply(self, arg, ku, budget)(u)
            return run
        if prim.kind == "k":
            u = prim.payload
            return lambda _k: u(arg)
        return super().apply_prim(prim, arg, budget)

    def results(self, m):
        seen = set()

        def record(c):
            seen.add(c)
            return c
        m(record)
        return frozenset(seen)

    def in_pole(self, answer) -> bool:
        return answer in self.pole

    def show(self, m):
        lines = []
        for k in self.dictionary:
            r = m(k)
            lines.append(f"{k.name}: {show_code(r) if isinstance(r, (Closure, Prim)) else r}")
        return "\n".join(lines)


EFFECTS = ("partial", "power", "state", "reader", "cps")


def make_effect(kind: str, **opts) -> Effect:
    """Build an effect by name; unknown options for that effect are ignored."""
    tab = opts.pop("timeout_as_bottom", False)
    if tab and kind not in ("partial", "power"):
        raise ValueError("timeout-as-bottom only applies to the partial and power effects")
    if kind == "partial":
        return Partial(timeout_as_bottom=tab)
    if kind == "power":
        return Power(timeout_as_bottom=tab)
    if kind == "state":
        return State(opts.get("probe_states", range(9)))
    if kind == "reader":
        return Reader(opts.get("params") or DEFAULT_PARAMS)
    if kind == "cps":
        return Cps(opts.get("dictionary"), opts.get("answers", DEFAULT_ANSWERS),
                   opts.get("pole", DEFAULT_POLE))
    raise ValueError(f"unknown effect {kind!r}; expected one of {', '.join(EFFECTS)}")


__all__ = [
    "P1", "P2", "church", "church_value", "Partial", "Power", "State", "Reader",
    "Cps", "Param", "Cont", "HALT", "halt", "const", "Lazy", "make_effect",
    "EFFECTS", "DEFAULT_PARAMS", "DEFAULT_POLE", "DEFAULT_ANSWERS",
]
