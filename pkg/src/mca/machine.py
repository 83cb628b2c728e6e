"""The eval/apply stack machine for the pure fragment plus ``#cc``.

Configurations::

    Eval(e, pi)     e ▷ pi
    Apply(c, pi)    c ◀ pi
    Final(c)

A stack is an immutable linked list of ``T(term)`` (an argument still to be
evaluated) and ``V(code)`` (a function waiting for its argument).

Fuel counts the rules that apply a code, matching the evaluator's budget.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .syntax import App, Closure, Code, Expr, Lit, Prim, ScopeError, scope_check, show, show_code, subst


@dataclass(frozen=True)
class T:
    term: Expr


@dataclass(frozen=True)
class V:
    code: Code


@dataclass(frozen=True, eq=False)
class Stack:
    top: Union[T, V]
    rest: Optional["Stack"]
    _h: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((self.top, self.rest._h if self.rest else 0)))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        a, b = self, other
        while a is not b:
            if not isinstance(a, Stack) or not isinstance(b, Stack):
                return False
            if a._h != b._h or a.top != b.top:
                return False
            a, b = a.rest, b.rest
        return True


def push(entry, stack: Optional[Stack]) -> Stack:
    return Stack(entry, stack)


def entries(stack: Optional[Stack]) -> Iterator[Union[T, V]]:
    while stack is not None:
        yield stack.top
        stack = stack.rest


@dataclass(frozen=True)
class Eval:
    term: Expr
    stack: Optional[Stack] = None


@dataclass(frozen=True)
class Apply:
    code: Code
    stack: Optional[Stack] = None


@dataclass(frozen=True)
class Final:
    code: Code


MachineState = Union[Eval, Apply, Final]


class MachineStuck(Exception):
    """No rule applies (an effect primitive the machine does not interpret)."""


class Machine:
    """Steps configurations; owns the counter for captured-stack ids."""

    def __init__(self):
        self._next_id = 1
        self.applications = 0

    def is_application(self, s: MachineState) -> bool:
        return isinstance(s, Apply) and s.stack is not None and isinstance(s.stack.top, V)

    def step(self, s: MachineState) -> MachineState:
        if isinstance(s, Eval):
            e = s.term
            if isinstance(e, App):
                return Eval(e.fun, push(T(e.arg), s.stack))
            if isinstance(e, Lit):
                return Apply(e.code, s.stack)
            raise ScopeError(f"free variable {show(e)} reached the machine")
        if isinstance(s, Apply):
            if s.stack is None:
                return Final(s.code)
            top, rest = s.stack.top, s.stack.rest
            if isinstance(top, T):
                return Eval(top.term, push(V(s.code), rest))
            f, a = top.code, s.code
            self.applications += 1
            if isinstance(f, Closure):
                if f.n == 0:
                    return Eval(subst(f.body, a), rest)
                return Apply(Closure(f.n - 1, subst(f.body, a)), rest)
            if f.kind == "cc":
                k = Prim("k", self._next_id, rest)
                self._next_id += 1
                return Apply(k, push(V(a), rest))
            if f.kind == "k":
                return Apply(a, f.payload)
            raise MachineStuck(f"no machine rule for {show_code(f)}")
        raise ValueError("a final state does not step")


@dataclass(frozen=True)
class Outcome:
    status: str          # "final" | "fuel" | "stuck"
    code: Optional[Code]
    steps: int
    applications: int
    last: MachineState
    message: str = ""


def _drive(e: Expr, fuel: int, keep: Optional[list]) -> Outcome:
    if not scope_check(e, 0):
        raise ScopeError("the machine runs closed expressions only")
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    m = Machine()
    s: MachineState = Eval(e, None)
    steps = 0
    if keep is not None:
        keep.append(s)
    while not isinstance(s, Final):
        if m.is_application(s) and m.applications >= fuel:
            return Outcome("fuel", None, steps, m.applications, s)
        try:
            s = m.step(s)
        except MachineStuck as exc:
            return Outcome("stuck", None, steps, m.applications, s, str(exc))
        steps += 1
        if keep is not None:
            keep.append(s)
    return Outcome("final", s.code, steps, m.applications, s)


def run(e: Expr, fuel: int = 10_000) -> Outcome:
    """Iterate :meth:`Machine.step` from ``e ▷ ∅`` until final, stuck or out of fuel."""
    return _drive(e, fuel, None)


def diverges(e: Expr, fuel: int = 10_000) -> bool:
    """True when the run revisits a configuration, which proves it never ends.

    ``False`` means no proof was found within ``fuel`` applications.
    """
    m = Machine()
    s: MachineState = Eval(e, None)
    seen = {s}
    while not isinstance(s, Final):
        if m.is_application(s) and m.applications >= fuel:
            return False
        try:
            s = m.step(s)
        except MachineStuck:
            return False
        if s in seen:
            return True
        seen.add(s)
    return False


def trace(e: Expr, fuel: int = 10_000) -> list[MachineState]:
    """Every configuration visited, starting with ``e ▷ ∅``."""
    states: list[MachineState] = []
    _drive(e, fuel, states)
    return states


def show_entry(x: Union[T, V], sk: bool = False) -> str:
    if isinstance(x, T):
        return f"t({show(x.term, sk)})"
    return f"v({show_code(x.code, sk)})"


def show_stack(stack: Optional[Stack], sk: bool = False) -> str:
    return ", ".join(show_entry(x, sk) for x in entries(stack))


def show_state(s: MachineState, sk: bool = False) -> str:
    """One trace line: tag, term or code, stack (top first), tab separated."""
    if isinstance(s, Eval):
        return f"E\t{show(s.term, sk)}\t{show_stack(s.stack, sk)}"
    if isinstance(s, Apply):
        return f"A\t{show_code(s.code, sk)}\t{show_stack(s.stack, sk)}"
    return f"F\t{show_code(s.code, sk)}\t"


def format_trace(states: list[MachineState], sk: bool = False) -> str:
    return "".join(show_state(s, sk) + "\n" for s in states)
