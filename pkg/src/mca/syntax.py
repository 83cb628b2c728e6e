"""Expressions and codes with lexical addresses (de Bruijn levels).

An expression is a variable (its level), a literal code, or an application.
A code is either a closure ``<n|e>`` waiting for ``n + 1`` more arguments, or
an effect primitive such as ``#flip``.  Literal codes are closed: substitution
never looks inside them.

Surface grammar::

    term := atom | term atom
    atom := NAT | '<' NAT '|' term '>' | '#' IDENT | 'S' | 'K' | '(' term ')'

``S`` and ``K`` abbreviate the closures ``<2|0 2 (1 2)>`` and ``<1|0>``.
"""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field
from typing import Any, Union

__all__ = [
    "Var", "Lit", "App", "Closure", "Prim", "Expr", "Code",
    "ScopeError", "ParseError", "PRIMITIVES",
    "subst", "scope_check", "parse", "show", "show_code", "apps", "code_key",
    "code_order", "brief",
]

MAX_LEVEL = 2**32

#: primitive names the parser accepts after ``#``
PRIMITIVES = frozenset({"flip", "fail", "get", "inc", "cc", "search"})


class ScopeError(ValueError):
    """A variable level is out of range for the expression's scope."""


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True, slots=True, eq=False)
class Var:
    level: int
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((0, self.level)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Var and self._h == other._h
                and self.level == other.level)

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=False)
class Lit:
    code: Code
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((1, self.code._h)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Lit and self._h == other._h
                and _same_tree(self, other))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=False)
class App:
    fun: Expr
    arg: Expr
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((2, self.fun._h, self.arg._h)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and self._h == other._h
                and _same_tree(self, other))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=False)
class Closure:
    """The code ``<n|body>``; ``body`` may mention levels ``0..n``."""

    n: int
    body: Expr
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("closure arity must be non-negative")
        if not scope_check(self.body, self.n + 1):
            raise ScopeError(f"closure body not in E_{self.n + 1}: {show(self.body)}")
        object.__setattr__(self, "_h", hash((4, self.n, self.body._h)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Closure and self._h == other._h
                and _same_tree(self, other))

    def __hash__(self):
        return self._h


@dataclass(frozen=True, slots=True, eq=False)
class Prim:
    """An effect primitive.

    Equality looks at ``kind`` and ``id`` only; ``payload`` (for example the
    continuation wrapped by a ``k`` code) is carried along but never compared.
    """

    kind: str
    id: int = 0
    payload: Any = field(default=None, compare=False)
    _h: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((3, zlib.crc32(self.kind.encode()), self.id)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Prim and self._h == other._h
                and self.kind == other.kind and self.id == other.id)

    def __hash__(self):
        return self._h


Expr = Union[Var, Lit, App]
Code = Union[Closure, Prim]


def _same_tree(a, b) -> bool:
    # Codes share subterms heavily, so compare each pair of nodes once.
    todo = [(a, b)]
    seen = set()
    while todo:
        x, y = todo.pop()
        if x is y:
            continue
        if type(x) is not type(y) or x._h != y._h:
            return False
        key = (id(x), id(y))
        if key in seen:
            continue
        seen.add(key)
        if type(x) is App:
            todo.append((x.fun, y.fun))
            todo.append((x.arg, y.arg))
        elif type(x) is Lit:
            todo.append((x.code, y.code))
        elif type(x) is Closure:
            if x.n != y.n:
                return False
            todo.append((x.body, y.body))
        elif type(x) is Var:
            if x.level != y.level:
                return False
        elif x.kind != y.kind or x.id != y.id:
            return False
    return True


def apps(head: Expr, *args: Expr) -> Expr:
    """Left-nested application ``head a1 a2 ...``."""
    out = head
    for a in args:
        out = App(out, a)
    return out


def scope_check(e: Expr, n: int) -> bool:
    """True iff every variable level in ``e`` is below ``n``."""
    stack = [e]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            if t.level >= n:
                return False
        elif isinstance(t, App):
            stack.append(t.fun)
            stack.append(t.arg)
    return True


def subst(e: Expr, c: Code) -> Expr:
    """Replace level 0 by ``c`` and shift every other level down by one."""
    if isinstance(e, Var):
        if e.level == 0:
            return Lit(c)
        return Var(e.level - 1)
    if isinstance(e, App):
        f = subst(e.fun, c)
        a = subst(e.arg, c)
        if f is e.fun and a is e.arg:
            return e
        return App(f, a)
    if isinstance(e, Lit):
        return e
    raise TypeError(f"not an expression: {e!r}")


# -- printing -----------------------------------------------------------------

_S_BODY = App(App(Var(0), Var(2)), App(Var(1), Var(2)))


def show_code(c: Code, sk: bool = False) -> str:
    if isinstance(c, Closure):
        if sk:
            if c.n == 2 and c.body == _S_BODY:
                return "S"
            if c.n == 1 and c.body == Var(0):
                return "K"
        return f"<{c.n}|{show(c.body, sk)}>"
    if c.kind == "k":
        return f"#k:{c.id}"
    if c.id:
        return f"#{c.kind}:{c.id}"
    return f"#{c.kind}"


def show(e: Expr, sk: bool = False) -> str:
    """Canonical text of ``e`` with the fewest parentheses.

    With ``sk=True`` the S and K closures print as ``S`` and ``K``.
    """
    if isinstance(e, App):
        arg = show(e.arg, sk)
        if isinstance(e.arg, App):
            arg = f"({arg})"
        return f"{show(e.fun, sk)} {arg}"
    if isinstance(e, Var):
        return str(e.level)
    if isinstance(e, Lit):
        return show_code(e.code, sk)
    raise TypeError(f"not an expression: {e!r}")


def code_key(c: Code) -> tuple:
    """Sort key giving the canonical order of codes in printed sets."""
    return (0 if isinstance(c, Closure) else 1, show_code(c))


def code_order(c: Code) -> int:
    """Cheap deterministic sort key for internal iteration order.

    Hashes are built from integers only, so they do not depend on the
    interpreter's string-hash seed.
    """
    return c._h


def brief(c: Code, limit: int = 160, sk: bool = False) -> str:
    """``show_code`` cut off after about ``limit`` characters."""
    out: list[str] = []
    size = 0
    stack: list = [c]
    while stack and size <= limit:
        x = stack.pop()
        if isinstance(x, str):
            piece = x
        elif isinstance(x, Var):
            piece = str(x.level)
        elif isinstance(x, Lit):
            stack.append(x.code)
            continue
        elif isinstance(x, Prim):
            piece = show_code(x)
        elif isinstance(x, Closure):
            if sk and x in _sk_pair():
                piece = "S" if x.n == 2 else "K"
            else:
                stack += [">", x.body, f"<{x.n}|"]
                continue
        else:
            parts = [x.fun, " "]
            if isinstance(x.arg, App):
                parts += ["(", x.arg, ")"]
            else:
                parts.append(x.arg)
            stack += reversed(parts)
            continue
        out.append(piece)
        size += len(piece)
    text = "".join(out)
    return text if not stack else text[:limit] + "..."


def _sk_pair():
    from .algebra import K, S
    return (S, K)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(#[A-Za-z_][A-Za-z_0-9]*(?::\d+)?)|([<>|()])|([SK])(?![A-Za-z_0-9]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("nat", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("prim", m.group(2)[1:], start))
        elif m.group(3) is not None:
            toks.append((m.group(3), m.group(3), start))
        else:
            toks.append(("sk", m.group(4), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def term(self) -> Expr:
        out = self.atom()
        while self.peek()[0] in ("nat", "prim", "<", "(", "sk"):
            out = App(out, self.atom())
        return out

    def atom(self) -> Expr:
        kind, val, pos = self.peek()
        if kind == "nat":
            self.i += 1
            level = int(val)
            if level >= MAX_LEVEL:
                raise ParseError(f"variable level {level} too large", pos)
            return Var(level)
        if kind == "prim":
            self.i += 1
            return Lit(_prim(val, pos))
        if kind == "sk":
            self.i += 1
            from .algebra import K, S
            return Lit(S if val == "S" else K)
        if kind == "(":
            self.i += 1
            inner = self.term()
            self.take(")")
            return inner
        if kind == "<":
            self.i += 1
            n_tok = self.take("nat")
            n = int(n_tok[1])
            if n >= MAX_LEVEL:
                raise ParseError(f"closure arity {n} too large", n_tok[2])
            self.take("|")
            body = self.term()
            self.take(">")
            if not scope_check(body, n + 1):
                raise ParseError(f"closure body mentions a level above {n}", pos)
            return Lit(Closure(n, body))
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def _prim(name: str, pos: int) -> Prim:
    if ":" in name:
        raise ParseError(f"captured continuation #{name} cannot be written in source", pos)
    if name not in PRIMITIVES:
        raise ParseError(f"unknown primitive #{name}", pos)
    return Prim(name)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression; raises :class:`ParseError`."""
    p = _Parser(text)
    e = p.term()
    p.take("eof")
    return e
