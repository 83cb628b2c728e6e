"""Modalities ``after x <- m. phi(x)``, separators, and their law checkers.

A predicate ``phi`` is any callable from codes to the modality's truth
values.  :class:`Pred` predicates additionally expose a finite support and a
default value; for those, infima over *all* codes are computed exactly as
the infimum over the support plus one term for the default.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from . import machine
from .algebra import Effect, FuelExhausted, Stuck, apply
from .effects import HALT, Cont, Cps, Partial, Power, Reader, State
from .order import Heyting, StatePred, TwoPoint
from .report import Report, Verdict
from .syntax import App, Closure, Code, Lit, Prim, brief, code_order


# -- predicates ---------------------------------------------------------------

@dataclass(frozen=True)
class Pred:
    """``phi(c) = support[c]`` when listed, ``default`` otherwise."""

    support: tuple = ()
    default: object = False

    @classmethod
    def of(cls, table: dict, default) -> "Pred":
        return cls(tuple(sorted(table.items(), key=lambda kv: code_order(kv[0]))), default)

    @classmethod
    def const(cls, value) -> "Pred":
        return cls((), value)

    def __call__(self, c: Code):
        table = self.__dict__.get("_table")
        if table is None:
            table = dict(self.support)
            object.__setattr__(self, "_table", table)
        return table.get(c, self.default)

    def keys(self) -> list[Code]:
        return [k for k, _ in self.support]

    def map(self, f: Callable) -> "Pred":
        return Pred(tuple((k, f(v)) for k, v in self.support), f(self.default))

    def show(self, H: Heyting) -> str:
        inner = ", ".join(f"{brief(k)}: {H.show(v)}" for k, v in self.support)
        sep = ", " if inner else ""
        return "base {" + inner + sep + f"default: {H.show(self.default)}" + "}"


def pointwise(f: Callable, *preds: Pred) -> Pred:
    """Combine predicates pointwise; the result has the union support."""
    keys = _union_keys(preds)
    return Pred(tuple((k, f(*(p(k) for p in preds))) for k in keys),
                f(*(p.default for p in preds)))


def _union_keys(preds: Iterable[Pred]) -> list[Code]:
    seen: dict = {}
    for p in preds:
        for k in p.keys():
            seen.setdefault(k, None)
    return sorted(seen, key=code_order)


def forall_codes(H: Heyting, f: Callable, *preds: Pred):
    """``inf over every code c of f(p1(c), ..., pn(c))``, exactly."""
    out = H.inf(f(*(p(k) for p in preds)) for k in _union_keys(preds))
    return H.meet(out, f(*(p.default for p in preds)))


def pointwise_leq(H: Heyting, p: Pred, q: Pred) -> bool:
    return all(H.leq(p(k), q(k)) for k in _union_keys((p, q))) and H.leq(p.default, q.default)


# -- modalities ---------------------------------------------------------------

class Modality:
    """``after(m, phi)`` for one effect and one truth-value algebra."""

    name = "modality"
    exact = True

    def __init__(self, effect: Effect, H: Heyting | None = None):
        self.effect = effect
        self.H = H if H is not None else TwoPoint()

    def after(self, m, phi: Callable):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.effect.name})"


class Join(Modality):
    """Join over the results: the classical partial modality, and angelic choice."""

    name = "join"

    def after(self, m, phi):
        return self.H.sup(phi(x) for x in sorted(m, key=code_order))


class Demonic(Modality):
    """Nonempty and every result satisfies ``phi``."""

    name = "demonic"

    def after(self, m, phi):
        if not m:
            return self.H.bottom
        return self.H.inf(phi(x) for x in sorted(m, key=code_order))


class InfOnly(Modality):
    """Meet over the results with no termination conjunct (negative control)."""

    name = "inf-only"

    def after(self, m, phi):
        return self.H.inf(phi(x) for x in sorted(m, key=code_order))


class StateModality(Modality):
    """Future-stable modality over the counter state.

    ``(after m phi) at sigma`` is the meet over probe states ``sigma' >=
    sigma`` of the join (angelic) or terminating meet (demonic) of
    ``phi(x) at sigma''`` over ``(sigma'', x)`` in ``m(sigma')``.
    """

    def __init__(self, effect: State, demonic: bool = False, H: StatePred | None = None):
        super().__init__(effect, H if H is not None else StatePred(effect.probe_states))
        self.demonic = demonic
        self.name = "state-demonic" if demonic else "state-angelic"

    def _local(self, m, s1, phi) -> bool:
        outs = sorted(m(s1), key=lambda p: (p[0], code_order(p[1])))
        vals = [self.H.holds(phi(x), s2) for s2, x in outs]
        if self.demonic:
            return bool(outs) and all(vals)
        return any(vals)

    def after(self, m, phi):
        states = self.H.states
        local = {s: self._local(m, s, phi) for s in states}
        return frozenset(s for s in states if all(local[t] for t in states if t >= s))


class ReaderModality(Modality):
    """Meet over parameters of the join over each fiber."""

    name = "reader"

    def after(self, m, phi):
        return self.H.inf(self.H.sup(phi(x) for x in sorted(m(i), key=code_order))
                          for i in self.effect.probes())


class _Query(Exception):
    def __init__(self, code, owner):
        super().__init__(code)
        self.code = code
        self.owner = owner


# each exploration numbers its captured continuations from its own block
_ID_SPAN = 10 ** 6
_id_blocks = itertools.count(_ID_SPAN, _ID_SPAN)


class _Symbolic:
    """A continuation known only on the codes it has already been asked about."""

    def __init__(self, answers: dict, owner, id_base: int):
        self.answers = answers
        self.owner = owner
        self.id_base = id_base

    def __call__(self, c):
        if c in self.answers:
            return self.answers[c]
        raise _Query(c, self.owner)


def _captures(c, lo: int, hi: int) -> bool:
    """Does code ``c`` contain a continuation numbered in ``[lo, hi)``?"""
    todo, seen = [c], set()
    while todo:
        x = todo.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        t = type(x)
        if t is Prim:
            if x.kind == "k" and lo <= x.id < hi:
                return True
        elif t is Closure:
            todo.append(x.body)
        elif t is Lit:
            todo.append(x.code)
        elif t is App:
            todo.append(x.fun)
            todo.append(x.arg)
    return False


class CpsModality(Modality):
    """Double orthogonality against the pole.

    ``exact`` mode ranges over every continuation: it replays ``m`` against
    a symbolic continuation, branching on whether each newly queried code is
    answered inside or outside the pole.  A computation only passes answers
    through, so one representative answer per side is enough.

    ``dictionary`` mode ranges over the effect's continuation dictionary
    only.  It can only be more permissive than ``exact``.
    """

    def __init__(self, effect: Cps, mode: str = "exact", H: Heyting | None = None,
                 probe_codes: Sequence[Code] = (), max_branches: int = 256):
        super().__init__(effect, H)
        if mode not in ("exact", "dictionary"):
            raise ValueError("cps modality mode is 'exact' or 'dictionary'")
        self.mode = mode
        self.exact = mode == "exact"
        self.max_branches = max_branches
        self.name = f"cps-{mode}"
        self.probe_codes = tuple(probe_codes)
        pole = effect.pole
        outside = [r for r in effect.answers if r not in pole]
        self._reps = [sorted(pole, key=repr)[0]] if pole else []
        self._reps.append(outside[0] if outside else _Outside())

    def _in(self, r) -> bool:
        return r in self.effect.pole

    def _truth(self, b: bool):
        return self.H.top if b else self.H.bottom

    def after(self, m, phi):
        if self.mode == "exact":
            return self._after_exact(m, phi)
        return self._after_dictionary(m, phi)

    def _after_exact(self, m, phi):
        H = self.H
        out = H.top
        pending = [dict()]
        runs = 0
        seen: dict = {}
        owner, base = object(), next(_id_blocks)

        def value(a):
            if a not in seen:
                if _captures(a, base, base + _ID_SPAN):
                    # the predicate would be judged through the continuation itself
                    raise FuelExhausted(self.max_branches)
                try:
                    seen[a] = phi(a)
                except _Query as q:
                    if q.owner is owner:
                        raise FuelExhausted(self.max_branches) from None
                    raise
            return seen[a]
        while pending:
            runs += 1
            if runs > self.max_branches:
                # each new query doubles the branches; give up rather than guess
                raise FuelExhausted(self.max_branches)
            rho = pending.pop()
            try:
                r = m(_Symbolic(rho, owner, base))
            except _Query as q:
                if q.owner is not owner:
                    raise
                for rep in self._reps:
                    pending.append({**rho, q.code: rep})
                continue
            hyp = H.inf(H.impl(value(a), self._truth(self._in(v))) for a, v in rho.items())
            out = H.meet(out, H.impl(hyp, self._truth(self._in(r))))
        return out

    def _after_dictionary(self, m, phi):
        H = self.H
        out = H.top
        for k in self.effect.dictionary:
            out = H.meet(out, H.impl(self.orthogonal(k, phi), self._truth(self._in(m(k)))))
        return out

    def orthogonal(self, k: Cont, phi):
        """``inf over codes a of phi(a) => [k(a) in pole]``.

        Exact when ``phi`` is a :class:`Pred`; otherwise taken over the
        listed codes, ``phi.keys()`` when present, and ``probe_codes``.
        """
        H = self.H
        pts: dict = {}
        for a, _ in k.table:
            pts[a] = None
        for a in self.effect.pole:
            if isinstance(a, (Closure, Prim)):
                pts[a] = None
        if hasattr(phi, "keys"):
            for a in phi.keys():
                pts[a] = None
        for a in self.probe_codes:
            pts[a] = None
        out = H.inf(H.impl(phi(a), self._truth(self._in(k(a)))) for a in pts)
        if isinstance(phi, Pred):
            dflt = False if k.default is HALT else self._in(k.default)
            out = H.meet(out, H.impl(phi.default, self._truth(dflt)))
        return out


class _Outside:
    """An answer guaranteed to lie outside the pole."""

    def __repr__(self):
        return "<outside>"


MODALITIES = {
    "partial": ("partial", "join", "inf-only"),
    "power": ("angelic", "demonic", "inf-only"),
    "state": ("angelic", "demonic"),
    "reader": ("reader",),
    "cps": ("exact", "dictionary"),
}


def make_modality(effect: Effect, name: str | None = None) -> Modality:
    """Build the named modality for ``effect``; ``None`` picks the default."""
    kind = effect.name
    name = name or MODALITIES[kind][0]
    if kind in ("partial", "power"):
        if name in ("partial", "join", "angelic"):
            mod = Join(effect)
            mod.name = "partial" if kind == "partial" else "power-angelic"
            return mod
        if name == "demonic":
            mod = Demonic(effect)
            mod.name = "power-demonic" if kind == "power" else "partial-demonic"
            return mod
        if name in ("inf-only", "demonic-no-term"):
            return InfOnly(effect)
    if kind == "state" and name in ("angelic", "demonic", "state-angelic", "state-demonic"):
        return StateModality(effect, demonic=name.endswith("demonic"))
    if kind == "reader" and name in ("reader", "join", "angelic"):
        return ReaderModality(effect)
    if kind == "cps" and name in ("exact", "dictionary", "cps"):
        return CpsModality(effect, "exact" if name == "cps" else name)
    raise ValueError(f"no modality {name!r} for the {kind} effect "
                     f"(choose from {', '.join(MODALITIES[kind])})")


# -- law checks ---------------------------------------------------------------

@dataclass
class LawSamples:
    """Inputs for the modality law checks.

    ``computations`` are ``(label, m)`` pairs; ``functions`` are codes ``c_f``
    used as Kleisli arrows ``x -> c_f . x``.
    """

    codes: list
    computations: list
    preds: list
    functions: list
    thetas: list = field(default_factory=list)
    fuel: int = 2000


def _rec(t, holds: bool, witness: str, exact: bool):
    t.check(holds, witness, exact=exact)


def check_after_return(mod: Modality, s: LawSamples) -> Report:
    """``phi(c) <= after(ret c, phi)``."""
    rep = Report(f"after-return ({mod.name})")
    law = rep.law("after-return")
    H, eff = mod.H, mod.effect
    for c in s.codes:
        for phi in s.preds:
            _rec(law, H.leq(phi(c), mod.after(eff.ret(c), phi)),
                 lambda: f"c={brief(c)} phi={_show_pred(mod, phi)}", mod.exact)
    return rep


def check_after_bind(mod: Modality, s: LawSamples) -> Report:
    """``after(m, x -> after(f x, phi)) <= after(bind(m, f), phi)`` with ``f x = c_f . x``."""
    rep = Report(f"after-bind ({mod.name})")
    law = rep.law("after-bind")
    H, eff = mod.H, mod.effect
    for label, m in s.computations:
        for cf in s.functions:
            f = _kleisli(eff, cf, s.fuel)
            for phi in s.preds:
                w = lambda: f"m={label} f={brief(cf)} phi={_show_pred(mod, phi)}"
                try:
                    lhs = mod.after(m, lambda x: mod.after(f(x), phi))
                    rhs = mod.after(eff.bind(m, f), phi)
                except FuelExhausted:
                    law.record(Verdict.UNKNOWN)
                    continue
                _rec(law, H.leq(lhs, rhs), w, mod.exact)
    return rep


def check_internal_monotonicity(mod: Modality, s: LawSamples) -> Report:
    """``(inf_x phi1 x => phi2 x) /\\ after(m, phi1) <= after(m, phi2)``."""
    rep = Report(f"internal monotonicity ({mod.name})")
    law = rep.law("internal-monotonicity")
    H = mod.H
    for label, m in s.computations:
        for p1 in s.preds:
            for p2 in s.preds:
                glob = forall_codes(H, H.impl, p1, p2)
                try:
                    lhs = H.meet(glob, mod.after(m, p1))
                    rhs = mod.after(m, p2)
                except FuelExhausted:
                    law.record(Verdict.UNKNOWN)
                    continue
                _rec(law, H.leq(lhs, rhs),
                     lambda: f"m={label} phi1={_show_pred(mod, p1)} phi2={_show_pred(mod, p2)}", mod.exact)
    return rep


def check_derived_lemmas(mod: Modality, s: LawSamples) -> Report:
    """Monotonicity, implication and conjunction lemmas derived from the three laws."""
    rep = Report(f"derived lemmas ({mod.name})")
    mono, imp, conj = rep.law("after-mono"), rep.law("after-imp"), rep.law("after-conj")
    H = mod.H
    thetas = s.thetas or H.elements()
    for label, m in s.computations:
        try:
            for p1 in s.preds:
                a1 = mod.after(m, p1)
                for p2 in s.preds:
                    if pointwise_leq(H, p1, p2):
                        _rec(mono, H.leq(a1, mod.after(m, p2)),
                             lambda: f"m={label} phi1={_show_pred(mod, p1)} phi2={_show_pred(mod, p2)}",
                             mod.exact)
                for th in thetas:
                    w = lambda: f"m={label} theta={H.show(th)} phi={_show_pred(mod, p1)}"
                    lhs = mod.after(m, p1.map(lambda v: H.impl(th, v)))
                    _rec(imp, H.leq(lhs, H.impl(th, a1)), w, mod.exact)
                    rhs = mod.after(m, p1.map(lambda v: H.meet(th, v)))
                    _rec(conj, H.leq(H.meet(th, a1), rhs), w, mod.exact)
        except FuelExhausted:
            mono.record(Verdict.UNKNOWN)
    return rep


def check_naturality(mod: Modality, s: LawSamples, renamings: Sequence[dict]) -> Report:
    """``after(fmap f m, phi)`` against ``after(m, phi . f)`` for finite renamings ``f``."""
    rep = Report(f"naturality ({mod.name})")
    law = rep.law("naturality")
    H, eff = mod.H, mod.effect
    for label, m in s.computations:
        for ren in renamings:
            f = lambda c, ren=ren: ren.get(c, c)
            for phi in s.preds:
                lhs = mod.after(eff.fmap(f, m), phi)
                rhs = mod.after(m, lambda c: phi(f(c)))
                _rec(law, H.equiv(lhs, rhs), lambda: f"m={label} phi={_show_pred(mod, phi)}", mod.exact)
    return rep


def check_modality(mod: Modality, s: LawSamples) -> Report:
    rep = Report(f"modality laws ({mod.name})")
    for chk in (check_after_return, check_after_bind, check_internal_monotonicity,
                check_derived_lemmas):
        rep.merge(chk(mod, s))
    return rep


def law_samples(mod: Modality, count: int = 20, seed: int = 0, fuel: int = 500) -> LawSamples:
    """Seeded inputs for :func:`check_modality`.

    ``count`` codes, ``count`` predicates, ``count // 2`` computations ``f . a``
    that finish within ``fuel`` on every probe, and five Kleisli codes.
    Predicate supports mix pool codes with the computations' results so the
    predicates tell results apart.
    """
    from .gen import Gen

    eff, H = mod.effect, mod.H
    g = Gen(seed, prims=sorted(eff.prims - {"k"}))
    codes = list(dict.fromkeys(g.codes(3 * count)))[:count]
    comps: list = [(f"ret {brief(c)}", eff.ret(c)) for c in codes[:2]]
    hits: list[Code] = []
    tries = 0
    while len(comps) < max(count // 2, 3) and tries < 50 * count:
        tries += 1
        f, a = g.code(), g.code()
        try:
            m = apply(eff, f, a, fuel)
            hits.extend(sorted(eff.results(m), key=code_order))
        except (FuelExhausted, Stuck):
            continue
        comps.append((f"{brief(f)} . {brief(a)}", m))
    support = list(dict.fromkeys(codes + hits))
    values = H.elements()
    preds = [Pred.const(H.top), Pred.const(H.bottom)]
    while len(preds) < count:
        keys = g.sample(support, g.rng.randint(1, 4))
        preds.append(Pred.of({k: g.pick(values) for k in keys}, g.pick(values)))
    functions = [g.code() for _ in range(5)]
    return LawSamples(codes, comps, preds, functions, fuel=fuel)


def _kleisli(eff: Effect, cf: Code, fuel: int):
    return lambda x: apply(eff, cf, x, fuel)


def _show_pred(mod: Modality, phi) -> str:
    return phi.show(mod.H) if isinstance(phi, Pred) else "<fn>"


# -- separators ---------------------------------------------------------------

@dataclass(frozen=True)
class SeparatorSpec:
    """Codes built from closures, the allowed primitive kinds, and ``extras``.

    A closure belongs when every literal code inside it belongs.
    """

    name: str
    prims: frozenset = frozenset()
    extras: tuple = ()

    def member(self, c: Code) -> bool:
        stack = [c]
        while stack:
            x = stack.pop()
            if isinstance(x, Prim):
                if x.kind not in self.prims and x not in self.extras:
                    return False
            elif isinstance(x, Closure):
                stack.extend(_literals(x.body))
            else:
                return False
        return True

    def generate(self, count: int, seed: int = 0, include_loop: bool = True) -> list[Code]:
        """Primitives, extras and the loop, canonical members, then random closures up to ``count``."""
        from .frame import builder_codes
        from .gen import C_LOOP, Gen, canonical_codes

        out: list[Code] = []
        seen = set()

        def add(c):
            if c not in seen and self.member(c):
                seen.add(c)
                out.append(c)
        # the designated members first, so a small count still covers them
        for k in sorted(self.prims):
            add(Prim(k))
        for c in self.extras:
            add(c)
        if include_loop:
            add(C_LOOP)
        for c in canonical_codes():
            add(c)
        for c in builder_codes():
            add(c)
        g = Gen(seed, prims=sorted(self.prims), extras=list(self.extras))
        tries = 0
        while len(out) < count and tries < 50 * count:
            tries += 1
            add(g.closure(3, max_n=2))
        return out[:count] if len(out) > count else out


def _literals(e):
    stack = [e]
    while stack:
        t = stack.pop()
        if isinstance(t, Lit):
            yield t.code
        elif isinstance(t, App):
            stack.append(t.fun)
            stack.append(t.arg)


def default_separator(effect: Effect) -> SeparatorSpec:
    if effect.name == "cps":
        return pl_separator()
    if effect.name == "power":
        # #fail returns nothing, so it cannot serve as evidence by default
        return SeparatorSpec("default", frozenset(effect.prims - {"fail"}))
    return all_separator(effect)


def all_separator(effect: Effect) -> SeparatorSpec:
    """Every code the effect can build.  For continuations this admits escapes."""
    if isinstance(effect, Cps):
        extras = tuple(Prim("k", 1000 + i, k) for i, k in enumerate(effect.dictionary)
                       if k.default is not HALT and effect.in_pole(k.default))
        return SeparatorSpec("all", frozenset(effect.prims), extras)
    return SeparatorSpec("all", frozenset(effect.prims))


def pl_separator() -> SeparatorSpec:
    """Proof-like codes: closures and ``#cc``, no captured continuations."""
    return SeparatorSpec("pl", frozenset({"cc"}))


def make_separator(effect: Effect, name: str | None) -> SeparatorSpec:
    if name in (None, "default"):
        return default_separator(effect)
    if name == "all":
        return all_separator(effect)
    if name == "pl":
        return pl_separator()
    if name == "pure":
        return SeparatorSpec("pure")
    raise ValueError(f"unknown separator {name!r}; expected all, pl or pure")


def compute(mod: Modality, f: Code, a: Code, fuel: int):
    """``f . a`` for a law check: ``(computation, proven_divergent)``.

    On fuel exhaustion a pure pair is run on the machine; a repeated
    configuration proves divergence, which is the empty computation for the
    set-valued effects.  Otherwise :class:`FuelExhausted` propagates.
    """
    eff = mod.effect
    try:
        return apply(eff, f, a, fuel), False
    except FuelExhausted:
        if isinstance(eff, Partial) and machine.diverges(App(Lit(f), Lit(a)), fuel):
            return eff.empty(), True
        raise


def check_separator_progress(mod: Modality, sep: SeparatorSpec, members: Sequence[Code],
                             fuel: int = 2000) -> Report:
    """``after(c_f . c_a, const bottom) <= bottom`` for every pair of members."""
    rep = Report(f"separator progress ({mod.name}, {sep.name})")
    law = rep.law("progress")
    H, eff = mod.H, mod.effect
    bot = _const_pred(mod, H.bottom)
    proven = 0
    for cf in members:
        for ca in members:
            w = lambda: f"{brief(cf)} . {brief(ca)}"
            try:
                m, diverged = compute(mod, cf, ca, fuel)
                v = mod.after(m, bot)
            except FuelExhausted:
                law.record(Verdict.UNKNOWN)
                continue
            except Stuck:
                law.skipped += 1
                continue
            proven += diverged
            _rec(law, H.leq(v, H.bottom), w, mod.exact)
    if proven:
        rep.notes.append(f"{proven} pair(s) proven divergent by a repeated machine configuration")
    return rep


def _const_pred(mod: Modality, v):
    return Pred.const(v)


def check_pole_consistency(mod: CpsModality, members: Sequence[Code], fuel: int = 2000) -> Report:
    """Every proof-like computation ``e . c`` has a dictionary continuation answering outside the pole."""
    rep = Report(f"pole consistency ({mod.name})")
    law = rep.law("some continuation escapes the pole")
    eff = mod.effect
    for e in members:
        for c in members[:8]:
            try:
                m = apply(eff, e, c, fuel)
                ok = any(not eff.in_pole(m(k)) for k in eff.dictionary)
            except FuelExhausted:
                law.record(Verdict.UNKNOWN)
                continue
            law.check(ok, lambda: f"{brief(e)} . {brief(c)}")
    return rep
