"""Propositions over codes, evidence, and the evidenced-frame law suite.

``phi <=e psi`` holds when every code ``c`` satisfies
``phi(c) <= after(e . c, psi)``.  That quantifier ranges over all codes, so
each verdict says how it was decided: ``exact`` when the left proposition
has a finite support with a bottom default (or the evidence ignores its
argument), ``sampled`` when only probe codes were tried.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import Effect, FuelExhausted, Stuck, apply
from .effects import P1, P2, church
from .modality import Modality, Pred, SeparatorSpec, compute, make_modality, make_separator
from .order import Heyting
from .report import Report, Verdict
from .syntax import App, Closure, Code, Lit, Var, brief, code_order, scope_check, show_code


# -- propositions -------------------------------------------------------------

class Prop:
    pass


@dataclass(frozen=True)
class Base(Prop, Pred):
    """Finite support plus a default value."""

    @classmethod
    def of(cls, table: dict, default) -> "Base":
        return cls(tuple(sorted(table.items(), key=lambda kv: code_order(kv[0]))), default)


@dataclass(frozen=True)
class TopP(Prop):
    pass


@dataclass(frozen=True)
class BotP(Prop):
    pass


@dataclass(frozen=True)
class Conj(Prop):
    p1: Prop
    p2: Prop


@dataclass(frozen=True)
class UImpl(Prop):
    """``p`` implies every member of ``family``, uniformly."""

    p: Prop
    family: tuple = ()


def show_prop(p: Prop, H: Heyting) -> str:
    if isinstance(p, Base):
        return p.show(H)
    if isinstance(p, TopP):
        return "top"
    if isinstance(p, BotP):
        return "bot"
    if isinstance(p, Conj):
        return f"conj({show_prop(p.p1, H)}, {show_prop(p.p2, H)})"
    fam = ", ".join(show_prop(q, H) for q in p.family)
    return f"uimpl({show_prop(p.p, H)}, [{fam}])"


def base_nodes(p: Prop) -> list[Base]:
    out, stack = [], [p]
    while stack:
        q = stack.pop()
        if isinstance(q, Base):
            out.append(q)
        elif isinstance(q, Conj):
            stack += [q.p1, q.p2]
        elif isinstance(q, UImpl):
            stack.append(q.p)
            stack += list(q.family)
    return out


# -- evidence builders --------------------------------------------------------

def _c(n: int, body) -> Closure:
    return Closure(n, body)


def ev_id() -> Closure:
    return _c(0, Var(0))


def ev_top() -> Closure:
    return ev_id()


def ev_comp(e1: Code, e2: Code) -> Closure:
    """Run ``e1``, then ``e2`` on its result."""
    return _c(0, App(Lit(e2), App(Lit(e1), Var(0))))


def ev_pair(e1: Code, e2: Code) -> Closure:
    return _c(1, App(App(Var(1), App(Lit(e1), Var(0))), App(Lit(e2), Var(0))))


def ev_fst() -> Closure:
    return _c(0, App(Var(0), Lit(P1)))


def ev_snd() -> Closure:
    return _c(0, App(Var(0), Lit(P2)))


_TUPLE2 = Closure(2, App(App(Var(2), Var(0)), Var(1)))


def ev_curry(e: Code) -> Closure:
    return _c(1, App(Lit(e), App(App(Lit(_TUPLE2), Var(0)), Var(1))))


def ev_uncurry(e: Code) -> Closure:
    return _c(0, App(App(Lit(e), App(Var(0), Lit(P1))), App(Var(0), Lit(P2))))


def ev_eval() -> Closure:
    return _c(0, App(App(Lit(ev_id()), App(Var(0), Lit(P1))), App(Var(0), Lit(P2))))


def tuple_code(c1: Code, c2: Code) -> Closure:
    """``<0|0 c1 c2>``, the pair a conjunction realizer is probed with."""
    return _c(0, App(App(Var(0), Lit(c1)), Lit(c2)))


def builder_codes() -> list[Code]:
    i = ev_id()
    return [i, ev_fst(), ev_snd(), ev_eval(), ev_comp(i, i), ev_pair(i, i),
            ev_curry(i), ev_uncurry(i)]


def canonical_probes() -> list[Code]:
    return [P1, P2, church(0), church(1), church(2), church(3), ev_id()]


# -- cores --------------------------------------------------------------------

@dataclass
class Core:
    """Effect, modality, separator and the checking budget."""

    effect: Effect
    modality: Modality
    separator: SeparatorSpec
    fuel: int = 2000
    probes: tuple = ()
    timeout_as_bottom: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def H(self) -> Heyting:
        return self.modality.H

    @property
    def name(self) -> str:
        return f"{self.modality.name}/{self.separator.name}"


def make_core(effect: Effect, modality: str | None = None, separator: str | None = None,
              fuel: int = 2000, probes: Sequence[Code] = ()) -> Core:
    mod = make_modality(effect, modality)
    return Core(effect, mod, make_separator(effect, separator), fuel, tuple(probes),
                getattr(effect, "timeout_as_bottom", False))


def _apply(core: Core, f: Code, a: Code):
    key = ("apply", f, a)
    m = core._cache.get(key)
    if m is None:
        m = core._cache[key] = compute(core.modality, f, a, core.fuel)[0]
    return m


def _value(core: Core, p: Prop, c: Code):
    """``(truth value, exact)`` of ``p`` at ``c``."""
    key = (p, c)
    hit = core._cache.get(key)
    if hit is not None:
        return hit
    H, mod = core.H, core.modality
    if isinstance(p, Base):
        out = (p(c), True)
    elif isinstance(p, TopP):
        out = (H.top, True)
    elif isinstance(p, BotP):
        out = (H.bottom, True)
    elif isinstance(p, Conj):
        exact = [True]
        a1 = mod.after(_apply(core, c, P1), _tracking(core, p.p1, exact))
        a2 = mod.after(_apply(core, c, P2), _tracking(core, p.p2, exact))
        out = (H.meet(a1, a2), exact[0] and mod.exact)
    elif isinstance(p, UImpl):
        exact = [mod.exact]
        if isinstance(p.p, BotP):
            dom: list = []
        elif isinstance(p.p, Base) and H.leq(p.p.default, H.bottom):
            dom = p.p.keys()
        else:
            dom = _probe_codes(core, [p])
            exact[0] = False
        v = H.top
        for psi in p.family:
            for a in dom:
                lhs, ex = _value(core, p.p, a)
                exact[0] &= ex
                v = H.meet(v, H.impl(lhs, mod.after(_apply(core, c, a), _tracking(core, psi, exact))))
        out = (v, exact[0])
    else:
        raise TypeError(f"not a proposition: {p!r}")
    core._cache[key] = out
    return out


def _tracking(core: Core, p: Prop, flag: list):
    if isinstance(p, Base):
        return p

    def phi(x):
        v, ex = _value(core, p, x)
        if not ex:
            flag[0] = False
        return v
    # codes a modality may range over when it cannot enumerate all of them
    phi.keys = lambda: _probe_codes(core, [p])
    return phi


def prop_eval(core: Core, p: Prop, c: Code):
    """Truth value of ``p`` at ``c``."""
    return _value(core, p, c)[0]


def _probe_codes(core: Core, props: Iterable[Prop], extra: Iterable[Code] = ()) -> list[Code]:
    seen: dict = {}
    supp: list[Code] = []
    for p in props:
        for b in base_nodes(p):
            supp += b.keys()
    for c in supp:
        seen.setdefault(c, None)
    for c1 in supp[:6]:
        for c2 in supp[:6]:
            seen.setdefault(tuple_code(c1, c2), None)
    for c in canonical_probes():
        seen.setdefault(c, None)
    for c in list(core.probes) + list(extra):
        seen.setdefault(c, None)
    return list(seen)


@dataclass(frozen=True)
class EvidenceResult:
    verdict: Verdict
    witness: Code | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict.ok


def _upper_bound(core: Core, p: Prop):
    H = core.H
    if isinstance(p, BotP):
        return H.bottom
    if isinstance(p, Base):
        return H.join(H.sup(v for _, v in p.support), p.default)
    return H.top


def _ignores_argument(e: Code) -> bool:
    return isinstance(e, Closure) and e.n == 0 and scope_check(e.body, 0)


def check_evidence(core: Core, p1: Prop, e: Code, p2: Prop,
                   probes: Iterable[Code] = (), unsafe: bool = False) -> EvidenceResult:
    """Decide ``p1 <=e p2``.

    ``e`` must belong to the core's separator unless ``unsafe`` is set.
    """
    if not unsafe and not core.separator.member(e):
        raise ValueError(f"{brief(e)} is not in the {core.separator.name} separator")
    H = core.H
    try:
        if isinstance(p1, BotP):
            return EvidenceResult(Verdict.EXACT)
        if isinstance(p1, Base) and H.leq(p1.default, H.bottom):
            return _check_points(core, p1, e, p2, p1.keys(), exact=True)
        if _ignores_argument(e):
            hi = _upper_bound(core, p1)
            v, ex = _value_after(core, e, P1, p2)
            if H.leq(hi, v):
                return EvidenceResult(Verdict.EXACT if ex else Verdict.SAMPLED)
            if isinstance(p1, (Base, TopP)):
                # some code reaches the upper bound, and every code gets the same value
                wit = _reaching(core, p1, hi)
                return EvidenceResult(Verdict.FAIL, wit, "argument-independent evidence")
        return _check_points(core, p1, e, p2, _probe_codes(core, [p1, p2], probes), exact=False)
    except FuelExhausted:
        return EvidenceResult(Verdict.UNKNOWN, None, "out of fuel")
    except Stuck as exc:
        return EvidenceResult(Verdict.UNKNOWN, None, str(exc))


def check_evidence_unsafe(core: Core, p1: Prop, e: Code, p2: Prop,
                          probes: Iterable[Code] = ()) -> EvidenceResult:
    """:func:`check_evidence` for arbitrary codes, outside the separator."""
    return check_evidence(core, p1, e, p2, probes, unsafe=True)


def _reaching(core: Core, p: Prop, hi) -> Code:
    if isinstance(p, Base):
        for k, v in p.support:
            if core.H.equiv(v, hi):
                return k
    for c in canonical_probes():
        if not isinstance(p, Base) or p(c) == p.default:
            return c
    return P1


def _value_after(core: Core, e: Code, c: Code, p2: Prop):
    flag = [core.modality.exact]
    v = core.modality.after(_apply(core, e, c), _tracking(core, p2, flag))
    return v, flag[0]


def _check_points(core, p1, e, p2, points, exact: bool) -> EvidenceResult:
    H = core.H
    all_exact = exact
    for c in points:
        lhs, ex1 = _value(core, p1, c)
        if H.leq(lhs, H.bottom):
            continue
        rhs, ex2 = _value_after(core, e, c, p2)
        if not H.leq(lhs, rhs):
            return EvidenceResult(Verdict.FAIL, c)
        all_exact = all_exact and ex1 and ex2
    return EvidenceResult(Verdict.EXACT if all_exact else Verdict.SAMPLED)


# -- law suite ----------------------------------------------------------------

class _Sampler:
    def __init__(self, core: Core, seed: int, members: Sequence[Code]):
        self.core = core
        self.rng = random.Random(seed)
        self.members = list(members)
        self.elements = core.H.elements()
        self.pool = canonical_probes() + self.members[:12]

    def value(self, nonbottom=False):
        H = self.core.H
        xs = [v for v in self.elements if not (nonbottom and H.leq(v, H.bottom))] or self.elements
        return self.rng.choice(xs)

    def base(self, default=None, size=None) -> Base:
        size = self.rng.randint(1, 3) if size is None else size
        keys = self.rng.sample(self.pool, min(size, len(self.pool)))
        table = {k: self.value(nonbottom=True) for k in keys}
        d = self.core.H.bottom if default is None else default
        return Base.of(table, d)

    def any_base(self) -> Base:
        return self.base(default=self.value())

    def evidence(self) -> Code:
        return self.rng.choice(self.members)

    def family(self) -> list[Base]:
        return [self.any_base() for _ in range(self.rng.randint(1, 3))]


def _results(core: Core, e: Code, c: Code) -> frozenset:
    return core.effect.results(_apply(core, e, c))


def _raise_on(core: Core, b: Base, codes: Iterable[Code]) -> Base:
    """``b`` with every code in ``codes`` raised to top."""
    table = dict(b.support)
    for x in codes:
        table[x] = core.H.top
    return Base.of(table, b.default)


def _repair(core: Core, lhs: Prop, e: Code, rhs: Base, points: Iterable[Code]) -> Base:
    out = set()
    for c in points:
        v, _ = _value(core, lhs, c)
        if not core.H.leq(v, core.H.bottom):
            out |= _results(core, e, c)
    return _raise_on(core, rhs, out)


def _record(t, res: EvidenceResult, witness: str):
    if res.verdict is Verdict.FAIL:
        base = witness() if callable(witness) else witness
        witness = f"{base} at {brief(res.witness)}" if res.witness is not None else base
    t.record(res.verdict, witness)


def _premise(res: EvidenceResult) -> bool:
    return res.verdict.ok


def check_ef_laws(core: Core, instances: int = 100, seed: int = 0,
                  members: Sequence[Code] | None = None) -> Report:
    """Every row of the evidenced-frame table plus the uncurrying lemma.

    Premises are made true by raising the right-hand base proposition to top
    on the codes the evidence produces; an instance whose premise still
    fails is skipped and counted.  Sampling continues (up to three times
    ``instances`` rounds) until every row has ``instances`` verdicts.
    """
    H = core.H
    members = list(members) if members is not None else core.separator.generate(
        40, seed, include_loop=False)
    smp = _Sampler(core, seed, members)
    rep = Report(f"evidenced frame ({core.name})")
    rows = {name: rep.law(name) for name in (
        "reflexivity", "transitivity", "top", "conj-intro", "conj-elim1", "conj-elim2",
        "uimpl-intro", "uimpl-elim", "uimpl-uncurry")}

    def show(p):
        return show_prop(p, H)

    def short():
        return min(t.passed + t.failed + t.unknown for t in rows.values()) < instances

    rounds = 0
    while rounds < 3 * instances and (rounds < instances or short()):
        rounds += 1
        try:
            phi = smp.base()
            r = check_evidence(core, phi, ev_id(), phi)
            _record(rows["reflexivity"], r, lambda: f"phi={show(phi)}")

            r = check_evidence(core, smp.any_base(), ev_top(), TopP())
            _record(rows["top"], r, "phi")

            # transitivity
            e1, e2 = smp.evidence(), smp.evidence()
            p1 = smp.base()
            p2 = _repair(core, p1, e1, smp.base(), p1.keys())
            p3 = _repair(core, p2, e2, smp.any_base(), p2.keys())
            pre = [check_evidence(core, p1, e1, p2), check_evidence(core, p2, e2, p3)]
            if all(map(_premise, pre)):
                r = check_evidence(core, p1, ev_comp(e1, e2), p3)
                _record(rows["transitivity"], r,
                        lambda: f"e1={brief(e1)} e2={brief(e2)} p1={show(p1)}")
            else:
                rows["transitivity"].skipped += 1

            # conjunction intro and eliminations
            phi = smp.base()
            e1, e2 = smp.evidence(), smp.evidence()
            q1 = _repair(core, phi, e1, smp.any_base(), phi.keys())
            q2 = _repair(core, phi, e2, smp.any_base(), phi.keys())
            if _premise(check_evidence(core, phi, e1, q1)) and _premise(check_evidence(core, phi, e2, q2)):
                r = check_evidence(core, phi, ev_pair(e1, e2), Conj(q1, q2))
                _record(rows["conj-intro"], r, lambda: f"e1={brief(e1)} e2={brief(e2)}")
            else:
                rows["conj-intro"].skipped += 1
            a, b = smp.any_base(), smp.any_base()
            _record(rows["conj-elim1"], check_evidence(core, Conj(a, b), ev_fst(), a), show(a))
            _record(rows["conj-elim2"], check_evidence(core, Conj(a, b), ev_snd(), b), show(b))

            # universal implication intro
            p1, p2, e = smp.base(), smp.base(), smp.evidence()
            fam = smp.family()
            conj = Conj(p1, p2)
            pts = [tuple_code(c1, c2) for c1 in p1.keys() for c2 in p2.keys()]
            fam = tuple(_repair(core, conj, e, q, pts) for q in fam)
            if all(_premise(check_evidence(core, conj, e, q, probes=pts)) for q in fam):
                r = check_evidence(core, p1, ev_curry(e), UImpl(p2, fam))
                _record(rows["uimpl-intro"], r, lambda: f"e={brief(e)}")
            else:
                rows["uimpl-intro"].skipped += 1

            # universal implication elim (no premise)
            p1, fam = smp.base(), tuple(smp.family())
            left = Conj(UImpl(p1, fam), p1)
            for q in fam:
                _record(rows["uimpl-elim"], check_evidence(core, left, ev_eval(), q),
                        f"p1={show(p1)} q={show(q)}")

            # uncurrying lemma
            p1, p2, e = smp.base(), smp.base(), smp.evidence()
            fam = smp.family()
            mids = set()
            for c in p1.keys():
                for x in _results(core, e, c):
                    for a in p2.keys():
                        mids |= _results(core, x, a)
            fam = tuple(_raise_on(core, q, mids) for q in fam)
            if _premise(check_evidence(core, p1, e, UImpl(p2, fam))):
                pts = [tuple_code(c1, c2) for c1 in p1.keys() for c2 in p2.keys()]
                for q in fam:
                    r = check_evidence(core, Conj(p1, p2), ev_uncurry(e), q, probes=pts)
                    _record(rows["uimpl-uncurry"], r, lambda: f"e={brief(e)}")
            else:
                rows["uimpl-uncurry"].skipped += 1
        except FuelExhausted:
            rep.notes.append("an instance ran out of fuel while sampling")
    return rep


def check_consistency(core: Core, budget: int = 200, seed: int = 0,
                      members: Sequence[Code] | None = None) -> Report:
    """No member of the separator may be evidence for ``top <= bot``."""
    rep = Report(f"consistency ({core.name})")
    law = rep.law("no evidence of top <= bot")
    H = core.H
    if H.leq(H.top, H.bottom):
        rep.notes.append("the truth-value algebra is trivial; nothing to check")
        return rep
    members = list(members) if members is not None else core.separator.generate(budget, seed)
    for e in members[:budget]:
        r = check_evidence(core, TopP(), e, BotP())
        if r.verdict is Verdict.UNKNOWN:
            law.record(Verdict.UNKNOWN)
        elif r.ok:
            law.record(Verdict.FAIL, lambda: f"{brief(e)} certifies top <= bot ({r.verdict.value})")
        else:
            law.record(Verdict.EXACT)
    return rep


# -- tripos -------------------------------------------------------------------

def combine(results: Iterable[EvidenceResult]) -> EvidenceResult:
    worst = EvidenceResult(Verdict.EXACT)
    for r in results:
        if r.verdict is Verdict.FAIL:
            return r
        if r.verdict is Verdict.UNKNOWN or (r.verdict is Verdict.SAMPLED and worst.verdict is Verdict.EXACT):
            worst = r
    return worst


def tripos_leq(core: Core, phi: Mapping, psi: Mapping, e: Code,
               probes: Iterable[Code] = ()) -> EvidenceResult:
    """One evidence ``e`` for ``phi(i) <= psi(i)`` at every index ``i``."""
    if set(phi) != set(psi):
        raise ValueError("families are indexed by different sets")
    probes = list(probes)
    return combine(check_evidence(core, phi[i], e, psi[i], probes) for i in phi)


def reindex(f: Mapping, phi: Mapping) -> dict:
    """Pull ``phi : I -> Prop`` back along ``f : J -> I``."""
    return {j: phi[i] for j, i in f.items()}


def check_tripos_laws(core: Core, instances: int = 50, seed: int = 0,
                      members: Sequence[Code] | None = None) -> Report:
    """Preorder and reindexing laws for families ``I -> Prop`` with ``|I| <= 4``."""
    members = list(members) if members is not None else core.separator.generate(
        40, seed, include_loop=False)
    smp = _Sampler(core, seed, members)
    rng = smp.rng
    rep = Report(f"tripos ({core.name})")
    refl, trans = rep.law("reflexivity via ev_id"), rep.law("transitivity via ev_comp")
    ident, comp = rep.law("reindex along identity"), rep.law("reindex along a composite")
    mono = rep.law("reindexing keeps evidence")
    H = core.H

    def show(fam):
        return "{" + ", ".join(f"{i}: {show_prop(p, H)}" for i, p in fam.items()) + "}"

    rounds = 0
    while rounds < 3 * instances and (
            rounds < instances or min(t.passed + t.failed for t in rep.laws.values()) < instances):
        rounds += 1
        idx = list(range(rng.randint(1, 4)))
        try:
            phi = {i: smp.base() for i in idx}
            r = tripos_leq(core, phi, phi, ev_id())
            _record(refl, r, lambda: show(phi))

            e1, e2 = smp.evidence(), smp.evidence()
            psi = {i: _repair(core, phi[i], e1, smp.base(), phi[i].keys()) for i in idx}
            chi = {i: _repair(core, psi[i], e2, smp.any_base(), psi[i].keys()) for i in idx}
            r1, r2 = tripos_leq(core, phi, psi, e1), tripos_leq(core, psi, chi, e2)
            if r1.ok and r2.ok:
                r = tripos_leq(core, phi, chi, ev_comp(e1, e2))
                _record(trans, r, lambda: f"e1={brief(e1)} e2={brief(e2)} phi={show(phi)}")
            else:
                trans.skipped += 1

            # reindexing: J -> I and K -> J
            J = list(range(rng.randint(1, 4)))
            K = list(range(rng.randint(1, 4)))
            f = {j: rng.choice(idx) for j in J}
            g = {k: rng.choice(J) for k in K}
            ident.check(reindex({i: i for i in idx}, phi) == phi, show(phi))
            fg = {k: f[g[k]] for k in K}
            comp.check(reindex(fg, phi) == reindex(g, reindex(f, phi)), show(phi))
            if r1.ok:
                r = tripos_leq(core, reindex(f, phi), reindex(f, psi), e1)
                _record(mono, r, lambda: f"e1={brief(e1)} phi={show(phi)}")
        except FuelExhausted:
            rep.notes.append("an instance ran out of fuel while sampling")
    return rep
