"""Assemblies over an evidenced frame and their tracked morphisms.

An assembly is a finite set of labels; each label ``x`` is realized by a
proposition and carries evidence that ``top`` entails it.  A morphism is a
label function together with one tracker that turns realizers of ``x`` into
realizers of ``f(x)`` for every ``x``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .algebra import FuelExhausted, Stuck
from .effects import State
from .frame import (Base, Core, Prop, TopP, _apply, _results, check_evidence, ev_comp, ev_id,
                    show_prop)
from .report import Report, Verdict
from .syntax import Closure, Code, Lit, brief


@dataclass(frozen=True)
class Assembly:
    name: str
    carrier: tuple
    realizes: Mapping[Hashable, Prop]
    witness: Mapping[Hashable, Code]

    def __post_init__(self):
        for x in self.carrier:
            if x not in self.realizes or x not in self.witness:
                raise ValueError(f"label {x!r} of {self.name} lacks a realizer or witness")


@dataclass(frozen=True)
class AsmMorphism:
    name: str
    source: Assembly
    target: Assembly
    mapping: Mapping[Hashable, Hashable]
    tracker: Code

    def __post_init__(self):
        for x in self.source.carrier:
            if self.mapping.get(x) not in self.target.carrier:
                raise ValueError(f"{self.name} sends {x!r} outside {self.target.name}")

    def __call__(self, x):
        return self.mapping[x]


def _evidence(core: Core, rep: Report, label, p1, e, p2, what: str) -> None:
    law = rep.law(f"label {label}")
    if not core.separator.member(e):
        law.record(Verdict.FAIL, f"{what} {brief(e)} is not in the separator")
        return
    r = check_evidence(core, p1, e, p2)
    if r.verdict is Verdict.FAIL:
        law.record(Verdict.FAIL, f"{what} fails at {brief(r.witness)}" if r.witness is not None
                   else f"{what} fails")
    else:
        law.record(r.verdict)


def check_assembly(core: Core, X: Assembly) -> Report:
    """``top <=w realizes(x)`` for every label, with ``w`` the label's witness."""
    rep = Report(f"assembly {X.name} ({core.name})")
    for x in X.carrier:
        _evidence(core, rep, x, TopP(), X.witness[x], X.realizes[x], "witness")
    return rep


def check_morphism(core: Core, f: AsmMorphism) -> Report:
    """``realizes_X(x) <=t realizes_Y(f x)`` for every label, ``t`` the tracker."""
    X, Y = f.source, f.target
    rep = Report(f"morphism {f.name}: {X.name} -> {Y.name} ({core.name})")
    for x in X.carrier:
        _evidence(core, rep, x, X.realizes[x], f.tracker, Y.realizes[f(x)], "tracker")
    return rep


def identity(X: Assembly) -> AsmMorphism:
    return AsmMorphism(f"id_{X.name}", X, X, {x: x for x in X.carrier}, ev_id())


def compose(f: AsmMorphism, g: AsmMorphism) -> AsmMorphism:
    """``f . g``: run ``g`` first.  Tracked by ``ev_comp(g.tracker, f.tracker)``."""
    if g.target != f.source:
        raise ValueError(f"cannot compose {f.name} after {g.name}: "
                         f"{g.target.name} is not {f.source.name}")
    mapping = {x: f(g(x)) for x in g.source.carrier}
    return AsmMorphism(f"{f.name}.{g.name}", g.source, f.target, mapping,
                       ev_comp(g.tracker, f.tracker))


def show_assembly(core: Core, X: Assembly) -> str:
    lines = [f"assembly {X.name}"]
    for x in X.carrier:
        lines.append(f"  {x}: {show_prop(X.realizes[x], core.H)} witness {brief(X.witness[x])}")
    return "\n".join(lines)


# -- generation ---------------------------------------------------------------

def _const(r: Code) -> Closure:
    return Closure(0, Lit(r))


class AssemblyGen:
    """Seeded assemblies whose witnesses and trackers are built to pass."""

    def __init__(self, core: Core, seed: int = 0, members: Sequence[Code] | None = None):
        self.core = core
        self.rng = random.Random(seed)
        self.members = list(members) if members is not None else core.separator.generate(
            30, seed, include_loop=False)
        self.pool = [c for c in self.members if isinstance(c, Closure)][:20]
        self.count = 0

    def _name(self, stem: str) -> str:
        self.count += 1
        return f"{stem}{self.count}"

    def _values(self):
        H = self.core.H
        return [v for v in H.elements() if not H.leq(v, H.bottom)]

    def realizer(self, extra: Sequence[Code] = ()) -> tuple[Base, Code]:
        """A base proposition with a top-valued code ``r`` and the witness ``<0|r>``."""
        H = self.core.H
        keys = self.rng.sample(self.pool, self.rng.randint(1, 3))
        table = {k: self.rng.choice(self._values()) for k in keys}
        for c in extra:
            table[c] = H.top
        r = keys[0]
        table[r] = H.top
        return Base.of(table, H.bottom), _const(r)

    def assembly(self, size: int | None = None) -> Assembly:
        size = self.rng.randint(1, 5) if size is None else size
        name = self._name("X")
        carrier = tuple(f"{name}.{i}" for i in range(size))
        real, wit = {}, {}
        for x in carrier:
            real[x], wit[x] = self.realizer()
        return Assembly(name, carrier, real, wit)

    def morphism(self, X: Assembly, size: int | None = None) -> AsmMorphism:
        """A fresh target and a tracked map out of ``X``.

        The tracker is a separator member; each target realizer is raised to
        top on the codes the tracker produces from the matching source realizers.
        """
        size = self.rng.randint(1, 5) if size is None else size
        name = self._name("Y")
        carrier = tuple(f"{name}.{i}" for i in range(size))
        mapping = {x: self.rng.choice(carrier) for x in X.carrier}
        for _ in range(20):
            tracker = self.rng.choice(self.members)
            try:
                outs = {y: set() for y in carrier}
                pairs = [(x, c) for x in X.carrier for c in X.realizes[x].keys()]
                if not all(self._state_blind(tracker, c) for _, c in pairs):
                    continue
                for x, c in pairs:
                    outs[mapping[x]] |= _results(self.core, tracker, c)
            except (FuelExhausted, Stuck):
                continue
            if all(outs[mapping[x]] for x in X.carrier):
                break
        else:
            tracker = ev_id()
            outs = {y: set() for y in carrier}
            for x in X.carrier:
                outs[mapping[x]] |= set(X.realizes[x].keys())
        real, wit = {}, {}
        for y in carrier:
            real[y], wit[y] = self.realizer(sorted(outs[y], key=lambda c: c._h))
        Y = Assembly(name, carrier, real, wit)
        return AsmMorphism(self._name("f"), X, Y, mapping, tracker)

    def _state_blind(self, tracker: Code, c: Code) -> bool:
        """The tracker returns the same codes from every probe state.

        Trackers are only checked at the probe states; one that reads the
        state can look fine there and still fail after a composite has moved
        the counter past the last probe.
        """
        eff = self.core.effect
        if not isinstance(eff, State):
            return True
        m = _apply(self.core, tracker, c)
        fibers = {frozenset(x for _, x in m(s)) for s in eff.probe_states}
        return len(fibers) <= 1

    def broken(self, f: AsmMorphism) -> AsmMorphism:
        """``f`` with a tracker that answers a code outside every target realizer."""
        used = {c for y in f.target.carrier for c in f.target.realizes[y].keys()}
        junk = next(c for c in [Closure(0, Lit(_const(_const(ev_id()))))] + self.members
                    if c not in used)
        return AsmMorphism(f"{f.name}!", f.source, f.target, f.mapping, _const(junk))


def check_assembly_laws(core: Core, count: int = 50, seed: int = 0) -> Report:
    """Identity and composition tracking on generated assemblies, plus broken controls."""
    gen = AssemblyGen(core, seed)
    rep = Report(f"assemblies ({core.name})")
    valid = rep.law("generated assemblies are valid")
    ident = rep.law("identity is tracked by ev_id")
    comp = rep.law("composite is tracked by ev_comp")
    unit = rep.law("unit laws on label functions")
    assoc = rep.law("associativity on label functions")
    control = rep.law("broken tracker is rejected")
    for _ in range(count):
        X = gen.assembly()
        f = gen.morphism(X)
        g = gen.morphism(f.target)
        h = gen.morphism(g.target)
        for A in (X, f.target, g.target):
            r = check_assembly(core, A)
            valid.record(r.verdict, r.failing())
        r = check_morphism(core, identity(X))
        ident.record(r.verdict, r.failing())
        gf = compose(g, f)
        if check_morphism(core, f).ok and check_morphism(core, g).ok:
            r = check_morphism(core, gf)
            comp.record(r.verdict, r.failing())
        else:
            comp.skipped += 1
        unit.check(dict(compose(identity(f.target), f).mapping) == dict(f.mapping)
                   and dict(compose(f, identity(X)).mapping) == dict(f.mapping), f.name)
        assoc.check(dict(compose(h, gf).mapping) == dict(compose(compose(h, g), f).mapping), h.name)
        bad = gen.broken(f)
        r = check_morphism(core, bad)
        w = r.failing()
        control.check(r.verdict is Verdict.FAIL and w is not None and w.startswith("label "), bad.name)
    return rep
