"""Finite complete Heyting prealgebras.

Only ``leq`` is trusted; two values are interchangeable when each is below
the other.  Instances: the two-point algebra of booleans, upper sets of a
finite preorder (Alexandrov implication), and state predicates, the upper
sets of a chain of probe states.
"""
from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Sequence

from .report import Report


class Heyting:
    top: object
    bottom: object
    name = "heyting"

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def join(self, a, b):
        raise NotImplementedError

    def impl(self, a, b):
        raise NotImplementedError

    def elements(self) -> list:
        raise NotImplementedError

    def equiv(self, a, b) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    def inf(self, xs: Iterable):
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    def sup(self, xs: Iterable):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def show(self, a) -> str:
        return repr(a)

    def __repr__(self):
        return f"{type(self).__name__}()"


class TwoPoint(Heyting):
    """Truth values ``False < True``."""

    name = "two-point"
    top = True
    bottom = False

    def leq(self, a, b):
        return (not a) or bool(b)

    def meet(self, a, b):
        return bool(a and b)

    def join(self, a, b):
        return bool(a or b)

    def impl(self, a, b):
        return (not a) or bool(b)

    def elements(self):
        return [False, True]

    def show(self, a):
        return "top" if a else "bot"


class BrokenImpl(TwoPoint):
    """``impl(a, b) = b``: residuation fails.  Negative control only."""

    name = "broken"

    def impl(self, a, b):
        return bool(b)


class Preorder:
    """Reflexive-transitive closure of a finite relation."""

    def __init__(self, points: Iterable[Hashable], covers: Iterable[tuple] = ()):
        self.points = tuple(dict.fromkeys(points))
        idx = set(self.points)
        up = {p: {p} for p in self.points}
        for a, b in covers:
            if a not in idx or b not in idx:
                raise ValueError(f"covering pair ({a}, {b}) names an unknown point")
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for p in self.points:
                reach = set().union(*(up[q] for q in up[p]))
                if reach != up[p]:
                    up[p] = reach
                    changed = True
        self._up = {p: frozenset(s) for p, s in up.items()}

    def le(self, a, b) -> bool:
        return b in self._up[a]

    def above(self, a) -> frozenset:
        return self._up[a]

    @classmethod
    def chain(cls, points: Sequence) -> "Preorder":
        return cls(points, zip(points, points[1:]))


class UpperSets(Heyting):
    """Upward-closed subsets ordered by inclusion."""

    name = "upper-sets"

    def __init__(self, poset: Preorder):
        self.poset = poset
        self.top = frozenset(poset.points)
        self.bottom = frozenset()

    def is_upper(self, u) -> bool:
        return all(self.poset.above(p) <= u for p in u)

    def close(self, xs: Iterable) -> frozenset:
        """Smallest upper set containing ``xs``."""
        return frozenset().union(*(self.poset.above(p) for p in xs))

    def leq(self, a, b):
        return a <= b

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    def impl(self, a, b):
        return frozenset(p for p in self.poset.points
                         if all(q in b for q in self.poset.above(p) if q in a))

    def elements(self):
        pts = self.poset.points
        out = set()
        for r in range(len(pts) + 1):
            for combo in itertools.combinations(pts, r):
                u = frozenset(combo)
                if self.is_upper(u):
                    out.add(u)
        return sorted(out, key=lambda u: (len(u), sorted(map(str, u))))

    def show(self, a):
        return "up(" + " ".join(str(p) for p in self.poset.points if p in a) + ")"


class StatePred(UpperSets):
    """Future-stable predicates on the counter states.

    Elements are upper sets of the probe chain.  A state above the largest
    probe inherits that probe's truth value, which keeps every predicate
    monotone on all naturals.
    """

    name = "state-pred"

    def __init__(self, states: Sequence[int] = range(9)):
        self.states = tuple(sorted(set(states)))
        super().__init__(Preorder.chain(self.states))

    def holds(self, u, s: int) -> bool:
        below = [p for p in self.states if p <= s]
        return bool(below) and below[-1] in u

    def at_least(self, n: int) -> frozenset:
        """The predicate "counter is at least ``n``"."""
        return frozenset(p for p in self.states if p >= n)

    def from_fn(self, f) -> frozenset:
        u = frozenset(p for p in self.states if f(p))
        if not self.is_upper(u):
            raise ValueError("predicate is not future-stable")
        return u

    def elements(self):
        return [frozenset(self.states[i:]) for i in range(len(self.states), -1, -1)]


def check_heyting_laws(H: Heyting, elements: Sequence | None = None) -> Report:
    """Exhaustive check of the prealgebra axioms over ``elements``."""
    xs = list(H.elements() if elements is None else elements)
    rep = Report(f"heyting laws ({H.name})")
    refl, trans = rep.law("reflexivity"), rep.law("transitivity")
    glb, lub = rep.law("meet is a greatest lower bound"), rep.law("join is a least upper bound")
    bounds, resid = rep.law("bottom <= a <= top"), rep.law("meet(a,b) <= c iff a <= impl(b,c)")
    empty = rep.law("inf [] = top")
    empty.check(H.equiv(H.inf([]), H.top))
    for a in xs:
        refl.check(H.leq(a, a), H.show(a))
        bounds.check(H.leq(H.bottom, a) and H.leq(a, H.top), H.show(a))
        for b in xs:
            m, j = H.meet(a, b), H.join(a, b)
            glb.check(H.leq(m, a) and H.leq(m, b), f"{H.show(a)}, {H.show(b)}")
            lub.check(H.leq(a, j) and H.leq(b, j), f"{H.show(a)}, {H.show(b)}")
            for c in xs:
                w = f"{H.show(a)}, {H.show(b)}, {H.show(c)}"
                if H.leq(a, b) and H.leq(b, c):
                    trans.check(H.leq(a, c), w)
                if H.leq(c, a) and H.leq(c, b):
                    glb.check(H.leq(c, m), w)
                if H.leq(a, c) and H.leq(b, c):
                    lub.check(H.leq(j, c), w)
                resid.check(H.leq(H.meet(a, b), c) == H.leq(a, H.impl(b, c)), w)
    return rep
