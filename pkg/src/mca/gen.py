"""Seeded generators for expressions, closures and codes."""
from __future__ import annotations

import random
from typing import Iterable, Sequence

from .algebra import I, K, S, k1, s1
from .effects import P1, P2, church
from .syntax import App, Closure, Code, Expr, Lit, Prim, Var

C_LOOP = Closure(0, App(Lit(Closure(0, App(Var(0), Var(0)))), Lit(Closure(0, App(Var(0), Var(0))))))


def canonical_codes() -> list[Code]:
    """Small pure codes every sample pool starts from."""
    return [I, K, S, P1, P2, church(0), church(1), church(2), church(3), k1(I), s1(K)]


class Gen:
    """Random syntax over a pool of codes and primitives.

    Every choice goes through one ``random.Random`` so a seed fixes the
    whole sample stream.
    """

    def __init__(self, seed: int = 0, prims: Iterable[str] = (),
                 extras: Sequence[Code] = (), pool: Sequence[Code] | None = None):
        self.rng = random.Random(seed)
        self.prims = [Prim(k) for k in prims]
        self.pool = list(canonical_codes() if pool is None else pool) + list(extras)

    def leaf_code(self, depth: int) -> Code:
        r = self.rng.random()
        if self.prims and r < 0.2:
            return self.rng.choice(self.prims)
        if depth > 0 and r < 0.45:
            return self.closure(depth - 1, max_n=1)
        return self.rng.choice(self.pool)

    def expr(self, n: int, depth: int) -> Expr:
        """An expression in ``E_n`` of depth at most ``depth``."""
        if depth <= 0 or self.rng.random() < 0.3:
            if n > 0 and self.rng.random() < 0.6:
                return Var(self.rng.randrange(n))
            return Lit(self.leaf_code(min(depth, 2)))
        return App(self.expr(n, depth - 1), self.expr(n, depth - 1))

    def closure(self, depth: int = 4, max_n: int = 3) -> Closure:
        n = self.rng.randint(0, max_n)
        return Closure(n, self.expr(n + 1, depth))

    def code(self, depth: int = 3) -> Code:
        if self.rng.random() < 0.5:
            return self.leaf_code(0)
        return self.closure(depth, max_n=2)

    def closed(self, depth: int = 4) -> Expr:
        return self.expr(0, depth)

    def codes(self, count: int, depth: int = 3) -> list[Code]:
        return [self.code(depth) for _ in range(count)]

    def pick(self, xs: Sequence):
        return self.rng.choice(xs)

    def sample(self, xs: Sequence, k: int) -> list:
        return self.rng.sample(list(xs), min(k, len(xs)))
