"""Set-based reference checkers.

Everything here works on plain Python sets of entry tuples and calls the
semiring operations directly.  Nothing is shared with the bitmask machinery
in :mod:`semimod.module` or with :mod:`semimod.decomposition`, so the two
paths can be compared against each other.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable

from .semiring import Semiring


class NaiveModule:
    """An enumerated module given by its element set and coordinatewise operations."""

    def __init__(self, semiring: Semiring, elements: Iterable[tuple]):
        self.R = semiring
        self.elements = frozenset(elements)
        rank = len(next(iter(self.elements)))
        self.zero = (semiring.zero,) * rank
        self.scalars = semiring.elements()
        self._sums: dict = {}
        self._prods: dict = {}

    def add(self, x: tuple, y: tuple) -> tuple:
        try:
            return self._sums[x, y]
        except KeyError:
            s = self._sums[x, y] = tuple(self.R.add(a, b) for a, b in zip(x, y))
            return s

    def smul(self, a, x: tuple) -> tuple:
        try:
            return self._prods[a, x]
        except KeyError:
            s = self._prods[a, x] = tuple(self.R.mul(a, b) for b in x)
            return s

    def ordered(self, s: Iterable[tuple]) -> list[tuple]:
        pos = {a: i for i, a in enumerate(self.scalars)}
        return sorted(s, key=lambda v: [pos[a] for a in v])

    # -- set algebra ---------------------------------------------------------

    def plus(self, A: frozenset, B: frozenset) -> frozenset:
        return frozenset(self.add(a, b) for a in A for b in B)

    def plus_all(self, parts: Iterable[frozenset]) -> frozenset:
        out = frozenset({self.zero})
        for p in parts:
            out = self.plus(out, p)
        return out

    def closure(self, gens: Iterable[tuple]) -> frozenset:
        found = {self.zero}
        todo = list(gens)
        while todo:
            x = todo.pop()
            if x in found:
                continue
            found.add(x)
            for a in self.scalars:
                todo.append(self.smul(a, x))
            for y in list(found):
                todo.append(self.add(x, y))
        return frozenset(found)

    def is_submodule(self, S: frozenset) -> bool:
        if self.zero not in S:
            return False
        for x in S:
            for a in self.scalars:
                if self.smul(a, x) not in S:
                    return False
            for y in S:
                if self.add(x, y) not in S:
                    return False
        return True

    def submodules(self) -> list[frozenset]:
        """Every submodule, by repeatedly adjoining one element and closing."""
        start = frozenset({self.zero})
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for S in frontier:
                for v in self.elements - S:
                    J = self.closure(set(S) | {v})
                    if J not in seen:
                        seen.add(J)
                        nxt.append(J)
            frontier = nxt
        return sorted(seen, key=lambda s: (len(s), self.ordered(s)))

    # -- predicates ----------------------------------------------------------

    def lacks_zero_sums(self, S: frozenset | None = None) -> bool:
        S = self.elements if S is None else S
        for x in S:
            for y in S:
                if self.add(x, y) == self.zero and (x != self.zero or y != self.zero):
                    return False
        return True

    def is_weak(self, V, W, T) -> bool:
        if self.plus(W, T) != V:
            return False
        for w in W:
            if w == self.zero:
                continue
            for t in T:
                if self.add(w, t) in T:
                    return False
        return True

    def is_semidirect(self, V, W, T) -> bool:
        if self.plus(W, T) != V:
            return False
        part = {}
        for w in W:
            for t in T:
                if part.setdefault(self.add(w, t), w) != w:
                    return False
        return True

    def is_direct(self, V, W, T) -> bool:
        return self.is_direct_family(V, [W, T])

    def is_direct_family(self, V, parts) -> bool:
        """Every element of V is a sum of one element per part, in exactly one way."""
        seen = set()
        for combo in itertools.product(*parts):
            s = self.zero
            for x in combo:
                s = self.add(s, x)
            if s in seen:
                return False
            seen.add(s)
        return seen == set(V)

    def trivial_meet(self, V, W, T) -> bool:
        return self.plus(W, T) == V and W & T == {self.zero}

    def is_sa(self, V, S) -> bool:
        for x in V:
            for y in V:
                if self.add(x, y) in S and (x not in S or y not in S):
                    return False
        return True

    def preceq(self, V, x, y) -> bool:
        return any(self.add(x, z) == y for z in V)

    def is_convex(self, V, S) -> bool:
        for s1 in S:
            for s2 in S:
                for v in V:
                    if v not in S and self.preceq(V, s1, v) and self.preceq(V, v, s2):
                        return False
        return True

    def is_ub(self, V) -> bool:
        for x in V:
            for y in V:
                for z in V:
                    if self.add(self.add(x, y), z) == x and self.add(x, y) != x:
                        return False
        return True

    def green_classes(self, V) -> list[frozenset]:
        classes = []
        placed = set()
        for x in self.ordered(V):
            if x in placed:
                continue
            cls = frozenset(y for y in V if self.preceq(V, x, y) and self.preceq(V, y, x))
            placed |= cls
            classes.append(cls)
        return classes

    def direct_complements(self, V, T, subs) -> list[frozenset]:
        return [W for W in subs if self.is_direct(V, T, W)]


def monoid_is_ub(elements: list, add: Callable) -> bool:
    for x in elements:
        for y in elements:
            for z in elements:
                if add(add(x, y), z) == x and add(x, y) != x:
                    return False
    return True


def monoid_is_sa(elements: list, add: Callable, S) -> bool:
    for x in elements:
        for y in elements:
            if add(x, y) in S and (x not in S or y not in S):
                return False
    return True


def monoid_is_convex(elements: list, add: Callable, S) -> bool:
    def pre(x, y):
        return any(add(x, z) == y for z in elements)

    for s1 in S:
        for s2 in S:
            for v in elements:
                if v not in S and pre(s1, v) and pre(v, s2):
                    return False
    return True
