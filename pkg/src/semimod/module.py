"""Free modules R^n, vectors and submodules.

Over a finite semiring every vector of R^n gets an integer index (the
position in lexicographic order over the carrier), and a submodule is stored
as a bitmask of those indices.  The bitmask is the canonical identity of a
submodule: two submodules are equal exactly when their masks agree.

Over ``natural`` and ``maxplus-int`` a submodule is only a list of
generators.  Membership is decided by bounded search (N0) or by residuation
(max-plus); intersections are not available.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, StructuralError, UnsupportedOperation
from .semiring import NEG_INF, Semiring

DEFAULT_BUDGET = 4096


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Vector:
    entries: tuple
    semiring: Semiring

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __add__(self, other: "Vector") -> "Vector":
        r = self.semiring
        return Vector(tuple(r.add(a, b) for a, b in zip(self.entries, other.entries)), r)

    def scale(self, a) -> "Vector":
        r = self.semiring
        return Vector(tuple(r.mul(a, x) for x in self.entries), r)

    def is_zero(self) -> bool:
        z = self.semiring.zero
        return all(x == z for x in self.entries)

    def to_json(self) -> list:
        return [self.semiring.element_to_json(x) for x in self.entries]

    def __repr__(self):
        return "(" + ",".join(map(repr, self.entries)) + ")"


class FreeModule:
    """The free module R^n.  Enumerated when R is finite and |R|^n fits the budget."""

    def __init__(self, semiring: Semiring, rank: int, budget: int = DEFAULT_BUDGET):
        if rank < 0:
            raise StructuralError("rank must be non-negative")
        self.semiring = semiring
        self.rank = rank
        self.budget = budget
        self.finite = semiring.is_finite
        self._lattices: dict[int, list[int]] = {}
        self._add_table = None
        if not self.finite:
            return
        k = len(semiring.elements())
        size = k**rank
        if size > budget:
            raise BudgetExceeded(f"{semiring.name}^{rank} exceeds the enumeration budget {budget}",
                                 min(size, budget + 1))
        self.size = size
        self._radd, self._rmul = semiring.index_tables()
        self._coords = list(itertools.product(range(k), repeat=rank))
        self._pos = {c: i for i, c in enumerate(self._coords)}
        carrier = semiring.elements()
        self.vectors = [Vector(tuple(carrier[j] for j in c), semiring) for c in self._coords]
        self._vindex = {v.entries: i for i, v in enumerate(self.vectors)}
        self.zero_index = self._pos[(semiring.index(semiring.zero),) * rank]
        self.smul_table = [
            [self._pos[tuple(row[j] for j in c)] for c in self._coords] for row in self._rmul
        ]

    def __repr__(self):
        return f"FreeModule({self.semiring.name}, {self.rank})"

    def __eq__(self, other):
        return (isinstance(other, FreeModule) and self.semiring == other.semiring
                and self.rank == other.rank)

    def __hash__(self):
        return hash((self.semiring, self.rank))

    # -- vectors -------------------------------------------------------------

    def vector(self, entries: Sequence) -> Vector:
        if len(entries) != self.rank:
            raise StructuralError(f"vector has length {len(entries)}, expected rank {self.rank}")
        return Vector(tuple(self.semiring.check(x) for x in entries), self.semiring)

    def vector_from_json(self, entries: Sequence) -> Vector:
        if not isinstance(entries, (list, tuple)):
            raise StructuralError("vector must be a JSON array")
        return self.vector([self.semiring.element_from_json(x) for x in entries])

    def basis(self, i: int) -> Vector:
        r = self.semiring
        return Vector(tuple(r.one if j == i else r.zero for j in range(self.rank)), r)

    def zero_vector(self) -> Vector:
        return Vector((self.semiring.zero,) * self.rank, self.semiring)

    def index_of(self, v: Vector) -> int:
        self._need_finite("indexing")
        try:
            return self._vindex[v.entries]
        except KeyError:
            raise StructuralError(f"{v!r} is not a vector of {self!r}") from None

    # -- index arithmetic ----------------------------------------------------

    def _need_finite(self, what: str):
        if not self.finite:
            raise UnsupportedOperation(f"{what} needs an enumerable module; "
                                       f"{self.semiring.kind} is infinite")

    @property
    def add_table(self) -> list[list[int]]:
        if self._add_table is None:
            self._need_finite("addition table")
            ra, pos, coords = self._radd, self._pos, self._coords
            self._add_table = [
                [pos[tuple(ra[a][b] for a, b in zip(ci, cj))] for cj in coords] for ci in coords
            ]
        return self._add_table

    def add_idx(self, i: int, j: int) -> int:
        return self.add_table[i][j]

    def cyclic_mask(self, i: int) -> int:
        m = 0
        for row in self.smul_table:
            m |= 1 << row[i]
        return m

    def sum_mask(self, a: int, b: int) -> int:
        T = self.add_table
        bl = list(bits(b))
        out = 0
        for i in bits(a):
            row = T[i]
            for j in bl:
                out |= 1 << row[j]
        return out

    def span_mask(self, indices: Iterable[int]) -> int:
        m = 1 << self.zero_index
        for i in indices:
            if not (m >> i) & 1:
                m = self.sum_mask(m, self.cyclic_mask(i))
        return m

    def is_closed(self, mask: int) -> bool:
        """Zero, addition and scalar closure of an arbitrary index set."""
        if not (mask >> self.zero_index) & 1:
            return False
        T = self.add_table
        idx = list(bits(mask))
        for i in idx:
            for row in self.smul_table:
                if not (mask >> row[i]) & 1:
                    return False
            for j in idx:
                if not (mask >> T[i][j]) & 1:
                    return False
        return True

    # -- submodules ------------------------------------------------------------

    def whole(self) -> "Submodule":
        if not self.finite:
            return Submodule(self, tuple(self.basis(i) for i in range(self.rank)))
        return Submodule(self, None, (1 << self.size) - 1)

    def zero_submodule(self) -> "Submodule":
        if not self.finite:
            return Submodule(self, (), None)
        return Submodule(self, (), 1 << self.zero_index)

    def from_mask(self, mask: int) -> "Submodule":
        return Submodule(self, None, mask)

    def from_indices(self, indices: Iterable[int]) -> "Submodule":
        m = 0
        for i in indices:
            m |= 1 << i
        return Submodule(self, None, m)

    def lattice_masks(self, within: int | None = None, limit: int | None = None) -> list[int]:
        """Masks of every submodule contained in ``within`` (default: everything).

        Breadth-first over joins with cyclic submodules; sorted by size, then
        by element indices.
        """
        self._need_finite("submodule enumeration")
        if within is None:
            within = (1 << self.size) - 1
        if within in self._lattices:
            return self._lattices[within]
        cyclics = sorted({self.cyclic_mask(i) for i in bits(within)})
        start = 1 << self.zero_index
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for s in frontier:
                for c in cyclics:
                    if c & ~s == 0:
                        continue
                    j = self.sum_mask(s, c)
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
                        if limit is not None and len(seen) > limit:
                            raise BudgetExceeded(
                                f"submodule lattice of {self!r} exceeds limit {limit}", len(seen))
            frontier = nxt
        out = sorted(seen, key=lambda m: (popcount(m), list(bits(m))))
        self._lattices[within] = out
        return out


@lru_cache(maxsize=None)
def free_module(semiring: Semiring, rank: int, budget: int = DEFAULT_BUDGET) -> FreeModule:
    """Shared :class:`FreeModule` instance, so index tables are built once."""
    return FreeModule(semiring, rank, budget)


class Submodule:
    """A submodule of a free module.

    ``mask`` is present for enumerated submodules and is the identity used for
    equality.  Generators are computed lazily (greedily, in canonical order)
    when the submodule was built from an element set.
    """

    __slots__ = ("ambient", "_generators", "mask")

    def __init__(self, ambient: FreeModule, generators, mask: int | None = None):
        self.ambient = ambient
        self._generators = None if generators is None else tuple(generators)
        self.mask = mask

    @property
    def is_enumerated(self) -> bool:
        return self.mask is not None

    @property
    def generators(self) -> tuple:
        if self._generators is None:
            amb = self.ambient
            cur = 1 << amb.zero_index
            gens = []
            for i in bits(self.mask):
                if not (cur >> i) & 1:
                    gens.append(amb.vectors[i])
                    cur = amb.sum_mask(cur, amb.cyclic_mask(i))
            self._generators = tuple(gens)
        return self._generators

    def _need_mask(self, what: str) -> int:
        if self.mask is None:
            raise UnsupportedOperation(f"{what} needs an enumerated submodule")
        return self.mask

    @property
    def elements(self) -> list[Vector]:
        vs = self.ambient.vectors
        return [vs[i] for i in bits(self._need_mask("elements"))]

    def indices(self) -> list[int]:
        return list(bits(self._need_mask("indices")))

    def __len__(self):
        return popcount(self._need_mask("size"))

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v: Vector) -> bool:
        return contains(self, v)

    def is_zero(self) -> bool:
        if self.mask is not None:
            return self.mask == 1 << self.ambient.zero_index
        return all(g.is_zero() for g in self.generators)

    def __le__(self, other: "Submodule") -> bool:
        if self.mask is not None and other.mask is not None:
            return self.mask & ~other.mask == 0
        return all(contains(other, g) for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, Submodule) or self.ambient != other.ambient:
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        return hash((self.ambient, self.mask))

    def to_json(self) -> dict:
        return {"generators": [g.to_json() for g in self.generators]}

    def __repr__(self):
        if self.mask is not None:
            return "{" + ", ".join(map(repr, self.elements)) + "}"
        return "span{" + ", ".join(map(repr, self.generators)) + "}"


# -- operations --------------------------------------------------------------


def _ambient_of(generators: Sequence[Vector], ambient: FreeModule | None) -> FreeModule:
    if ambient is not None:
        return ambient
    if not generators:
        raise StructuralError("span of no generators needs an explicit ambient")
    g0 = generators[0]
    return free_module(g0.semiring, g0.rank)


def span(generators: Sequence[Vector], ambient: FreeModule | None = None, *,
         enumerate_infinite: bool = False, budget: int = DEFAULT_BUDGET) -> Submodule:
    """Smallest submodule containing ``generators``.

    Over infinite carriers the result is generator-only unless
    ``enumerate_infinite`` is set, in which case closure is attempted and
    :class:`BudgetExceeded` is raised once it passes ``budget`` elements.
    """
    generators = list(generators)
    amb = _ambient_of(generators, ambient)
    for g in generators:
        if g.rank != amb.rank or g.semiring != amb.semiring:
            raise StructuralError(f"generator {g!r} does not live in {amb!r}")
    if amb.finite:
        mask = amb.span_mask(amb.index_of(g) for g in generators)
        return Submodule(amb, generators, mask)
    if all(g.is_zero() for g in generators):
        return Submodule(amb, generators, None)
    if enumerate_infinite:
        _exhaust_infinite_span(amb, generators, budget)
    return Submodule(amb, generators, None)


def _scalar_stream(r: Semiring) -> Iterator:
    if r.kind == "natural":
        yield from itertools.count()
    else:
        yield NEG_INF
        for k in itertools.count():
            yield k
            yield -k - 1


def _exhaust_infinite_span(amb: FreeModule, generators, budget: int):
    # a nonzero generator over N0 or max-plus has infinitely many distinct multiples
    found = {amb.zero_vector()}
    for a in _scalar_stream(amb.semiring):
        for g in generators:
            new = g.scale(a)
            for x in list(found):
                found.add(x + new)
                if len(found) > budget:
                    raise BudgetExceeded("closure over an infinite carrier", len(found))


def contains(S: Submodule, v: Vector) -> bool:
    amb = S.ambient
    if v.rank != amb.rank or v.semiring != amb.semiring:
        raise StructuralError(f"{v!r} does not live in {amb!r}")
    if S.mask is not None:
        return bool((S.mask >> amb.index_of(v)) & 1)
    kind = amb.semiring.kind
    gens = [g for g in S.generators if not g.is_zero()]
    if v.is_zero():
        return True
    if kind == "maxplus-int":
        return _maxplus_contains(gens, v)
    return _natural_contains(gens, list(v.entries))


def principal_solution(gens: Sequence[Vector], v: Vector) -> list:
    """Greatest x with A (x) x <= v, A having the generators as columns.

    Columns that are entirely -inf are unconstrained and get ``None``.
    """
    out = []
    for g in gens:
        cands = [
            NEG_INF if vi is NEG_INF else vi - gi
            for gi, vi in zip(g.entries, v.entries)
            if gi is not NEG_INF
        ]
        out.append(min(cands) if cands else None)
    return out


def _maxplus_contains(gens: Sequence[Vector], v: Vector) -> bool:
    r = v.semiring
    acc = [NEG_INF] * v.rank
    for g, x in zip(gens, principal_solution(gens, v)):
        if x is None:
            continue
        for i, gi in enumerate(g.entries):
            acc[i] = r.add(acc[i], r.mul(x, gi))
    return tuple(acc) == v.entries


def coefficient_bound(g: Sequence[int], v: Sequence[int]) -> int:
    """Largest c with c*g <= v coordinatewise, g nonzero over N0."""
    return min(vj // gj for gj, vj in zip(g, v) if gj > 0)


def _natural_contains(gens: Sequence[Vector], target: list[int]) -> bool:
    cols = [list(g.entries) for g in gens]

    def search(k: int, rest: list[int]) -> bool:
        if not any(rest):
            return True
        if k == len(cols):
            return False
        g = cols[k]
        for c in range(coefficient_bound(g, rest), -1, -1):
            if search(k + 1, [r - c * x for r, x in zip(rest, g)]):
                return True
        return False

    return search(0, target)


def _same_ambient(s1: Submodule, s2: Submodule):
    if s1.ambient != s2.ambient:
        raise StructuralError(f"submodules live in different ambients: {s1.ambient!r}, "
                              f"{s2.ambient!r}")


def sum_submodules(s1: Submodule, s2: Submodule) -> Submodule:
    _same_ambient(s1, s2)
    if s1.mask is not None and s2.mask is not None:
        return Submodule(s1.ambient, None, s1.ambient.sum_mask(s1.mask, s2.mask))
    return Submodule(s1.ambient, s1.generators + s2.generators, None)


def intersect(s1: Submodule, s2: Submodule) -> Submodule:
    _same_ambient(s1, s2)
    if s1.mask is None or s2.mask is None:
        raise UnsupportedOperation("intersection needs enumerated submodules")
    return Submodule(s1.ambient, None, s1.mask & s2.mask)


def equal(s1: Submodule, s2: Submodule) -> bool:
    _same_ambient(s1, s2)
    if s1.mask is not None and s2.mask is not None:
        return s1.mask == s2.mask
    return s1 <= s2 and s2 <= s1


def all_submodules(ambient: FreeModule | Submodule, limit: int | None = None) -> list[Submodule]:
    """Every submodule of R^n (or of a given enumerated submodule), canonically sorted."""
    if isinstance(ambient, Submodule):
        amb, within = ambient.ambient, ambient._need_mask("submodule enumeration")
    else:
        amb, within = ambient, None
    return [Submodule(amb, None, m) for m in amb.lattice_masks(within, limit)]


def lacks_zero_sums(V: Submodule | FreeModule) -> bool:
    """No two nonzero elements of ``V`` add up to zero."""
    if isinstance(V, FreeModule):
        V = V.whole()
    amb = V.ambient
    if not amb.finite:
        return True
    z = amb.zero_index
    T = amb.add_table
    idx = [i for i in bits(V.mask) if i != z]
    return not any(T[i][j] == z for i in idx for j in idx)
