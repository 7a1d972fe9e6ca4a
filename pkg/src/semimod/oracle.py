"""Brute-force verification of the decomposition theory on a seeded corpus.

A corpus is a list of free modules R^n over small finite semirings (a fixed
set plus random tables found by rejection sampling).  Every claim in
:data:`REGISTRY` is checked exhaustively on each ambient module whose
hypotheses hold, using only the set-based :class:`~semimod.naive.NaiveModule`
code path.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from . import semiring as sr
from .errors import BudgetExceeded, PreconditionError
from .module import free_module
from .naive import NaiveModule, monoid_is_ub
from .semiring import Semiring


@dataclass(frozen=True)
class CorpusConfig:
    fixed: bool = True
    random_tables: int = 4
    random_sizes: tuple = (3, 4)
    max_attempts: int = 20000
    ranks: tuple = (1, 2, 3)
    budget: int = 4096
    lattice_limit: int = 500
    # proper submodules of R^n also serve as ambients when |R^n| is at most this
    sub_ambient_size: int = 8
    # claims quantifying over triples of submodules skip larger lattices
    cubic_limit: int = 150
    # subset sweeps (SA/convexity over arbitrary subsets) up to this many elements
    subset_limit: int = 16
    family_limit: int = 3

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in vars(self).items()}


@dataclass(frozen=True)
class Instance:
    semiring: Semiring
    rank: int

    @property
    def name(self) -> str:
        return f"{self.semiring.name}^{self.rank}"


@dataclass
class InstanceCorpus:
    seed: int
    config: CorpusConfig
    semirings: list[Semiring]
    instances: list[Instance]
    excluded: list[dict] = field(default_factory=list)
    attempts: int = 0
    accepted: int = 0
    discarded: int = 0

    @property
    def ranks(self) -> tuple:
        return self.config.ranks

    @property
    def budget(self) -> int:
        return self.config.budget

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "config": self.config.to_json(),
            "semirings": [{"name": r.name, "definition": r.to_json()} for r in self.semirings],
            "instances": [{"semiring": i.semiring.name, "rank": i.rank} for i in self.instances],
            "excluded": self.excluded,
            "random_tables": {"attempts": self.attempts, "accepted": self.accepted,
                              "discarded": self.discarded},
        }


def fixed_semirings() -> list[Semiring]:
    b = sr.boolean()
    return [b, sr.truncated(2), sr.truncated(3), sr.zmod(2), sr.product(b, b)]


def _associative(op: list[list[int]]) -> bool:
    n = range(len(op))
    return all(op[op[x][y]][z] == op[x][op[y][z]] for x in n for y in n for z in n)


def _random_op(rng: random.Random, k: int, unit: int, absorbing: bool,
               commutative: bool) -> list[list[int]]:
    """Random associative operation with the given identity (and zero absorbing if asked)."""
    while True:
        op = [[0] * k for _ in range(k)]
        for i in range(k):
            op[unit][i] = op[i][unit] = i
        for i in range(k):
            for j in range(k):
                if i == unit or j == unit:
                    continue
                if absorbing and 0 in (i, j):
                    continue
                if commutative and j < i:
                    op[i][j] = op[j][i]
                else:
                    op[i][j] = rng.randrange(k)
        if _associative(op):
            return op


def _random_table(rng: random.Random, k: int, name: str) -> Semiring:
    # proposals already have the right identities and an associative add and mul;
    # distributivity is left to the axiom check
    labels = [str(i) for i in range(k)]
    add = _random_op(rng, k, 0, False, True)
    mul = _random_op(rng, k, 1, True, False)
    return sr.table(labels, [[labels[x] for x in row] for row in add],
                    [[labels[x] for x in row] for row in mul], "0", "1", name=name)


def generate_corpus(seed: int = 0, config: CorpusConfig | None = None) -> InstanceCorpus:
    config = CorpusConfig() if config is None else config
    if (not config.fixed and config.random_tables == 0) or not config.ranks:
        raise PreconditionError("corpus configuration selects no semirings or no ranks")
    if config.budget < 2:
        raise PreconditionError("budget must be at least 2")
    rng = random.Random(seed)
    semirings = fixed_semirings() if config.fixed else []
    attempts = discarded = accepted = 0
    for i in range(config.random_tables):
        k = config.random_sizes[i % len(config.random_sizes)]
        while attempts < config.max_attempts:
            attempts += 1
            cand = _random_table(rng, k, f"random{k}-{i}")
            if sr.verify_axioms(cand) or cand in semirings:
                discarded += 1
                continue
            accepted += 1
            semirings.append(cand)
            break
    instances, excluded = [], []
    for R in semirings:
        for n in config.ranks:
            try:
                free_module(R, n, config.budget).lattice_masks(limit=config.lattice_limit)
            except BudgetExceeded as exc:
                excluded.append({"semiring": R.name, "rank": n, "reason": str(exc)})
                continue
            instances.append(Instance(R, n))
    return InstanceCorpus(seed, config, semirings, instances, excluded,
                          attempts, accepted, discarded)


# -- ambient contexts --------------------------------------------------------


def _ordered_scalar_key(R: Semiring):
    pos = {a: i for i, a in enumerate(R.elements())}
    return lambda v: [pos[a] for a in v]


class Ambient:
    """One enumerated module V with lazily computed naive data."""

    def __init__(self, instance: Instance, elements: Iterable[tuple], label: str,
                 config: CorpusConfig, peers: dict | None = None):
        self.instance = instance
        self.R = instance.semiring
        self.nm = NaiveModule(self.R, elements)
        self.V = self.nm.elements
        self.label = label
        self.config = config
        self.peers = {} if peers is None else peers
        self.zero_set = frozenset({self.nm.zero})
        self._covers: dict = {}
        self._pairs: dict = {}

    @property
    def is_whole(self) -> bool:
        return self.label == "whole"

    def ser(self, S) -> list:
        key = _ordered_scalar_key(self.R)
        return [[self.R.element_to_json(a) for a in v] for v in sorted(S, key=key)]

    def describe(self) -> dict:
        return {"semiring": self.R.to_json(), "semiring_name": self.R.name,
                "rank": self.instance.rank, "label": self.label, "ambient": self.ser(self.V)}

    # -- lattice data --------------------------------------------------------

    @cached_property
    def subs(self) -> list[frozenset]:
        return self.nm.submodules()

    @cached_property
    def lzs(self) -> bool:
        return self.nm.lacks_zero_sums()

    def subs_in(self, U: frozenset) -> list[frozenset]:
        return [S for S in self.subs if S <= U]

    @cached_property
    def _index(self) -> tuple[dict, list[list[int]]]:
        elems = sorted(self.V, key=_ordered_scalar_key(self.R))
        pos = {v: i for i, v in enumerate(elems)}
        return pos, [[pos[self.nm.add(x, y)] for y in elems] for x in elems]

    def cover_pairs_in(self, U: frozenset) -> list[tuple]:
        """Pairs (A, B) of submodules of U with A + B = U, in lattice order."""
        try:
            return self._covers[U]
        except KeyError:
            pass
        pos, table = self._index
        inner = self.subs_in(U)
        ids = [[pos[x] for x in A] for A in inner]
        hits = set()
        for i, A in enumerate(inner):
            rows = [table[a] for a in ids[i]]
            for j in range(i, len(inner)):
                if len(A) * len(inner[j]) < len(U):
                    continue
                if len({row[b] for row in rows for b in ids[j]}) == len(U):
                    hits.add((i, j))
                    hits.add((j, i))
        out = self._covers[U] = [(inner[i], inner[j]) for i, j in sorted(hits)]
        return out

    @cached_property
    def cover_pairs(self) -> list[tuple]:
        return self.cover_pairs_in(self.V)

    @cached_property
    def weak_pairs(self) -> list[tuple]:
        return [(W, T) for W, T in self.cover_pairs
                if W & T == self.zero_set and self.nm.is_weak(self.V, W, T)]

    @cached_property
    def semidirect_pairs(self) -> list[tuple]:
        return [(W, T) for W, T in self.cover_pairs
                if W & T == self.zero_set and self.nm.is_semidirect(self.V, W, T)]

    def complements_in(self, U: frozenset, T: frozenset) -> list[frozenset]:
        return [W for W in self.subs_in(U)
                if len(T) * len(W) == len(U) and W & T == self.zero_set
                and self.nm.is_direct(U, T, W)]

    @cached_property
    def complements(self) -> dict:
        return {T: self.complements_in(self.V, T) for T in self.subs}

    @cached_property
    def summands(self) -> list[frozenset]:
        return [T for T in self.subs if self.complements[T]]

    @cached_property
    def direct_pairs(self) -> list[tuple]:
        return [(T, W) for T in self.subs for W in self.complements[T]]

    def comp(self, T: frozenset) -> frozenset:
        return self.complements[T][0]

    def is_indecomposable(self, T: frozenset) -> bool:
        if T == self.zero_set:
            return False
        for A in self.subs_in(T):
            if A == self.zero_set or A == T:
                continue
            if self.complements_in(T, A):
                return False
        return True

    @cached_property
    def indecomposables(self) -> list[frozenset]:
        return [T for T in self.summands if self.is_indecomposable(T)]

    @cached_property
    def sa_subs(self) -> list[frozenset]:
        return [S for S in self.subs if self.nm.is_sa(self.V, S)]

    # -- Green's data --------------------------------------------------------

    @cached_property
    def below(self) -> dict:
        """y -> set of x with x + z = y for some z in V."""
        out = {y: set() for y in self.V}
        for x in self.V:
            for z in self.V:
                out[self.nm.add(x, z)].add(x)
        return out

    def pre(self, x, y) -> bool:
        return x in self.below[y]

    @cached_property
    def classes(self) -> list[frozenset]:
        return self.nm.green_classes(self.V)

    @cached_property
    def class_of(self) -> dict:
        return {x: k for k, c in enumerate(self.classes) for x in c}

    @cached_property
    def class_add(self) -> list[list[set]]:
        """All classes hit by x + y for x, y ranging over two classes."""
        n = len(self.classes)
        out = [[set() for _ in range(n)] for _ in range(n)]
        for x in self.V:
            for y in self.V:
                out[self.class_of[x]][self.class_of[y]].add(self.class_of[self.nm.add(x, y)])
        return out

    def qadd(self, a: int, b: int) -> int:
        (k,) = self.class_add[a][b]
        return k

    def qpre(self, a: int, b: int) -> bool:
        return any(self.qadd(a, z) == b for z in range(len(self.classes)))

    def peer(self, rank: int) -> "Ambient | None":
        return self.peers.get((self.R, rank))


# -- claims ------------------------------------------------------------------


@dataclass(frozen=True)
class Claim:
    claim_id: str
    statement: str
    check: Callable
    gate: Callable = staticmethod(lambda a: None)
    scope: str = "module"


def _needs_lzs(a: Ambient):
    return None if a.lzs else "ambient has zero sums"


def _needs_whole_rank1(a: Ambient):
    if not (a.is_whole and a.instance.rank == 1):
        return "claim concerns R as a module over itself"
    return None


def _needs_ring_lzs(a: Ambient):
    return _needs_whole_rank1(a) or _needs_lzs(a)


class _Run:
    """Accumulates checked configurations and the first counterexample."""

    def __init__(self):
        self.count = 0
        self.witness = None

    def check(self, ok: bool, witness: Callable[[], dict]) -> bool:
        self.count += 1
        if not ok and self.witness is None:
            self.witness = witness()
        return ok

    @property
    def result(self):
        return self.count, self.witness


def _lemma_weak_zero(a: Ambient):
    run, add, z = _Run(), a.nm.add, a.nm.zero
    for W, T in a.weak_pairs:
        ok = True
        for x in T:
            for x2 in T:
                for w1 in W:
                    for w2 in W:
                        if x == add(x2, add(w1, w2)) and not (w1 == z and w2 == z and x == x2):
                            ok = False
        run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T)})
        if run.witness:
            break
    return run.result


def _descent(a: Ambient):
    run = _Run()
    for W, T in a.weak_pairs:
        for Y, Z in a.cover_pairs:
            ok = a.nm.plus(T & Y, T & Z) == T
            if not run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T), "Y": a.ser(Y),
                                          "Z": a.ser(Z)}):
                return run.result
    return run.result


def _weak_contained(a: Ambient):
    run = _Run()
    for W, T in a.weak_pairs:
        for U in a.subs:
            if a.nm.plus(W, U) == a.V:
                if not run.check(T <= U, lambda: {"W": a.ser(W), "T": a.ser(T), "U": a.ser(U)}):
                    return run.result
    return run.result


def _weak_unique(a: Ambient):
    run = _Run()
    for W in a.subs:
        if not a.nm.lacks_zero_sums(W):
            continue
        comps = [T for W2, T in a.weak_pairs if W2 == W]
        run.check(len(comps) <= 1, lambda: {"W": a.ser(W), "complements": [a.ser(T) for T in comps]})
    return run.result


def _direct_unique(a: Ambient):
    run = _Run()
    for T in a.subs:
        cs = a.complements[T]
        run.check(len(cs) <= 1, lambda: {"T": a.ser(T), "complements": [a.ser(c) for c in cs]})
    return run.result


def _antitone(a: Ambient):
    run = _Run()
    for T in a.summands:
        for Y in a.summands:
            if T <= Y:
                run.check(a.comp(Y) <= a.comp(T), lambda: {"T": a.ser(T), "Y": a.ser(Y)})
    return run.result


def _fourfold(a: Ambient):
    run = _Run()
    for T, W in a.direct_pairs:
        for Y, Z in a.direct_pairs:
            parts = [T & Y, T & Z, W & Y, W & Z]
            run.check(a.nm.is_direct_family(a.V, parts),
                      lambda: {"T": a.ser(T), "W": a.ser(W), "Y": a.ser(Y), "Z": a.ser(Z)})
    return run.result


def _sum_refinement(a: Ambient):
    run = _Run()
    for T, W in a.direct_pairs:
        for Y, Z in a.direct_pairs:
            TY = a.nm.plus(T, Y)
            parts = [T & Y, T & Z, W & Y]
            ok = a.nm.plus_all(parts) == TY and a.nm.is_direct_family(TY, parts)
            run.check(ok, lambda: {"T": a.ser(T), "W": a.ser(W), "Y": a.ser(Y), "Z": a.ser(Z)})
    return run.result


def _complement_formulas(a: Ambient):
    run = _Run()
    for T, W in a.direct_pairs:
        for Y, Z in a.direct_pairs:
            TY, TnY = a.nm.plus(T, Y), T & Y
            ok = bool(a.complements.get(TY)) and bool(a.complements.get(TnY))
            if ok:
                ok = a.comp(TY) == W & Z
                rest = [T & Z, W & Y, W & Z]
                ok = ok and a.comp(TnY) == a.nm.plus_all(rest)
                ok = ok and a.nm.is_direct_family(a.comp(TnY), rest)
            run.check(ok, lambda: {"T": a.ser(T), "W": a.ser(W), "Y": a.ser(Y), "Z": a.ser(Z)})
    return run.result


def _family(a: Ambient):
    run = _Run()
    summands = a.summands
    sizes = [1, 2] + ([3] if len(summands) <= 10 else [])
    for k in sizes:
        if k > a.config.family_limit:
            break
        for fam in itertools.combinations(summands, k):
            parts = []
            for J in itertools.product((True, False), repeat=k):
                part = a.V
                for inside, U in zip(J, fam):
                    part = part & (U if inside else a.comp(U))
                parts.append(part)
            run.check(a.nm.is_direct_family(a.V, parts), lambda: {"family": [a.ser(U) for U in fam]})
    return run.result


def _indecomposable_pair(a: Ambient):
    run = _Run()
    for T, Y in itertools.combinations(a.indecomposables, 2):
        ok = T & Y == a.zero_set and a.nm.is_direct(a.nm.plus(T, Y), T, Y)
        run.check(ok, lambda: {"T": a.ser(T), "Y": a.ser(Y)})
    return run.result


def _independence(a: Ambient):
    run = _Run()
    ind = a.indecomposables
    for T in ind:
        others = a.nm.plus_all(U for U in ind if U != T)
        run.check(T & others == a.zero_set, lambda: {"T": a.ser(T)})
    return run.result


def _socle(a: Ambient):
    run = _Run()
    ind = a.indecomposables
    socle = a.nm.plus_all(ind)
    comp = a.V
    for T in ind:
        comp = comp & a.comp(T)
    ok = a.nm.is_direct_family(socle, ind) and a.nm.is_direct(a.V, socle, comp)
    run.check(ok, lambda: {"socle": a.ser(socle), "complement": a.ser(comp)})
    return run.result


def _naive_units_generate(R: Semiring) -> bool:
    E = R.elements()
    units = [u for u in E if any(R.mul(u, v) == R.one and R.mul(v, u) == R.one for v in E)]
    reach = {R.zero}
    while True:
        new = {R.add(x, u) for x in reach for u in units} - reach
        if not new:
            return len(reach) == len(E)
        reach |= new


def _residual(a: Ambient):
    run = _Run()
    socle = a.nm.plus_all(a.indecomposables)
    residual = (a.V - socle) | a.zero_set
    run.check(a.nm.is_submodule(residual), lambda: {"residual": a.ser(residual)})
    return run.result


def _residual_gate(a: Ambient):
    if not a.lzs:
        return "ambient has zero sums"
    if not _naive_units_generate(a.R):
        return "semiring is not additively generated by its units"
    return None


# -- projective / idempotent claims (R as a module over itself) ---------------


def _naive_primitive(R: Semiring, e) -> bool:
    E = R.elements()
    z = R.zero
    if e == z or R.mul(e, e) != e:
        return False
    ids = [f for f in E if f != z and R.mul(f, f) == f]
    return not any(R.add(f, g) == e and R.mul(f, g) == z and R.mul(g, f) == z
                   for f in ids for g in ids)


def _naive_partition(R: Semiring):
    prims = [e for e in R.elements() if _naive_primitive(R, e)]
    z = R.zero
    for k in range(1, len(prims) + 1):
        for fam in itertools.combinations(prims, k):
            if R.sum(fam) == R.one and all(R.mul(f, g) == z and R.mul(g, f) == z
                                           for f, g in itertools.permutations(fam, 2)):
                return list(fam)
    return None


def _iso_to_cyclic(nm: NaiveModule, P: frozenset, e, R: Semiring) -> bool:
    """P ≅ Re via r·e ↦ r·g for some g in P."""
    for g in P:
        f = {}
        ok = True
        for r in R.elements():
            src, dst = R.mul(r, e), nm.smul(r, g)
            if f.setdefault(src, dst) != dst:
                ok = False
                break
        if ok and len(set(f.values())) == len(f) and set(f.values()) == P:
            return True
    return False


def _projective_primitive(a: Ambient):
    run, R = _Run(), a.R
    one = (R.one,)
    for P in a.indecomposables:
        c = a.comp(P)
        (e,) = [p for p in P for q in c if a.nm.add(p, q) == one]
        e = e[0]
        ok = _naive_primitive(R, e) and P == {a.nm.smul(r, (e,)) for r in R.elements()}
        run.check(ok, lambda: {"P": a.ser(P), "e": R.element_to_json(e)})
    prims = [e for e in R.elements() if _naive_primitive(R, e)]
    for n in a.config.ranks:
        b = a.peer(n)
        if b is None or n == 1:
            continue
        for P in b.indecomposables:
            ok = any(_iso_to_cyclic(b.nm, P, e, R) for e in prims)
            run.check(ok, lambda: {"rank": n, "P": b.ser(P)})
    return run.result


def _direct_subfamilies(a: Ambient, family: list) -> list:
    return [sub for k in range(len(family) + 1) for sub in itertools.combinations(family, k)
            if a.nm.plus_all(sub) == a.V and a.nm.is_direct_family(a.V, list(sub))]


def _idempotent_equivalence(a: Ambient):
    run = _Run()
    v1 = a.nm.plus_all(a.indecomposables) == a.V
    v2 = _naive_partition(a.R) is not None
    v3 = bool(_direct_subfamilies(a, a.indecomposables))
    run.check(v1 == v2 == v3, lambda: {"dsoc_is_whole": v1, "partition": v2, "splits": v3})
    return run.result


def _projective_unique(a: Ambient):
    run, R = _Run(), a.R
    part = _naive_partition(R)
    if part is None:
        return run.result
    # partition members with isomorphic cyclic modules share a class
    key = []
    for k, e in enumerate(part):
        Re = frozenset((R.mul(r, e),) for r in R.elements())
        key.append(next(j for j in range(k + 1) if _iso_to_cyclic(a.nm, Re, part[j], R)))
    for n in a.config.ranks:
        b = a if n == 1 else a.peer(n)
        if b is None:
            continue
        ind = b.indecomposables
        splits = _direct_subfamilies(b, ind)
        counts = {c: 0 for c in key}
        for P in ind:
            hit = next((k for k, e in enumerate(part) if _iso_to_cyclic(b.nm, P, e, R)), None)
            if hit is not None:
                counts[key[hit]] += 1
        expected = {c: n * key.count(c) for c in counts}
        ok = len(splits) == 1 and set(splits[0]) == set(ind) and counts == expected
        run.check(ok, lambda: {"rank": n, "splits": len(splits), "counts": list(counts.values()),
                               "expected": list(expected.values())})
    return run.result


# -- summand absorbing claims --------------------------------------------------


def _subset_pool(a: Ambient, need_zero: bool = False) -> Iterable[frozenset]:
    if len(a.V) <= 8:
        elems = sorted(a.V, key=_ordered_scalar_key(a.R))
        for k in range(len(elems) + 1):
            for S in itertools.combinations(elems, k):
                S = frozenset(S)
                if not need_zero or a.nm.zero in S:
                    yield S
    else:
        yield from a.subs


def _sa_forces_lzs(a: Ambient):
    run = _Run()
    for W, T in a.weak_pairs:
        rest = a.V - T
        if all(a.nm.add(x, y) in rest for x in rest for y in rest):
            ok = a.nm.lacks_zero_sums(W) and [T2 for W2, T2 in a.weak_pairs if W2 == W] == [T]
            run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T)})
    return run.result


def _sa_equivalences(a: Ambient):
    run, add, V = _Run(), a.nm.add, a.V
    for S in _subset_pool(a):
        i = all(add(x, y) not in S or (x in S and y in S) for x in V for y in V)
        ii = all(add(w, v) not in S for w in V - S for v in V)
        iii = all(add(add(x, y), z) not in S or (x in S and y in S and z in S)
                  for x in V for y in V for z in V)
        run.check(i == ii == iii, lambda: {"S": a.ser(S), "verdicts": [i, ii, iii]})
    return run.result


def _sa_preimage(a: Ambient):
    run = _Run()
    for W, T in a.semidirect_pairs:
        p = {a.nm.add(w, t): w for w in W for t in T}
        for X in a.sa_subs:
            pre = frozenset(v for v in a.V if p[v] in X)
            ok = a.nm.is_submodule(pre) and a.nm.is_sa(a.V, pre)
            run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T), "X": a.ser(X)})
    return run.result


def _sa_lattice(a: Ambient):
    run = _Run()
    sa = a.sa_subs
    for A in sa:
        for B in sa:
            run.check(a.nm.is_sa(a.V, A & B), lambda: {"A": a.ser(A), "B": a.ser(B), "op": "meet"})
            if A <= B or B <= A:
                U = A | B
                ok = a.nm.is_submodule(U) and a.nm.is_sa(a.V, U)
                run.check(ok, lambda: {"A": a.ser(A), "B": a.ser(B), "op": "union"})
    total = a.V
    for A in sa:
        total = total & A
    run.check(a.nm.is_sa(a.V, total), lambda: {"op": "meet-all"})
    return run.result


def _weak_in(a: Ambient, U: frozenset, W: frozenset) -> list:
    return [T for T in a.subs_in(U)
            if W & T == a.zero_set and a.nm.is_weak(U, W, T)]


def _sa_unique_weak(a: Ambient):
    run = _Run()
    for T in a.sa_subs:
        for W in a.subs:
            if W & T != a.zero_set or a.nm.plus(W, T) != a.V:
                continue
            ok = _weak_in(a, a.V, W) == [T]
            run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T)})
            for U in a.sa_subs:
                if a.nm.plus(W, U) != a.V:
                    continue
                ok = T <= U and _weak_in(a, U, W & U) == [T]
                run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T), "U": a.ser(U)})
    return run.result


def _pairs_in(a: Ambient, U: frozenset, pred) -> list:
    key = (U, pred.__name__)
    if key not in a._pairs:
        a._pairs[key] = [(W, S) for W, S in a.cover_pairs_in(U)
                         if W & S == a.zero_set and pred(U, W, S)]
    return a._pairs[key]


def _semidirect_transitivity(a: Ambient):
    run, nm = _Run(), a.nm
    for U, T in a.semidirect_pairs:
        for W, S in _pairs_in(a, U, nm.is_semidirect):
            ST, WT = nm.plus(S, T), nm.plus(W, T)
            ok = (nm.is_semidirect(ST, S, T) and nm.is_semidirect(WT, W, T)
                  and nm.is_semidirect(a.V, W, ST))
            run.check(ok, lambda: {"W": a.ser(W), "S": a.ser(S), "T": a.ser(T)})
    return run.result


def _mixed_transitivity(a: Ambient):
    run, nm = _Run(), a.nm
    for U, T in a.semidirect_pairs:
        for W, S in _pairs_in(a, U, nm.is_weak):
            ok = nm.is_weak(a.V, W, nm.plus(S, T))
            run.check(ok, lambda: {"W": a.ser(W), "S": a.ser(S), "T": a.ser(T)})
    return run.result


def _sa_containment(a: Ambient):
    run, nm = _Run(), a.nm
    lzs = [W for W in a.subs if nm.lacks_zero_sums(W)]
    for T in a.sa_subs:
        for W in lzs:
            WT = nm.plus(W, T)
            for U in a.subs:
                if WT <= nm.plus(W, U) and W & T <= W & U:
                    if not run.check(T <= U, lambda: {"W": a.ser(W), "T": a.ser(T),
                                                      "U": a.ser(U)}):
                        return run.result
    return run.result


def _cubic_gate(a: Ambient):
    if len(a.subs) > a.config.cubic_limit:
        return f"lattice of {len(a.subs)} submodules exceeds the triple-quantifier limit"
    return None


def hierarchy_levels(a: Ambient, W: frozenset, T: frozenset) -> dict:
    nm = a.nm
    return {
        "trivial-intersection": nm.trivial_meet(a.V, W, T),
        "weak": nm.is_weak(a.V, W, T),
        "semidirect": nm.is_semidirect(a.V, W, T),
        "direct": nm.is_direct(a.V, W, T),
    }


def _hierarchy(a: Ambient):
    run = _Run()
    for W, T in a.cover_pairs:
        lv = hierarchy_levels(a, W, T)
        ok = ((not lv["direct"] or lv["semidirect"]) and (not lv["semidirect"] or lv["weak"])
              and (not lv["weak"] or lv["trivial-intersection"]))
        run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T), "levels": lv})
    return run.result


# -- Green's quotient claims ---------------------------------------------------


def _quotient_ub(a: Ambient):
    run = _Run()
    n = len(a.classes)
    well_defined = all(len(a.class_add[i][j]) == 1 for i in range(n) for j in range(n))
    run.check(well_defined, lambda: {"reason": "addition not well defined"})
    if well_defined:
        ub = monoid_is_ub(list(range(n)), a.qadd)
        singles = all(len(c) == 1 for c in a.classes)
        run.check(ub, lambda: {"reason": "quotient not ub"})
        run.check(singles == a.nm.is_ub(a.V), lambda: {"reason": "ub vs singleton classes"})
    return run.result


def _ub_lzs(a: Ambient):
    run = _Run()
    if a.nm.is_ub(a.V):
        run.check(a.lzs, lambda: {"reason": "ub module with zero sums"})
    return run.result


def _point_hull(a: Ambient):
    run = _Run()
    for s in a.V:
        H = {s}
        while True:
            new = {v for v in a.V - H
                   if any(a.pre(s1, v) for s1 in H) and any(a.pre(v, s2) for s2 in H)}
            if not new:
                break
            H |= new
        run.check(H == a.classes[a.class_of[s]], lambda: {"s": a.ser([s]), "hull": a.ser(H)})
    return run.result


def _naive_convex(a: Ambient, S) -> bool:
    return not any(v not in S and any(a.pre(s1, v) for s1 in S) and any(a.pre(v, s2) for s2 in S)
                   for v in a.V)


def _image(a: Ambient, S) -> set:
    return {a.class_of[x] for x in S}


def _union_of_classes(a: Ambient, S) -> bool:
    return all(c <= S or not (c & S) for c in a.classes)


def _q_convex(a: Ambient, img: set) -> bool:
    n = len(a.classes)
    return not any(v not in img and any(a.qpre(s, v) for s in img)
                   and any(a.qpre(v, s) for s in img) for v in range(n))


def _q_sa(a: Ambient, img: set) -> bool:
    n = len(a.classes)
    return all(a.qadd(x, y) not in img or (x in img and y in img)
               for x in range(n) for y in range(n))


def _convex_classes(a: Ambient):
    run = _Run()
    for S in _subset_pool(a):
        lhs = _naive_convex(a, S)
        rhs = _union_of_classes(a, S) and _q_convex(a, _image(a, S))
        run.check(lhs == rhs, lambda: {"S": a.ser(S), "convex": lhs})
    return run.result


def _convex_iff_sa(a: Ambient):
    run = _Run()
    if len(a.V) > a.config.subset_limit:
        for S in a.subs:
            lhs, rhs = _naive_convex(a, S), a.nm.is_sa(a.V, S)
            run.check(lhs == rhs, lambda: {"S": a.ser(S), "convex": lhs, "sa": rhs})
        return run.result
    # exhaustive sweep over subsets containing zero, as bitmasks over a fixed order
    elems = sorted(a.V, key=_ordered_scalar_key(a.R))
    pos = {v: i for i, v in enumerate(elems)}
    n = len(elems)
    below = [0] * n
    above = [0] * n
    summands = [0] * n
    for x in elems:
        for y in elems:
            s = pos[a.nm.add(x, y)]
            summands[s] |= (1 << pos[x]) | (1 << pos[y])
    for v in elems:
        for x in a.below[v]:
            below[pos[v]] |= 1 << pos[x]
            above[pos[x]] |= 1 << pos[v]
    zbit = 1 << pos[a.nm.zero]
    full = (1 << n) - 1
    for m in range(1 << n):
        if not m & zbit:
            continue
        convex = all(not (below[v] & m and above[v] & m) for v in range(n) if not (m >> v) & 1)
        sa = all(summands[s] & ~m & full == 0 for s in range(n) if (m >> s) & 1)
        if not run.check(convex == sa, lambda: {"S": a.ser(elems[i] for i in range(n)
                                                           if (m >> i) & 1)}):
            break
    return run.result


def _sa_quotient(a: Ambient):
    run = _Run()
    for S in a.subs:
        lhs = a.nm.is_sa(a.V, S)
        rhs = _union_of_classes(a, S) and _q_sa(a, _image(a, S))
        run.check(lhs == rhs, lambda: {"S": a.ser(S), "sa": lhs})
    return run.result


def _quotient_semiring(a: Ambient):
    run, R, nm = _Run(), a.R, a.nm
    n = len(a.classes)
    prod = [[set() for _ in range(n)] for _ in range(n)]
    for x in a.V:
        for y in a.V:
            prod[a.class_of[x]][a.class_of[y]].add(a.class_of[(R.mul(x[0], y[0]),)])
    ok = all(len(prod[i][j]) == 1 for i in range(n) for j in range(n))
    run.check(ok, lambda: {"reason": "multiplication not compatible"})
    if not ok:
        return run.result

    def mul(i, j):
        (k,) = prod[i][j]
        return k

    add = a.qadd
    z, o = a.class_of[nm.zero], a.class_of[(R.one,)]
    C = range(n)
    laws = all(
        add(add(x, y), w) == add(x, add(y, w)) and mul(mul(x, y), w) == mul(x, mul(y, w))
        and mul(x, add(y, w)) == add(mul(x, y), mul(x, w))
        and mul(add(x, y), w) == add(mul(x, w), mul(y, w))
        for x in C for y in C for w in C
    ) and all(add(x, z) == x and mul(x, o) == x == mul(o, x) and mul(x, z) == z == mul(z, x)
              and add(x, y) == add(y, x) for x in C for y in C)
    run.check(laws, lambda: {"reason": "quotient is not a semiring"})
    run.check(monoid_is_ub(list(C), add), lambda: {"reason": "quotient semiring not ub"})
    return run.result


def _quotient_module(a: Ambient):
    run, R, nm = _Run(), a.R, a.nm
    E = R.elements()
    # Green's classes of R itself
    rbelow = {b: {x for x in E for zz in E if R.add(x, zz) == b} for b in E}
    rcls = {x: frozenset(y for y in E if y in rbelow[x] and x in rbelow[y]) for x in E}
    for r in E:
        for r2 in rcls[r]:
            for v in a.V:
                for v2 in a.classes[a.class_of[v]]:
                    ok = a.class_of[nm.smul(r, v)] == a.class_of[nm.smul(r2, v2)]
                    if not run.check(ok, lambda: {"r": R.element_to_json(r),
                                                  "r2": R.element_to_json(r2),
                                                  "v": a.ser([v]), "v2": a.ser([v2])}):
                        return run.result
    reps = [min(c, key=_ordered_scalar_key(R)) for c in a.classes]

    def act(r, k):
        return a.class_of[nm.smul(r, reps[k])]

    n = len(reps)
    z = a.class_of[nm.zero]
    for r in E:
        for s in E:
            for k in range(n):
                for m in range(n):
                    ok = (act(r, a.qadd(k, m)) == a.qadd(act(r, k), act(r, m))
                          and act(R.add(r, s), k) == a.qadd(act(r, k), act(s, k))
                          and act(R.mul(r, s), k) == act(r, act(s, k))
                          and act(R.one, k) == k and act(R.zero, k) == z and act(r, z) == z)
                    if not run.check(ok, lambda: {"reason": "module axiom fails on quotient"}):
                        return run.result
    return run.result


def _quotient_decomposition(a: Ambient):
    run = _Run()
    for W1, W2 in a.direct_pairs:
        c1, c2 = sorted(_image(a, W1)), sorted(_image(a, W2))
        sums = [a.qadd(x, y) for x in c1 for y in c2]
        ok = len(set(sums)) == len(sums) == len(a.classes)
        run.check(ok, lambda: {"W1": a.ser(W1), "W2": a.ser(W2)})
    return run.result


REGISTRY: list[Claim] = [
    Claim("weak-zero-split", "with T a weak complement of W, a = a' + (w1 + w2) in T forces "
          "w1 = w2 = 0 and a = a'", _lemma_weak_zero, _needs_lzs),
    Claim("weak-descent", "a weak complement T splits along any V = Y + Z as "
          "(T ∩ Y) + (T ∩ Z)", _descent, _needs_lzs),
    Claim("weak-contained", "a weak complement of W lies in every U with W + U = V",
          _weak_contained, _needs_lzs),
    Claim("weak-unique", "a submodule lacking zero sums has at most one weak complement",
          _weak_unique, _needs_lzs),
    Claim("direct-complement-unique", "direct complements are unique", _direct_unique, _needs_lzs),
    Claim("complement-antitone", "T ⊆ Y implies Y^c ⊆ T^c", _antitone, _needs_lzs),
    Claim("fourfold-refinement", "V = T⊕W = Y⊕Z refines to (T∩Y)⊕(T∩Z)⊕(W∩Y)⊕(W∩Z)",
          _fourfold, _needs_lzs),
    Claim("sum-refinement", "T + Y = (T∩Y) ⊕ (T∩Z) ⊕ (W∩Y)", _sum_refinement, _needs_lzs),
    Claim("complement-formulas", "(T+Y)^c = T^c ∩ Y^c and "
          "(T∩Y)^c = (T∩Y^c) ⊕ (T^c∩Y) ⊕ (T^c∩Y^c)", _complement_formulas, _needs_lzs),
    Claim("family-refinement", "a finite family of summands refines V into the parts "
          "U_J ∩ U*_(I∖J)", _family, _needs_lzs),
    Claim("indecomposable-pair", "distinct indecomposable summands meet in zero and sum "
          "directly", _indecomposable_pair, _needs_lzs),
    Claim("indecomposable-independence", "an indecomposable summand meets the sum of the "
          "others in zero", _independence, _needs_lzs),
    Claim("socle-direct-summand", "dsoc(V) is the direct sum of the indecomposable summands, "
          "with complement the meet of their complements", _socle, _needs_lzs),
    Claim("socle-residual-submodule", "if R is additively generated by units, "
          "(V ∖ dsoc V) ∪ {0} is a submodule", _residual, _residual_gate),
    Claim("projective-primitive", "indecomposable summands of R are Re with e = π(1) "
          "primitive; indecomposable summands of R^n are isomorphic to some Re",
          _projective_primitive, _needs_ring_lzs, "semiring"),
    Claim("idempotent-socle-equivalence", "dsoc(R) = R iff 1 is a sum of orthogonal "
          "primitive idempotents iff R splits into indecomposables",
          _idempotent_equivalence, _needs_ring_lzs, "semiring"),
    Claim("projective-unique", "R^n is uniquely a direct sum of copies of the Re_i, "
          "each n times", _projective_unique, _needs_ring_lzs, "semiring"),
    Claim("sa-forces-lzs", "a weak complement with additively closed set complement forces W "
          "to lack zero sums", _sa_forces_lzs),
    Claim("sa-equivalences", "SA iff the set complement is an ideal iff m-fold sums "
          "absorb (m ≤ 3)", _sa_equivalences),
    Claim("sa-preimage", "preimages of SA submodules under projections are SA submodules",
          _sa_preimage),
    Claim("sa-lattice", "meets of SA submodules and unions of chains of SA submodules are SA",
          _sa_lattice),
    Claim("sa-unique-weak", "an SA submodule meeting W in zero with W + T = V is W's unique "
          "weak complement, and lies in every SA U with W + U = V", _sa_unique_weak),
    Claim("semidirect-transitivity", "W ⋉ S and (W + S) ⋉ T give S ⋉ T, W ⋉ T and "
          "W ⋉ (S + T)", _semidirect_transitivity),
    Claim("mixed-transitivity", "S weak in W + S and T semidirect over W + S make S + T a "
          "weak complement of W", _mixed_transitivity),
    Claim("sa-containment", "W lacking zero sums, T SA, W + T ⊆ W + U and W ∩ T ⊆ W ∩ U "
          "imply T ⊆ U", _sa_containment, _cubic_gate),
    Claim("complement-hierarchy", "direct ⇒ semidirect ⇒ weak ⇒ trivial intersection",
          _hierarchy),
    Claim("quotient-ub", "V/≡ is upper bound; V is ub iff its classes are singletons",
          _quotient_ub),
    Claim("ub-implies-lzs", "an upper bound module lacks zero sums", _ub_lzs),
    Claim("point-hull-class", "the convex hull of a point is its class", _point_hull),
    Claim("convex-class-union", "S is convex iff it is a union of classes with convex image",
          _convex_classes),
    Claim("convex-iff-sa", "a subset containing zero is convex iff it is SA", _convex_iff_sa),
    Claim("sa-quotient", "a submodule is SA iff it is a union of classes with SA image",
          _sa_quotient),
    Claim("quotient-semiring", "R/≡ is a ub semiring", _quotient_semiring, _needs_whole_rank1,
          "semiring"),
    Claim("quotient-module", "V/≡ is a module over R/≡", _quotient_module),
    Claim("quotient-decomposition", "V = W1 ⊕ W2 induces V/≡ = W̄1 ⊕ W̄2",
          _quotient_decomposition),
]

# test-only claim whose conclusion is deliberately negated
BROKEN_CLAIM = Claim("broken-negated-descent", "NEGATED: T is never (T∩Y) + (T∩Z)",
                     lambda a: _negated(a), _needs_lzs)


def _negated(a: Ambient):
    run = _Run()
    for W, T in a.weak_pairs:
        for Y, Z in a.cover_pairs:
            ok = a.nm.plus(T & Y, T & Z) != T
            if not run.check(ok, lambda: {"W": a.ser(W), "T": a.ser(T), "Y": a.ser(Y),
                                          "Z": a.ser(Z)}):
                return run.result
    return run.result


def claim_ids() -> list[str]:
    return sorted(c.claim_id for c in REGISTRY)


# -- running -------------------------------------------------------------------


@dataclass
class ClaimResult:
    claim_id: str
    instances_checked: int
    status: str
    configurations: int = 0
    skipped_instances: int = 0
    reason: str | None = None
    certificate: dict | None = None

    def to_json(self) -> dict:
        return {
            "claimId": self.claim_id,
            "status": self.status,
            "instancesChecked": self.instances_checked,
            "configurations": self.configurations,
            "skippedInstances": self.skipped_instances,
            "reason": self.reason,
            "certificate": self.certificate,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClaimResult":
        return cls(obj["claimId"], obj["instancesChecked"], obj["status"], obj["configurations"],
                   obj["skippedInstances"], obj.get("reason"), obj.get("certificate"))


def ambients(corpus: InstanceCorpus) -> list[Ambient]:
    """Every ambient module of the corpus, sharing a peer table for rank lookups."""
    peers: dict = {}
    out = []
    for inst in corpus.instances:
        F = free_module(inst.semiring, inst.rank, corpus.config.budget)
        whole = Ambient(inst, (v.entries for v in F.vectors), "whole", corpus.config, peers)
        peers[(inst.semiring, inst.rank)] = whole
        out.append(whole)
        if F.size <= corpus.config.sub_ambient_size:
            for k, S in enumerate(whole.subs):
                if 1 < len(S) < F.size:
                    out.append(Ambient(inst, S, f"sub{k}", corpus.config, peers))
    return out


def _select(claim_filter) -> list[Claim]:
    if claim_filter is None:
        return list(REGISTRY)
    wanted = [c.strip() for c in (claim_filter.split(",") if isinstance(claim_filter, str)
                                  else claim_filter) if c.strip()]
    known = {c.claim_id: c for c in REGISTRY + [BROKEN_CLAIM]}
    unknown = [w for w in wanted if w not in known]
    if unknown:
        raise PreconditionError(f"unknown claim ids: {', '.join(unknown)}")
    return [known[w] for w in wanted]


def run_claims(corpus: InstanceCorpus, claim_filter=None, *, include_broken: bool = False,
               contexts: list[Ambient] | None = None) -> list[ClaimResult]:
    """Check the selected claims on every ambient of the corpus.

    Results are sorted by claim id.  Instances failing a claim's hypotheses
    are counted as skipped, never as counterexamples.
    """
    claims = _select(claim_filter)
    if include_broken and BROKEN_CLAIM not in claims:
        claims.append(BROKEN_CLAIM)
    ctxs = ambients(corpus) if contexts is None else contexts
    results = []
    for claim in sorted(claims, key=lambda c: c.claim_id):
        checked = configs = skipped = 0
        reasons: list[str] = []
        cert = None
        for a in ctxs:
            reason = claim.gate(a)
            if reason is None and claim.scope == "semiring":
                reason = _needs_whole_rank1(a)
            if reason is not None:
                skipped += 1
                if reason not in reasons:
                    reasons.append(reason)
                continue
            count, witness = claim.check(a)
            if count:
                checked += 1
                configs += count
            if witness is not None:
                cert = {"claim": claim.claim_id, "instance": a.describe(), "witness": witness}
                break
        if cert is not None:
            status, reason = "counterexample", None
        elif checked:
            status, reason = "verified", None
        else:
            status = "skipped"
            reason = "; ".join(reasons) or "hypotheses never satisfied"
        results.append(ClaimResult(claim.claim_id, checked, status, configs, skipped, reason,
                                   cert))
    return results


def ambient_from_certificate(cert: dict, config: CorpusConfig | None = None) -> Ambient:
    inst = cert["instance"]
    R = Semiring.from_json(inst["semiring"], name=inst.get("semiring_name", ""))
    elems = [tuple(R.element_from_json(x) for x in v) for v in inst["ambient"]]
    config = CorpusConfig() if config is None else config
    rank = inst["rank"]
    peers: dict = {}
    a = Ambient(Instance(R, rank), elems, inst["label"], config, peers)
    if a.is_whole:
        peers[(R, rank)] = a
    return a


def reverify_certificate(cert: dict) -> bool:
    """Rebuild the instance from the certificate alone and confirm the counterexample."""
    claim = {c.claim_id: c for c in REGISTRY + [BROKEN_CLAIM]}[cert["claim"]]
    a = ambient_from_certificate(cert)
    _, witness = claim.check(a)
    return witness is not None


# -- hierarchy census ----------------------------------------------------------

GAPS = ("semidirect-not-direct", "weak-not-semidirect", "trivial-intersection-not-weak")


def hierarchy_census(corpus: InstanceCorpus | None = None,
                     contexts: list[Ambient] | None = None) -> dict:
    """Exact-level counts over all pairs (W, T) of submodules of every ambient.

    ``per_instance`` lists, for each ambient, its level counts and every
    (W, T) pair landing in a strict gap of the hierarchy.
    """
    ctxs = ambients(corpus) if contexts is None else contexts
    levels = dict.fromkeys(("direct", "semidirect", "weak", "trivial-intersection", "none"), 0)
    violations = dict.fromkeys(("direct=>semidirect", "semidirect=>weak",
                                "weak=>trivial-intersection", "direct=>trivial-intersection"), 0)
    gap_of = {"semidirect": "semidirect-not-direct", "weak": "weak-not-semidirect",
              "trivial-intersection": "trivial-intersection-not-weak"}
    witnesses: dict = {}
    per_instance = {}
    for a in ctxs:
        local = dict.fromkeys(levels, 0)
        triples: dict = {g: [] for g in GAPS}
        covering = set(a.cover_pairs)
        for W in a.subs:
            for T in a.subs:
                if (W, T) not in covering:
                    local["none"] += 1
                    continue
                lv = hierarchy_levels(a, W, T)
                exact = next((k for k in ("direct", "semidirect", "weak", "trivial-intersection")
                              if lv[k]), "none")
                local[exact] += 1
                violations["direct=>semidirect"] += lv["direct"] and not lv["semidirect"]
                violations["semidirect=>weak"] += lv["semidirect"] and not lv["weak"]
                violations["weak=>trivial-intersection"] += (lv["weak"]
                                                             and not lv["trivial-intersection"])
                violations["direct=>trivial-intersection"] += (lv["direct"]
                                                               and W & T != a.zero_set)
                gap = gap_of.get(exact)
                if gap:
                    pair = {"W": a.ser(W), "T": a.ser(T)}
                    triples[gap].append(pair)
                    witnesses.setdefault(gap, {"instance": a.instance.name, "label": a.label,
                                               **pair})
        for k, v in local.items():
            levels[k] += v
        per_instance[f"{a.instance.name}/{a.label}"] = {"levels": local, "gaps": triples}
    gaps = {gap_of[k]: levels[k] for k in gap_of}
    return {"levels": levels, "gaps": gaps, "violations": violations, "witnesses": witnesses,
            "per_instance": per_instance}


def dumps(obj) -> str:
    """Canonical JSON used for every report: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
