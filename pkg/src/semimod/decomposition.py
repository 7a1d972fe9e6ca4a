"""Complements, direct decompositions, the decomposition socle and SA submodules.

All operations take enumerated :class:`~semimod.module.Submodule` objects.
The ambient module ``V`` is itself a submodule of some free module R^n;
``W``, ``T``, ``Y``, ``Z`` ... must lie inside it.  Each theorem-level
operation recomputes its hypotheses (raising :class:`PreconditionError`)
and its conclusion (raising :class:`InvariantViolation`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import semiring as sr
from .errors import InvariantViolation, MultiplicityError, PreconditionError, UnsupportedOperation
from .module import FreeModule, Submodule, Vector, bits, free_module, lacks_zero_sums, popcount
from .naive import NaiveModule

LEVELS = ("none", "trivial-intersection", "weak", "semidirect", "direct")
_RANK = {name: i for i, name in enumerate(LEVELS)}


@dataclass(frozen=True)
class ComplementClass:
    """Strongest complement relation between W and T inside V.

    ``witness`` (JSON-ready) is the first tuple, in canonical order, that
    breaks the next level up; ``None`` at level ``direct``.
    """

    level: str
    witness: dict | None = None

    def at_least(self, level: str) -> bool:
        return _RANK[self.level] >= _RANK[level]

    def to_json(self) -> dict:
        return {"level": self.level, "witness": self.witness}

    @classmethod
    def from_json(cls, obj: dict) -> "ComplementClass":
        return cls(obj["level"], obj.get("witness"))


@dataclass
class DecompositionReport:
    parts: list[Submodule]
    kind: str = "direct"
    certified: bool = False
    labels: list | None = None

    def pruned(self) -> list[Submodule]:
        return [p for p in self.parts if not p.is_zero()]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "certified": self.certified,
            "parts": [
                {"generators": [g.to_json() for g in p.generators],
                 "elements": [v.to_json() for v in p.elements]}
                for p in self.parts
            ],
        }
        if self.labels is not None:
            out["labels"] = [list(j) for j in self.labels]
        return out

    @classmethod
    def from_json(cls, obj: dict, ambient: FreeModule) -> "DecompositionReport":
        parts = [
            ambient.from_indices(ambient.index_of(ambient.vector_from_json(v))
                                 for v in p["elements"])
            for p in obj["parts"]
        ]
        labels = [tuple(j) for j in obj["labels"]] if "labels" in obj else None
        return cls(parts, obj["kind"], obj["certified"], labels)


# -- internal helpers on masks ---------------------------------------------


def _amb(*subs: Submodule) -> FreeModule:
    amb = subs[0].ambient
    for s in subs:
        if s.ambient != amb:
            raise PreconditionError("submodules live in different ambient modules")
        if s.mask is None:
            raise UnsupportedOperation("this operation needs enumerated submodules")
    return amb


def _inside(V: Submodule, *subs: Submodule):
    for s in subs:
        if s.mask & ~V.mask:
            raise PreconditionError(f"{s!r} is not contained in the ambient module")


def _zero(amb: FreeModule) -> int:
    return 1 << amb.zero_index


def _vec(amb: FreeModule, i: int) -> list:
    return amb.vectors[i].to_json()


def _weak_witness(amb, W, T):
    zi = amb.zero_index
    tab = amb.add_table
    tl = list(bits(T))
    for w in bits(W):
        if w == zi:
            continue
        for t in tl:
            if (T >> tab[w][t]) & 1:
                return (w, t, tab[w][t])
    return None


def _collision(amb, W, T, same_part_only: bool):
    """First (w1,t1,w2,t2) with w1+t1 == w2+t2 that breaks uniqueness.

    With ``same_part_only`` only a differing W-part counts (semidirect);
    otherwise any second representation does (direct).
    """
    tab = amb.add_table
    tl = list(bits(T))
    first: dict[int, tuple[int, int]] = {}
    for w in bits(W):
        for t in tl:
            s = tab[w][t]
            prev = first.get(s)
            if prev is None:
                first[s] = (w, t)
            elif prev[0] != w or not same_part_only:
                return prev + (w, t)
    return None


def _is_direct_pair(amb, V, A, B) -> bool:
    if A & B != _zero(amb) or popcount(A) * popcount(B) != popcount(V):
        return False
    return amb.sum_mask(A, B) == V


def _complement_masks(amb, V, T) -> list[int]:
    return [W for W in amb.lattice_masks(V) if _is_direct_pair(amb, V, T, W)]


def _direct_family(amb, V, parts: Sequence[int]) -> bool:
    acc = _zero(amb)
    for p in parts:
        if acc & p != _zero(amb):
            return False
        s = amb.sum_mask(acc, p)
        if popcount(s) != popcount(acc) * popcount(p):
            return False
        acc = s
    return acc == V


def _naive(V: Submodule) -> tuple[NaiveModule, callable]:
    nm = NaiveModule(V.ambient.semiring, (v.entries for v in V.elements))
    return nm, lambda S: frozenset(v.entries for v in S.elements)


def certify_direct(V: Submodule, parts: Sequence[Submodule]) -> bool:
    """Independent set-based check that ``parts`` form a direct decomposition of V."""
    nm, as_set = _naive(V)
    return nm.is_direct_family(as_set(V), [as_set(p) for p in parts])


# -- classification ----------------------------------------------------------


def is_weak_complement(V, W, T) -> bool:
    amb = _amb(V, W, T)
    return amb.sum_mask(W.mask, T.mask) == V.mask and _weak_witness(amb, W.mask, T.mask) is None


def is_semidirect_complement(V, W, T) -> bool:
    amb = _amb(V, W, T)
    return (amb.sum_mask(W.mask, T.mask) == V.mask
            and _collision(amb, W.mask, T.mask, True) is None)


def is_direct_complement(V, W, T) -> bool:
    amb = _amb(V, W, T)
    return (amb.sum_mask(W.mask, T.mask) == V.mask
            and _collision(amb, W.mask, T.mask, False) is None)


def classify(V: Submodule, W: Submodule, T: Submodule) -> ComplementClass:
    amb = _amb(V, W, T)
    _inside(V, W, T)
    s = amb.sum_mask(W.mask, T.mask)
    if s != V.mask:
        missing = next(bits(V.mask & ~s))
        return ComplementClass("none", {"reason": "sum", "missing": _vec(amb, missing)})
    meet = W.mask & T.mask & ~_zero(amb)
    if meet:
        return ComplementClass("none",
                               {"reason": "intersection", "element": _vec(amb, next(bits(meet)))})
    wit = _weak_witness(amb, W.mask, T.mask)
    if wit is not None:
        w, t, t2 = wit
        return ComplementClass("trivial-intersection",
                               {"w": _vec(amb, w), "t1": _vec(amb, t), "t2": _vec(amb, t2)})
    wit = _collision(amb, W.mask, T.mask, True)
    if wit is not None:
        return ComplementClass("weak", _pair_witness(amb, wit))
    wit = _collision(amb, W.mask, T.mask, False)
    if wit is not None:
        return ComplementClass("semidirect", _pair_witness(amb, wit))
    return ComplementClass("direct")


def _pair_witness(amb, wit) -> dict:
    w1, t1, w2, t2 = wit
    return {"w1": _vec(amb, w1), "t1": _vec(amb, t1), "w2": _vec(amb, w2), "t2": _vec(amb, t2)}


# -- complements -------------------------------------------------------------


def direct_complements(V: Submodule, T: Submodule) -> list[Submodule]:
    """All W with V = T (+) W, without any uniqueness assertion."""
    amb = _amb(V, T)
    _inside(V, T)
    return [amb.from_mask(m) for m in _complement_masks(amb, V.mask, T.mask)]


def direct_complement(V: Submodule, T: Submodule) -> Submodule | None:
    """The direct complement of T in V, or ``None`` if T is not a direct summand.

    If V has zero sums and several complements exist, raises
    :class:`MultiplicityError` listing them.
    """
    cands = direct_complements(V, T)
    if len(cands) > 1:
        if lacks_zero_sums(V):
            raise InvariantViolation(f"{len(cands)} direct complements in a module "
                                     "lacking zero sums")
        raise MultiplicityError(f"{T!r} has {len(cands)} direct complements", cands)
    return cands[0] if cands else None


def weak_complements(V: Submodule, W: Submodule) -> list[Submodule]:
    amb = _amb(V, W)
    _inside(V, W)
    out = []
    nw = popcount(W.mask)
    nv = popcount(V.mask)
    for T in amb.lattice_masks(V.mask):
        if nw * popcount(T) < nv:
            continue
        if amb.sum_mask(W.mask, T) == V.mask and _weak_witness(amb, W.mask, T) is None:
            out.append(amb.from_mask(T))
    if len(out) > 1 and lacks_zero_sums(W):
        raise InvariantViolation(f"{len(out)} weak complements of a submodule "
                                 "lacking zero sums")
    return out


def _require_lzs(V: Submodule):
    if not lacks_zero_sums(V):
        raise PreconditionError("the ambient module has zero sums")


def _require_direct(V, A, B, what):
    amb = V.ambient
    if not _is_direct_pair(amb, V.mask, A.mask, B.mask):
        raise PreconditionError(f"{what} is not a direct decomposition of V")


def descend(V, W, T, Y, Z) -> tuple[Submodule, Submodule]:
    """Split a weak complement T along V = Y + Z, returning (T∩Y, T∩Z)."""
    amb = _amb(V, W, T, Y, Z)
    _inside(V, W, T, Y, Z)
    _require_lzs(V)
    if not is_weak_complement(V, W, T):
        raise PreconditionError("T is not a weak complement of W")
    if amb.sum_mask(Y.mask, Z.mask) != V.mask:
        raise PreconditionError("Y + Z is not V")
    ty, tz = T.mask & Y.mask, T.mask & Z.mask
    if amb.sum_mask(ty, tz) != T.mask:
        raise InvariantViolation("T is not (T∩Y) + (T∩Z)")
    return amb.from_mask(ty), amb.from_mask(tz)


def refine4(V, T, W, Y, Z) -> DecompositionReport:
    """Common refinement (T∩Y, T∩Z, W∩Y, W∩Z) of V = T⊕W = Y⊕Z."""
    amb = _amb(V, T, W, Y, Z)
    _inside(V, T, W, Y, Z)
    _require_lzs(V)
    _require_direct(V, T, W, "T + W")
    _require_direct(V, Y, Z, "Y + Z")
    masks = [T.mask & Y.mask, T.mask & Z.mask, W.mask & Y.mask, W.mask & Z.mask]
    if not _direct_family(amb, V.mask, masks):
        raise InvariantViolation("fourfold refinement is not a direct decomposition")
    parts = [amb.from_mask(m) for m in masks]
    return DecompositionReport(parts, "direct", certify_direct(V, parts))


@dataclass
class SumReport:
    total: Submodule
    decomposition: DecompositionReport
    sum_complement: Submodule
    meet_complement: Submodule


def sum_decomposition(V, T, W, Y, Z) -> SumReport:
    """T + Y as (T∩Y) ⊕ (T∩Z) ⊕ (W∩Y), plus the complements of T + Y and T ∩ Y."""
    amb = _amb(V, T, W, Y, Z)
    _inside(V, T, W, Y, Z)
    _require_lzs(V)
    _require_direct(V, T, W, "T + W")
    _require_direct(V, Y, Z, "Y + Z")
    total = amb.sum_mask(T.mask, Y.mask)
    masks = [T.mask & Y.mask, T.mask & Z.mask, W.mask & Y.mask]
    if not _direct_family(amb, total, masks):
        raise InvariantViolation("T + Y is not (T∩Y) ⊕ (T∩Z) ⊕ (W∩Y)")
    parts = [amb.from_mask(m) for m in masks]
    total_s = amb.from_mask(total)
    report = DecompositionReport(parts, "direct", certify_direct(total_s, parts))

    sum_c = direct_complement(V, total_s)
    if sum_c is None or sum_c.mask != W.mask & Z.mask:
        raise InvariantViolation("complement of T + Y is not T^c ∩ Y^c")
    meet = amb.from_mask(T.mask & Y.mask)
    meet_c = direct_complement(V, meet)
    rest = [T.mask & Z.mask, W.mask & Y.mask, W.mask & Z.mask]
    if meet_c is None or not _direct_family(amb, meet_c.mask, rest):
        raise InvariantViolation("complement of T ∩ Y does not match the three-part formula")
    return SumReport(total_s, report, sum_c, meet_c)


def family_refinement(V: Submodule, family: Sequence[Submodule],
                      complements: Sequence[Submodule] | None = None,
                      max_family: int = 4) -> DecompositionReport:
    """Parts U_J ∩ U*_{I∖J} over all J ⊆ I.

    U_J is the intersection of the family members indexed by J and U*_K the
    intersection of the complements indexed by K (V when empty).  Parts are
    ordered by |J| descending, then lexicographically; ``labels`` holds J.
    """
    _require_lzs(V)
    if len(family) > max_family:
        raise PreconditionError(f"family of {len(family)} exceeds the bound {max_family}")
    amb = _amb(V, *family) if family else V.ambient
    _inside(V, *family)
    comps = []
    for i, U in enumerate(family):
        if complements is not None:
            c = complements[i]
            _require_direct(V, U, c, f"family member {i} with its complement")
        else:
            c = direct_complement(V, U)
            if c is None:
                raise PreconditionError(f"family member {i} is not a direct summand")
        comps.append(c.mask)
    idx = range(len(family))
    labels = [J for k in range(len(family), -1, -1) for J in itertools.combinations(idx, k)]
    masks = []
    for J in labels:
        m = V.mask
        for i in idx:
            m &= family[i].mask if i in J else comps[i]
        masks.append(m)
    if not _direct_family(amb, V.mask, masks):
        raise InvariantViolation("family refinement is not a direct decomposition")
    parts = [amb.from_mask(m) for m in masks]
    return DecompositionReport(parts, "direct", certify_direct(V, parts), labels)


# -- indecomposables and the socle -----------------------------------------


def _nontrivial_split(amb, V: int) -> tuple[int, int] | None:
    z = _zero(amb)
    for A in amb.lattice_masks(V):
        if A == z or A == V:
            continue
        for B in _complement_masks(amb, V, A):
            return A, B
    return None


def is_indecomposable(V: Submodule) -> bool:
    amb = _amb(V)
    if V.mask == _zero(amb):
        raise PreconditionError("the zero module is neither decomposable nor indecomposable")
    return _nontrivial_split(amb, V.mask) is None


def _indecomposable_mask(amb, m) -> bool:
    return m != _zero(amb) and _nontrivial_split(amb, m) is None


def indecomposable_summands(V: Submodule) -> list[Submodule]:
    amb = _amb(V)
    out = []
    for T in amb.lattice_masks(V.mask):
        if _indecomposable_mask(amb, T) and _complement_masks(amb, V.mask, T):
            out.append(amb.from_mask(T))
    return out


def decompose(V: Submodule) -> DecompositionReport:
    """Split V into indecomposable summands by repeated splitting."""
    amb = _amb(V)

    def split(m):
        if m == _zero(amb):
            return []
        pair = _nontrivial_split(amb, m)
        if pair is None:
            return [m]
        return split(pair[0]) + split(pair[1])

    masks = sorted(split(V.mask), key=lambda m: (popcount(m), list(bits(m))))
    parts = [amb.from_mask(m) for m in masks]
    if not _direct_family(amb, V.mask, masks):
        raise InvariantViolation("splitting did not produce a direct decomposition")
    return DecompositionReport(parts, "direct", certify_direct(V, parts))


@dataclass
class DsocReport:
    socle: Submodule
    complement: Submodule
    summands: list[Submodule]
    residual_is_submodule: bool | None = None

    def to_json(self) -> dict:
        return {
            "dsoc": {"generators": [g.to_json() for g in self.socle.generators],
                     "elements": [v.to_json() for v in self.socle.elements]},
            "complement": {"generators": [g.to_json() for g in self.complement.generators],
                           "elements": [v.to_json() for v in self.complement.elements]},
            "summands": [{"generators": [g.to_json() for g in s.generators]}
                         for s in self.summands],
            "is_whole": self.complement.is_zero(),
            "residual_is_submodule": self.residual_is_submodule,
        }


def dsoc(V: Submodule) -> DsocReport:
    """Decomposition socle: the sum of all indecomposable direct summands.

    Verifies that the sum is direct and that the intersection of the
    summands' complements is a direct complement of it.  When the semiring
    is additively generated by its units, also checks that the elements
    outside the socle, together with zero, form a submodule.
    """
    amb = _amb(V)
    _require_lzs(V)
    summands = indecomposable_summands(V)
    masks = [s.mask for s in summands]
    socle = amb.sum_mask(_zero(amb), _zero(amb))
    for m in masks:
        socle = amb.sum_mask(socle, m)
    if not _direct_family(amb, socle, masks):
        raise InvariantViolation("indecomposable summands do not form a direct sum")
    comp = V.mask
    for m in masks:
        cs = _complement_masks(amb, V.mask, m)
        comp &= cs[0]
    if not _is_direct_pair(amb, V.mask, socle, comp):
        raise InvariantViolation("intersection of complements is not a complement of dsoc")
    residual = None
    if sr.additively_generated_by_units(amb.semiring):
        residual = amb.is_closed((V.mask & ~socle) | _zero(amb))
        if not residual:
            raise InvariantViolation("(V \\ dsoc(V)) ∪ {0} is not a submodule")
    return DsocReport(amb.from_mask(socle), amb.from_mask(comp), summands, residual)


# -- summand absorbing ---------------------------------------------------------


def _as_mask(V: Submodule, S) -> int:
    if isinstance(S, Submodule):
        return S.mask
    if isinstance(S, int):
        return S
    amb = V.ambient
    m = 0
    for v in S:
        m |= 1 << amb.index_of(v)
    return m


def _sa_pairs(amb, V, S) -> bool:
    tab = amb.add_table
    idx = list(bits(V))
    for x in idx:
        for y in idx:
            if (S >> tab[x][y]) & 1 and not ((S >> x) & 1 and (S >> y) & 1):
                return False
    return True


def _sa_ideal(amb, V, S) -> bool:
    tab = amb.add_table
    outside = list(bits(V & ~S))
    idx = list(bits(V))
    return all(not (S >> tab[w][v]) & 1 for w in outside for v in idx)


def _sa_triples(amb, V, S) -> bool:
    tab = amb.add_table
    idx = list(bits(V))
    for x in idx:
        for y in idx:
            xy = tab[x][y]
            for z in idx:
                if (S >> tab[xy][z]) & 1 and not ((S >> x) & (S >> y) & (S >> z) & 1):
                    return False
    return True


def is_SA(V: Submodule, W) -> bool:
    """Summand absorbing: x + y ∈ W forces x, y ∈ W.

    ``W`` may be a submodule, a mask, or an iterable of vectors.  The pair,
    ideal and three-term formulations are all evaluated and must agree.
    """
    amb = _amb(V)
    S = _as_mask(V, W)
    if S & ~V.mask:
        raise PreconditionError("W is not a subset of V")
    i = _sa_pairs(amb, V.mask, S)
    ii = _sa_ideal(amb, V.mask, S)
    iii = _sa_triples(amb, V.mask, S)
    # the one-term version asks nothing beyond S ⊆ V
    if not i == ii == iii:
        raise InvariantViolation(f"SA formulations disagree: pairs={i} ideal={ii} triples={iii}")
    return i


@dataclass
class SAComplementReport:
    weak_complement: bool
    unique: bool
    w_lacks_zero_sums: bool
    contained_in_u: bool | None = None
    unique_in_u: bool | None = None

    @property
    def certified(self) -> bool:
        return all(v is not False for v in vars(self).values())


def sa_complement_theorem(V, W, T, U=None) -> SAComplementReport:
    """Certify that an SA submodule T meeting W trivially is W's only weak complement."""
    amb = _amb(V, W, T, *([U] if U is not None else []))
    _inside(V, W, T)
    if amb.sum_mask(W.mask, T.mask) != V.mask:
        raise PreconditionError("W + T is not V")
    if W.mask & T.mask != _zero(amb):
        raise PreconditionError("W ∩ T is not zero")
    if not is_SA(V, T):
        raise PreconditionError("T is not summand absorbing in V")
    weak = weak_complements(V, W) if lacks_zero_sums(W) else _all_weak(V, W)
    report = SAComplementReport(
        weak_complement=is_weak_complement(V, W, T),
        unique=[c.mask for c in weak] == [T.mask],
        # V \ T is closed under addition since T is SA
        w_lacks_zero_sums=lacks_zero_sums(W),
    )
    if U is not None:
        _inside(V, U)
        if amb.sum_mask(W.mask, U.mask) != V.mask or not is_SA(V, U):
            raise PreconditionError("U must be SA in V with W + U = V")
        report.contained_in_u = T <= U
        WU = amb.from_mask(W.mask & U.mask)
        inner = [m for m in amb.lattice_masks(U.mask)
                 if amb.sum_mask(WU.mask, m) == U.mask and _weak_witness(amb, WU.mask, m) is None]
        report.unique_in_u = inner == [T.mask]
    if not report.certified:
        raise InvariantViolation(f"SA complement theorem failed: {report}")
    return report


def _all_weak(V, W):
    amb = V.ambient
    return [amb.from_mask(T) for T in amb.lattice_masks(V.mask)
            if amb.sum_mask(W.mask, T) == V.mask and _weak_witness(amb, W.mask, T) is None]


# -- projections ---------------------------------------------------------------


@dataclass
class Projection:
    """The map w + t ↦ w for a semidirect decomposition V = W ⋉ T."""

    V: Submodule
    W: Submodule
    T: Submodule
    table: dict = field(repr=False)

    def __call__(self, v: Vector) -> Vector:
        amb = self.V.ambient
        return amb.vectors[self.table[amb.index_of(v)]]

    def preimage(self, X: Submodule) -> Submodule:
        m = 0
        for i, j in self.table.items():
            if (X.mask >> j) & 1:
                m |= 1 << i
        return self.V.ambient.from_mask(m)

    def kernel(self) -> Submodule:
        return self.preimage(self.V.ambient.zero_submodule())


def _check_projection(amb, V, table, image, kernel):
    tab = amb.add_table
    idx = list(bits(V))
    for x in idx:
        if table[table[x]] != table[x]:
            raise InvariantViolation("projection is not idempotent")
        for row in amb.smul_table:
            if table[row[x]] != row[table[x]]:
                raise InvariantViolation("projection does not commute with scalars")
        for y in idx:
            if table[tab[x][y]] != tab[table[x]][table[y]]:
                raise InvariantViolation("projection is not additive")
    img = 0
    ker = 0
    for x in idx:
        img |= 1 << table[x]
        if table[x] == amb.zero_index:
            ker |= 1 << x
    if img != image or ker != kernel:
        raise InvariantViolation("projection has the wrong image or kernel")


def projection(V: Submodule, W: Submodule, T: Submodule) -> Projection:
    amb = _amb(V, W, T)
    _inside(V, W, T)
    if not classify(V, W, T).at_least("semidirect"):
        raise PreconditionError("T is not a semidirect complement of W; w + t ↦ w is ill-defined")
    tab = amb.add_table
    table = {}
    for w in bits(W.mask):
        for t in bits(T.mask):
            table[tab[w][t]] = w
    _check_projection(amb, V.mask, table, W.mask, T.mask)
    return Projection(V, W, T, table)


@dataclass
class TransitivityReport:
    mode: str
    facts: dict

    @property
    def certified(self) -> bool:
        return all(self.facts.values())


def semidirect_transitivity(V, W, S, T, mode: str = "sum1", U=None) -> TransitivityReport:
    """Transitivity of semidirect complements, in three flavours.

    ``sum1``: W ⋉ S = W + S and V = (W + S) ⋉ T; certifies S + T = S ⋉ T,
    W + T = W ⋉ T and V = W ⋉ (S + T) via the composed projection.
    ``mixed``: S weak in W + S and T semidirect over W + S; certifies S + T is
    a weak complement of W.
    ``subset``: W lacks zero sums, T is SA, W + T ⊆ W + U and W ∩ T ⊆ W ∩ U;
    certifies T ⊆ U (``S`` is ignored).
    """
    if mode == "subset":
        if U is None:
            raise PreconditionError("subset mode needs U")
        amb = _amb(V, W, T, U)
        _inside(V, W, T, U)
        if not lacks_zero_sums(W):
            raise PreconditionError("W has zero sums")
        if not is_SA(V, T):
            raise PreconditionError("T is not SA in V")
        wt, wu = amb.sum_mask(W.mask, T.mask), amb.sum_mask(W.mask, U.mask)
        if wt & ~wu or (W.mask & T.mask) & ~(W.mask & U.mask):
            raise PreconditionError("need W + T ⊆ W + U and W ∩ T ⊆ W ∩ U")
        report = TransitivityReport(mode, {"T ⊆ U": T <= U})
    else:
        amb = _amb(V, W, S, T)
        _inside(V, W, S, T)
        Um = amb.from_mask(amb.sum_mask(W.mask, S.mask))
        ST = amb.from_mask(amb.sum_mask(S.mask, T.mask))
        if not classify(V, Um, T).at_least("semidirect"):
            raise PreconditionError("T is not a semidirect complement of W + S in V")
        if mode == "mixed":
            if not classify(Um, W, S).at_least("weak"):
                raise PreconditionError("S is not a weak complement of W in W + S")
            report = TransitivityReport(mode, {"S + T weak over W": is_weak_complement(V, W, ST)})
        elif mode == "sum1":
            if not classify(Um, W, S).at_least("semidirect"):
                raise PreconditionError("S is not a semidirect complement of W in W + S")
            p = projection(V, Um, T)
            q = projection(Um, W, S)
            r = {x: q.table[p.table[x]] for x in bits(V.mask)}
            ker = 0
            for x, y in r.items():
                if y == amb.zero_index:
                    ker |= 1 << x
            _check_projection(amb, V.mask, r, W.mask, ker)
            WT = amb.from_mask(amb.sum_mask(W.mask, T.mask))
            report = TransitivityReport(mode, {
                "ker(q∘p) = S + T": ker == ST.mask,
                "V = W ⋉ (S + T)": classify(V, W, ST).at_least("semidirect"),
                "S + T = S ⋉ T": classify(ST, S, T).at_least("semidirect"),
                "W + T = W ⋉ T": classify(WT, W, T).at_least("semidirect"),
                "V = (W ⋉ S) ⋉ T": classify(V, Um, T).at_least("semidirect"),
            })
        else:
            raise PreconditionError(f"unknown mode {mode!r}")
    if not report.certified:
        raise InvariantViolation(f"transitivity failed: {report.facts}")
    return report


# -- projective decomposition ------------------------------------------------


def _cyclic_iso(amb: FreeModule, P: int, e_amb: FreeModule, e: int) -> int | None:
    """A generator g of P with r·e ↦ r·g a bijection Re → P, if one exists."""
    Re = [row[e] for row in e_amb.smul_table]
    for g in bits(P):
        image = [row[g] for row in amb.smul_table]
        f = {}
        ok = True
        for src, dst in zip(Re, image):
            if f.setdefault(src, dst) != dst:
                ok = False
                break
        if not ok:
            continue
        vals = set(f.values())
        if len(vals) == len(f) and sum(1 << v for v in vals) == P:
            return g
    return None


def _all_splittings(amb, m, memo) -> frozenset:
    """Every way of writing m as a direct sum of indecomposables (as sets of masks)."""
    if m in memo:
        return memo[m]
    z = _zero(amb)
    out = set()
    split_found = False
    for A in amb.lattice_masks(m):
        if A == z or A == m:
            continue
        for B in _complement_masks(amb, m, A):
            if A > B:
                continue
            split_found = True
            for a in _all_splittings(amb, A, memo):
                for b in _all_splittings(amb, B, memo):
                    out.add(a | b)
    if not split_found:
        out = {frozenset({m})}
    memo[m] = frozenset(out)
    return memo[m]


@dataclass
class ProjectiveReport:
    dsoc_is_whole: bool
    partition: list | None
    finite_indecomposable_sum: bool
    summand_idempotents: list = field(default_factory=list)
    multiplicities: dict = field(default_factory=dict)
    unique_splitting: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        agree = self.dsoc_is_whole == (self.partition is not None) == self.finite_indecomposable_sum
        return agree and all(self.unique_splitting.values()) and all(
            ok for ok in (m["ok"] for m in self.multiplicities.values()))

    def to_json(self, R: sr.Semiring) -> dict:
        return {
            "dsoc_is_whole": self.dsoc_is_whole,
            "partition": None if self.partition is None else
            [R.element_to_json(e.value) for e in self.partition],
            "finite_indecomposable_sum": self.finite_indecomposable_sum,
            "summand_idempotents": [R.element_to_json(e) for _, e in self.summand_idempotents],
            "multiplicities": {str(n): m for n, m in self.multiplicities.items()},
            "unique_splitting": {str(n): v for n, v in self.unique_splitting.items()},
            "certified": self.certified,
        }


def projective_decomposition(R: sr.Semiring, max_rank: int = 2,
                             lattice_limit: int = 500) -> ProjectiveReport:
    """Projective structure of a finite semiring lacking zero sums.

    R as a module over itself: its socle, a partition of one into orthogonal
    primitive idempotents, and a splitting into indecomposables must all
    exist together.  Each indecomposable summand P of R is Re with
    e = π_P(1).  For R^n (n ≤ ``max_rank``) every indecomposable summand is
    isomorphic to some Re_i, with each Re_i occurring n times per partition
    member, and the splitting into indecomposables is unique.
    """
    if not R.is_finite:
        raise PreconditionError(f"{R.kind} has an infinite carrier")
    if not sr.lacks_zero_sums(R):
        raise PreconditionError(f"{R.name} has zero sums")
    F1 = free_module(R, 1)
    V = F1.whole()
    soc = dsoc(V)
    partition = sr.partition_of_one(R)
    dec = decompose(V)
    report = ProjectiveReport(
        dsoc_is_whole=soc.socle == V,
        partition=partition,
        finite_indecomposable_sum=dec.certified and all(is_indecomposable(p) for p in dec.parts),
    )
    one = F1.index_of(F1.vector([R.one]))
    for P in soc.summands:
        comp = direct_complement(V, P)
        p = projection(V, P, comp)
        e = F1.vectors[p.table[one]].entries[0]
        if R.mul(e, e) != e or not sr.is_primitive(R, e):
            raise InvariantViolation(f"π_P(1) = {e!r} is not a primitive idempotent")
        if F1.span_mask([F1.index_of(F1.vector([e]))]) != P.mask:
            raise InvariantViolation(f"summand {P!r} is not R·{e!r}")
        report.summand_idempotents.append((P, e))

    if partition is not None:
        es = [F1.index_of(F1.vector([e.value])) for e in partition]
        for n in range(1, max_rank + 1):
            try:
                Fn = free_module(R, n)
                Fn.lattice_masks(limit=lattice_limit)
            except Exception:
                break
            Vn = Fn.whole()
            summands = indecomposable_summands(Vn)
            # isomorphic partition members share one counter
            key = [next(j for j in range(k + 1)
                        if _cyclic_iso(F1, F1.span_mask([e]), F1, es[j]) is not None)
                   for k, e in enumerate(es)]
            counts = {key[k]: 0 for k in range(len(es))}
            ok = True
            for P in summands:
                hit = next((k for k, e in enumerate(es)
                            if _cyclic_iso(Fn, P.mask, F1, e) is not None), None)
                if hit is None:
                    ok = False
                else:
                    counts[key[hit]] += 1
            expected = {c: n * key.count(c) for c in counts}
            ok = ok and counts == expected and _socle_mask(Fn, summands) == Vn.mask
            report.multiplicities[n] = {"counts": [counts[c] for c in sorted(counts)],
                                        "expected": [expected[c] for c in sorted(counts)],
                                        "ok": ok}
            splits = _all_splittings(Fn, Vn.mask, {})
            report.unique_splitting[n] = splits == {frozenset(s.mask for s in summands)}
    if not report.certified:
        raise InvariantViolation(f"projective decomposition failed: {report}")
    return report


def _socle_mask(amb, summands) -> int:
    m = _zero(amb)
    for s in summands:
        m = amb.sum_mask(m, s.mask)
    return m
