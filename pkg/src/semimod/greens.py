"""Green's preorder, its congruence and the upper-bound quotient.

``x ≼ y`` when ``x + z = y`` for some ``z`` in the module; ``≡`` is the
symmetric part.  The quotient by ``≡`` is always upper bound
(``x + y + z = x`` implies ``x + y = x``), and convex subsets containing
zero are exactly the summand-absorbing ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import semiring as sr
from .decomposition import _amb, _as_mask, _inside, _is_direct_pair, is_SA
from .errors import InvariantViolation, PreconditionError, UnsupportedOperation
from .module import FreeModule, Submodule, Vector, bits
from .semiring import NEG_INF


def _as_module(V) -> Submodule:
    return V.whole() if isinstance(V, FreeModule) else V


def below_masks(V: Submodule) -> dict[int, int]:
    """For each y in V, the mask of all x in V with x ≼ y."""
    amb = _amb(V)
    tab = amb.add_table
    idx = list(bits(V.mask))
    below = {y: 0 for y in idx}
    for x in idx:
        row = tab[x]
        for z in idx:
            below[row[z]] |= 1 << x
    return below


def preceq(V, x: Vector, y: Vector) -> bool:
    """Whether ``x + z = y`` for some ``z`` in V."""
    if isinstance(V, FreeModule) and V.semiring.kind == "maxplus-int":
        # z = y works whenever x <= y coordinatewise
        return all(a is NEG_INF or (b is not NEG_INF and a <= b)
                   for a, b in zip(x.entries, y.entries))
    V = _as_module(V)
    if V.mask is None:
        raise UnsupportedOperation("Green's preorder needs an enumerated module")
    amb = V.ambient
    i, j = amb.index_of(x), amb.index_of(y)
    if not ((V.mask >> i) & 1 and (V.mask >> j) & 1):
        raise PreconditionError("both elements must lie in V")
    row = amb.add_table[i]
    return any(row[z] == j for z in bits(V.mask))


def ub_witness(V) -> tuple[Vector, Vector, Vector] | None:
    """First (x, y, z) with x + y + z = x but x + y ≠ x, in canonical order."""
    V = _as_module(V)
    amb = _amb(V)
    tab = amb.add_table
    idx = list(bits(V.mask))
    for x in idx:
        for y in idx:
            xy = tab[x][y]
            if xy == x:
                continue
            for z in idx:
                if tab[xy][z] == x:
                    vs = amb.vectors
                    return vs[x], vs[y], vs[z]
    return None


def is_ub(V) -> bool:
    return ub_witness(V) is None


@dataclass
class QuotientModule:
    """V/≡ with induced addition, scalar action and order.

    ``classes`` hold ambient indices; class ``k`` is represented by its first
    element in canonical order, and classes are sorted by representative.
    ``scalar[a][k]`` is the class of ``a·x`` for ``x`` in class ``k`` and the
    ``a``-th carrier element.
    """

    V: Submodule
    classes: list[list[int]]
    class_of: dict[int, int]
    add: list[list[int]]
    scalar: list[list[int]]
    order: list[list[bool]]
    ub: bool
    source_ub: bool
    semiring_quotient: dict | None = field(default=None)

    def __len__(self):
        return len(self.classes)

    def class_vectors(self) -> list[list[Vector]]:
        vs = self.V.ambient.vectors
        return [[vs[i] for i in c] for c in self.classes]

    def image(self, S) -> frozenset[int]:
        """Classes meeting S."""
        m = _as_mask(self.V, S)
        return frozenset(self.class_of[i] for i in bits(m))

    def is_union_of_classes(self, S) -> bool:
        m = _as_mask(self.V, S)
        return all(
            all((m >> i) & 1 for i in c) or not any((m >> i) & 1 for i in c)
            for c in self.classes
        )

    def preceq(self, a: int, b: int) -> bool:
        """The quotient's own Green preorder."""
        return any(self.add[a][z] == b for z in range(len(self.classes)))

    def to_json(self) -> dict:
        vs = self.V.ambient.vectors
        R = self.V.ambient.semiring
        n = len(self.classes)
        out = {
            "classes": [[vs[i].to_json() for i in c] for c in self.classes],
            "add": [[i, j, self.add[i][j]] for i in range(n) for j in range(n)],
            "scalar": [[R.element_to_json(a), k, self.scalar[ai][k]]
                       for ai, a in enumerate(R.elements()) for k in range(n)],
            "order": [[i, j] for i in range(n) for j in range(n) if self.order[i][j]],
            "ub": self.ub,
            "source_ub": self.source_ub,
        }
        if self.semiring_quotient is not None:
            out["semiring_quotient"] = self.semiring_quotient
        return out


def green_classes(V: Submodule, below: dict[int, int] | None = None) -> list[list[int]]:
    below = below_masks(V) if below is None else below
    placed = 0
    classes = []
    for x in bits(V.mask):
        if (placed >> x) & 1:
            continue
        # y ≡ x  iff  y ≼ x and x ≼ y
        cls = [y for y in bits(below[x]) if (below[y] >> x) & 1]
        for y in cls:
            placed |= 1 << y
        classes.append(cls)
    return classes


def quotient(V) -> QuotientModule:
    """Materialize V/≡ and check every invariant it should satisfy.

    When V is the whole rank-1 module R, the quotient semiring R/≡ is also
    built (as a table semiring JSON object) and checked to be a ub semiring.
    """
    V = _as_module(V)
    amb = _amb(V)
    tab = amb.add_table
    below = below_masks(V)
    classes = green_classes(V, below)
    class_of = {i: k for k, c in enumerate(classes) for i in c}
    n = len(classes)

    add = [[-1] * n for _ in range(n)]
    for i in bits(V.mask):
        for j in bits(V.mask):
            k = class_of[tab[i][j]]
            a, b = class_of[i], class_of[j]
            if add[a][b] == -1:
                add[a][b] = k
            elif add[a][b] != k:
                raise InvariantViolation("Green's equivalence is not compatible with addition")

    scalar = []
    for row in amb.smul_table:
        srow = [-1] * n
        for i in bits(V.mask):
            k = class_of[row[i]]
            c = class_of[i]
            if srow[c] == -1:
                srow[c] = k
            elif srow[c] != k:
                raise InvariantViolation("Green's equivalence is not compatible with scalars")
        scalar.append(srow)

    reps = [c[0] for c in classes]
    order = [[bool((below[reps[b]] >> reps[a]) & 1) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and order[a][b] and order[b][a]:
                raise InvariantViolation("induced order is not antisymmetric")

    q_ub = _table_ub(add)
    if not q_ub:
        raise InvariantViolation("quotient monoid is not upper bound")
    src_ub = is_ub(V)
    if src_ub != (n == len(list(bits(V.mask)))):
        raise InvariantViolation("ub should hold exactly when every class is a singleton")

    result = QuotientModule(V, classes, class_of, add, scalar, order, q_ub, src_ub)
    if amb.rank == 1 and V.mask == (1 << amb.size) - 1:
        result.semiring_quotient = _semiring_quotient(amb, classes, class_of, add)
    return result


def _table_ub(add: list[list[int]]) -> bool:
    n = len(add)
    for x in range(n):
        for y in range(n):
            xy = add[x][y]
            if xy != x and any(add[xy][z] == x for z in range(n)):
                return False
    return True


def _semiring_quotient(amb: FreeModule, classes, class_of, add) -> dict:
    R = amb.semiring
    _, rmul = R.index_tables()
    # rank 1: vector index i is carrier position i
    n = len(classes)
    mul = [[-1] * n for _ in range(n)]
    for i in range(amb.size):
        for j in range(amb.size):
            k = class_of[rmul[i][j]]
            a, b = class_of[i], class_of[j]
            if mul[a][b] == -1:
                mul[a][b] = k
            elif mul[a][b] != k:
                raise InvariantViolation("Green's equivalence is not compatible with multiplication")
    labels = [str(k) for k in range(n)]
    zero = labels[class_of[amb.zero_index]]
    one = labels[class_of[R.index(R.one)]]
    Rq = sr.table(labels, [[labels[k] for k in row] for row in add],
                  [[labels[k] for k in row] for row in mul], zero, one)
    if sr.verify_axioms(Rq):
        raise InvariantViolation("R/≡ is not a semiring")
    if not _table_ub(add):
        raise InvariantViolation("R/≡ is not upper bound")
    return Rq.to_json()


# -- convexity -----------------------------------------------------------------


def is_convex(V, S) -> bool:
    """No v outside S sits between two elements of S."""
    V = _as_module(V)
    m = _as_mask(V, S)
    below = below_masks(V)
    above = {y: 0 for y in below}
    for y, b in below.items():
        for x in bits(b):
            above[x] |= 1 << y
    for v in bits(V.mask & ~m):
        if below[v] & m and above[v] & m:
            return False
    return True


def convex_closure(V: Submodule, S) -> int:
    """Smallest convex superset of S, by iterating the betweenness condition."""
    m = _as_mask(V, S)
    below = below_masks(V)
    above = {y: 0 for y in below}
    for y, b in below.items():
        for x in bits(b):
            above[x] |= 1 << y
    while True:
        grow = 0
        for v in bits(V.mask & ~m):
            if below[v] & m and above[v] & m:
                grow |= 1 << v
        if not grow:
            return m
        m |= grow


def convex_hull_of_point(V, s: Vector) -> list[Vector]:
    """The convex hull of a single point, which is its Green class."""
    V = _as_module(V)
    amb = _amb(V)
    i = amb.index_of(s)
    hull = convex_closure(V, 1 << i)
    below = below_masks(V)
    cls = [y for y in bits(below[i]) if (below[y] >> i) & 1]
    if hull != sum(1 << y for y in cls):
        raise InvariantViolation("convex hull of a point differs from its class")
    return [amb.vectors[y] for y in cls]


@dataclass
class BridgeReport:
    convex: bool
    sa: bool | None
    union_of_classes: bool
    quotient_convex: bool
    quotient_sa: bool | None
    holds: dict

    @property
    def certified(self) -> bool:
        return all(self.holds.values())


def _quotient_sa(Q: QuotientModule, img: frozenset) -> bool:
    n = len(Q.classes)
    return all(not (Q.add[a][b] in img and (a not in img or b not in img))
               for a in range(n) for b in range(n))


def _quotient_convex(Q: QuotientModule, img: frozenset) -> bool:
    n = len(Q.classes)
    for v in range(n):
        if v in img:
            continue
        if any(Q.preceq(s, v) for s in img) and any(Q.preceq(v, s) for s in img):
            return False
    return True


def convexity_sa_bridge(V, S, Q: QuotientModule | None = None) -> BridgeReport:
    """Check the convexity/SA correspondences for a subset S containing zero.

    (a) S convex iff S is SA; (b) S convex iff S is a union of classes with
    convex image in V/≡; (c) for a submodule S, S is SA iff it is a union of
    classes with SA image.  Each side is computed independently.
    """
    V = _as_module(V)
    amb = _amb(V)
    m = _as_mask(V, S)
    if m & ~V.mask:
        raise PreconditionError("S is not a subset of V")
    if not (m >> amb.zero_index) & 1:
        raise PreconditionError("S must contain zero")
    Q = quotient(V) if Q is None else Q
    convex = is_convex(V, m)
    sa = is_SA(V, m)
    union = Q.is_union_of_classes(m)
    img = Q.image(m)
    qconvex = _quotient_convex(Q, img)
    holds = {"convex-iff-sa": convex == sa,
             "convex-iff-quotient": convex == (union and qconvex)}
    qsa = None
    if amb.is_closed(m):
        qsa = _quotient_sa(Q, img)
        holds["sa-iff-quotient"] = sa == (union and qsa)
    return BridgeReport(convex, sa, union, qconvex, qsa, holds)


@dataclass
class QuotientDecompositionReport:
    classes_1: list[int]
    classes_2: list[int]
    certified: bool


def quotient_decomposition(V, W1: Submodule, W2: Submodule) -> QuotientDecompositionReport:
    """V = W1 ⊕ W2 induces V/≡ = W̄1 ⊕ W̄2: unique class sums covering every class."""
    V = _as_module(V)
    amb = _amb(V, W1, W2)
    _inside(V, W1, W2)
    if not _is_direct_pair(amb, V.mask, W1.mask, W2.mask):
        raise PreconditionError("V is not W1 ⊕ W2")
    Q = quotient(V)
    a, b = sorted(Q.image(W1)), sorted(Q.image(W2))
    sums = [Q.add[x][y] for x in a for y in b]
    ok = len(set(sums)) == len(sums) == len(Q.classes)
    if not ok:
        raise InvariantViolation("decomposition does not descend to the quotient")
    return QuotientDecompositionReport(a, b, ok)
