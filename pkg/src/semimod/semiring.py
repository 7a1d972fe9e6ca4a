"""Semirings: concrete families, axiom checks, units and idempotents.

Five kinds are supported.  ``boolean``, ``truncated`` and ``table`` have
finite carriers and can be enumerated; ``natural`` (N0) and ``maxplus-int``
(Z with a bottom element) are infinite and only support element arithmetic
plus the predicates that can be answered by rule.

Elements are plain Python values: ints for boolean/truncated/natural, ints
or :data:`NEG_INF` for max-plus, and string labels for tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import StructuralError, UnsupportedOperation

KINDS = ("boolean", "truncated", "natural", "maxplus-int", "table")


class _NegInf:
    """Bottom element of the max-plus integers.  Compares below every int."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf"

    def __reduce__(self):
        return (_NegInf, ())

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf")


NEG_INF = _NegInf()


@dataclass(frozen=True)
class Semiring:
    kind: str
    q: int | None = None
    carrier: tuple | None = None
    add_table: tuple | None = None
    mul_table: tuple | None = None
    zero_label: Any = None
    one_label: Any = None
    name: str = field(default="", compare=False)
    _pos: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructuralError(f"unknown semiring kind {self.kind!r}")
        if self.kind == "truncated" and (not isinstance(self.q, int) or self.q < 1):
            raise StructuralError("truncated semiring needs a positive integer q")
        if self.kind == "table":
            _check_table_shape(self)
            object.__setattr__(self, "_pos", {a: i for i, a in enumerate(self.carrier)})
        if not self.name:
            object.__setattr__(self, "name", _default_name(self))

    # -- basic structure -------------------------------------------------

    @property
    def zero(self):
        if self.kind == "maxplus-int":
            return NEG_INF
        if self.kind == "table":
            return self.zero_label
        return 0

    @property
    def one(self):
        if self.kind == "table":
            return self.one_label
        return 1 if self.kind != "maxplus-int" else 0

    @property
    def is_finite(self) -> bool:
        return self.kind in ("boolean", "truncated", "table")

    def elements(self) -> tuple:
        """Carrier in canonical (declaration) order."""
        if self.kind == "boolean":
            return (0, 1)
        if self.kind == "truncated":
            return tuple(range(self.q + 1))
        if self.kind == "table":
            return self.carrier
        raise UnsupportedOperation(f"carrier of {self.kind} is infinite")

    def __len__(self):
        return len(self.elements())

    def index(self, a) -> int:
        """Position of ``a`` in the canonical carrier order."""
        if self.kind == "table":
            try:
                return self._pos[a]
            except KeyError:
                raise StructuralError(f"label {a!r} is not in the carrier") from None
        if self.kind in ("boolean", "truncated"):
            self.check(a)
            return a
        raise UnsupportedOperation(f"carrier of {self.kind} is infinite")

    def check(self, a):
        """Raise :class:`StructuralError` unless ``a`` is a carrier element."""
        ok = False
        if self.kind == "table":
            ok = a in self._pos
        elif self.kind == "maxplus-int":
            ok = a is NEG_INF or (isinstance(a, int) and not isinstance(a, bool))
        elif isinstance(a, int) and not isinstance(a, bool):
            if self.kind == "boolean":
                ok = a in (0, 1)
            elif self.kind == "truncated":
                ok = 0 <= a <= self.q
            else:
                ok = a >= 0
        if not ok:
            raise StructuralError(f"{a!r} is not an element of {self.name}")
        return a

    def add(self, a, b):
        k = self.kind
        if k == "boolean":
            return a | b
        if k == "truncated":
            return min(a + b, self.q)
        if k == "natural":
            return a + b
        if k == "maxplus-int":
            if a is NEG_INF:
                return b
            if b is NEG_INF:
                return a
            return max(a, b)
        return self.carrier[self.add_table[self._pos[a]][self._pos[b]]]

    def mul(self, a, b):
        k = self.kind
        if k == "boolean":
            return a & b
        if k == "truncated":
            return min(a * b, self.q)
        if k == "natural":
            return a * b
        if k == "maxplus-int":
            if a is NEG_INF or b is NEG_INF:
                return NEG_INF
            return a + b
        return self.carrier[self.mul_table[self._pos[a]][self._pos[b]]]

    def sum(self, xs: Iterable):
        total = self.zero
        for x in xs:
            total = self.add(total, x)
        return total

    # -- index-level tables, used by the enumerated module code ----------

    def index_tables(self) -> tuple[list[list[int]], list[list[int]]]:
        """Addition and multiplication as tables over carrier positions."""
        if self.kind == "table":
            return [list(r) for r in self.add_table], [list(r) for r in self.mul_table]
        elems = self.elements()
        add = [[self.index(self.add(a, b)) for b in elems] for a in elems]
        mul = [[self.index(self.mul(a, b)) for b in elems] for a in elems]
        return add, mul

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "truncated":
            return {"kind": "truncated", "q": self.q}
        if self.kind == "table":
            c = self.carrier
            return {
                "kind": "table",
                "carrier": list(c),
                "add": [[c[j] for j in row] for row in self.add_table],
                "mul": [[c[j] for j in row] for row in self.mul_table],
                "zero": self.zero_label,
                "one": self.one_label,
            }
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, obj: dict, name: str = "") -> "Semiring":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise StructuralError("semiring: expected an object with a 'kind' field")
        kind = obj["kind"]
        if kind == "boolean":
            return boolean()
        if kind == "truncated":
            if "q" not in obj:
                raise StructuralError("semiring.q: missing for truncated kind")
            return truncated(obj["q"])
        if kind == "natural":
            return natural()
        if kind == "maxplus-int":
            return maxplus_int()
        if kind == "table":
            for key in ("carrier", "add", "mul", "zero", "one"):
                if key not in obj:
                    raise StructuralError(f"semiring.{key}: missing for table kind")
            return table(obj["carrier"], obj["add"], obj["mul"], obj["zero"], obj["one"], name=name)
        raise StructuralError(f"semiring.kind: unknown kind {kind!r}")

    # -- element <-> JSON --------------------------------------------------

    def element_to_json(self, a):
        if a is NEG_INF:
            return "-inf"
        return a

    def element_from_json(self, x):
        if self.kind == "maxplus-int" and x == "-inf":
            return NEG_INF
        return self.check(x)


def _default_name(r: Semiring) -> str:
    if r.kind == "truncated":
        return f"truncated({r.q})"
    if r.kind == "table":
        return "table[" + ",".join(map(str, r.carrier)) + "]"
    return r.kind


def _check_table_shape(r: Semiring):
    carrier = r.carrier
    if not isinstance(carrier, tuple) or not carrier:
        raise StructuralError("table carrier must be a non-empty sequence")
    if len(set(carrier)) != len(carrier):
        raise StructuralError("table carrier labels must be distinct")
    n = len(carrier)
    for name, tab in (("add", r.add_table), ("mul", r.mul_table)):
        if not isinstance(tab, tuple) or len(tab) != n or any(
            not isinstance(row, tuple) or len(row) != n for row in tab
        ):
            raise StructuralError(f"{name} table must be {n}x{n}")
        for row in tab:
            for j in row:
                if not isinstance(j, int) or not 0 <= j < n:
                    raise StructuralError(f"{name} table entry out of range")
    for lab in (r.zero_label, r.one_label):
        if lab not in carrier:
            raise StructuralError(f"label {lab!r} is not in the carrier")


# -- constructors ----------------------------------------------------------


def boolean() -> Semiring:
    return Semiring("boolean")


def truncated(q: int) -> Semiring:
    return Semiring("truncated", q=q)


def natural() -> Semiring:
    return Semiring("natural")


def maxplus_int() -> Semiring:
    return Semiring("maxplus-int")


def table(carrier: Sequence, add: Sequence[Sequence], mul: Sequence[Sequence], zero, one,
          name: str = "") -> Semiring:
    """Build a finite semiring from label tables (row-major, declaration order).

    Only the shape is validated here; call :func:`verify_axioms` for the
    semiring laws.
    """
    carrier = tuple(carrier)
    pos = {a: i for i, a in enumerate(carrier)}
    if len(pos) != len(carrier):
        raise StructuralError("table carrier labels must be distinct")

    def encode(tab, what):
        if not isinstance(tab, (list, tuple)) or len(tab) != len(carrier):
            raise StructuralError(f"{what} table must have {len(carrier)} rows")
        out = []
        for row in tab:
            if not isinstance(row, (list, tuple)) or len(row) != len(carrier):
                raise StructuralError(f"{what} table rows must have {len(carrier)} entries")
            try:
                out.append(tuple(pos[x] for x in row))
            except (KeyError, TypeError):
                raise StructuralError(f"{what} table uses a label outside the carrier") from None
        return tuple(out)

    return Semiring("table", carrier=carrier, add_table=encode(add, "add"),
                    mul_table=encode(mul, "mul"), zero_label=zero, one_label=one, name=name)


def zmod(n: int) -> Semiring:
    """The ring Z/nZ as a table with labels '0'..'n-1'."""
    labels = [str(i) for i in range(n)]
    add = [[labels[(i + j) % n] for j in range(n)] for i in range(n)]
    mul = [[labels[(i * j) % n] for j in range(n)] for i in range(n)]
    return table(labels, add, mul, "0", "1" if n > 1 else "0", name=f"Z/{n}Z")


def product(r: Semiring, s: Semiring) -> Semiring:
    """Componentwise product of two finite semirings, labels '(a,b)'."""
    pairs = list(itertools.product(r.elements(), s.elements()))
    lab = {p: f"({p[0]},{p[1]})" for p in pairs}
    add = [[lab[(r.add(a, c), s.add(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    mul = [[lab[(r.mul(a, c), s.mul(b, d))] for (c, d) in pairs] for (a, b) in pairs]
    return table([lab[p] for p in pairs], add, mul, lab[(r.zero, s.zero)], lab[(r.one, s.one)],
                 name=f"{r.name}x{s.name}")


# -- axioms ----------------------------------------------------------------

AXIOMS = (
    "add-associativity",
    "add-commutativity",
    "add-identity",
    "mul-associativity",
    "mul-identity",
    "left-distributivity",
    "right-distributivity",
    "zero-annihilation",
)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple


def verify_axioms(R: Semiring) -> list[Violation]:
    """Every violated semiring law with its witness, in canonical order.

    Closed-form kinds are semirings by construction and return ``[]``
    without checking.
    """
    if R.kind != "table":
        return []
    n = len(R.carrier)
    A, M = R.add_table, R.mul_table
    z, o = R.carrier.index(R.zero_label), R.carrier.index(R.one_label)
    lab = R.carrier
    out: list[Violation] = []
    seen: set[str] = set()

    def bad(axiom, *idx):
        # first witness per axiom only; later ones add nothing
        if axiom not in seen:
            seen.add(axiom)
            out.append(Violation(axiom, tuple(lab[i] for i in idx)))

    for a in range(n):
        if A[a][z] != a or A[z][a] != a:
            bad("add-identity", a)
        if M[a][o] != a or M[o][a] != a:
            bad("mul-identity", a)
        if M[a][z] != z or M[z][a] != z:
            bad("zero-annihilation", a)
        for b in range(n):
            if A[a][b] != A[b][a]:
                bad("add-commutativity", a, b)
            for c in range(n):
                if A[A[a][b]][c] != A[a][A[b][c]]:
                    bad("add-associativity", a, b, c)
                if M[M[a][b]][c] != M[a][M[b][c]]:
                    bad("mul-associativity", a, b, c)
                if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
                    bad("left-distributivity", a, b, c)
                if M[A[a][b]][c] != A[M[a][c]][M[b][c]]:
                    bad("right-distributivity", a, b, c)
    order = {name: i for i, name in enumerate(AXIOMS)}
    return sorted(out, key=lambda v: order[v.axiom])


def is_semiring(R: Semiring) -> bool:
    return not verify_axioms(R)


# -- predicates ------------------------------------------------------------


def lacks_zero_sums(R: Semiring) -> bool:
    if not R.is_finite:
        return True
    z = R.zero
    elems = R.elements()
    return not any(R.add(a, b) == z for a in elems for b in elems if a != z)


def units(R: Semiring) -> frozenset:
    if R.kind == "natural":
        return frozenset({1})
    if R.kind == "maxplus-int":
        raise UnsupportedOperation("units of maxplus-int form the infinite group Z")
    elems = R.elements()
    one = R.one
    return frozenset(
        a for a in elems if any(R.mul(a, b) == one and R.mul(b, a) == one for b in elems)
    )


def additively_generated_by_units(R: Semiring) -> bool:
    # N0 is generated by 1; max-plus is a semifield
    if not R.is_finite:
        return True
    reach = {R.zero}
    frontier = list(reach)
    us = units(R)
    while frontier:
        x = frontier.pop()
        for u in us:
            y = R.add(x, u)
            if y not in reach:
                reach.add(y)
                frontier.append(y)
    return len(reach) == len(R.elements())


# -- idempotents -----------------------------------------------------------


@dataclass(frozen=True)
class Idempotent:
    value: Any
    primitive: bool


def _require_finite(R: Semiring, what: str):
    if not R.is_finite:
        raise UnsupportedOperation(f"{what} needs a finite carrier; {R.kind} is infinite")


def _raw_idempotents(R: Semiring) -> list:
    return [e for e in R.elements() if R.mul(e, e) == e]


def are_orthogonal(R: Semiring, e, f) -> bool:
    z = R.zero
    return R.mul(e, f) == z and R.mul(f, e) == z


def is_primitive(R: Semiring, e) -> bool:
    """Nonzero idempotent with no split into two nonzero orthogonal idempotents.

    Zero is never primitive.
    """
    _require_finite(R, "is_primitive")
    z = R.zero
    if e == z or R.mul(e, e) != e:
        return False
    nonzero = [f for f in _raw_idempotents(R) if f != z]
    return not any(
        R.add(f, g) == e and are_orthogonal(R, f, g) for f in nonzero for g in nonzero
    )


def idempotents(R: Semiring) -> list[Idempotent]:
    _require_finite(R, "idempotents")
    return [Idempotent(e, is_primitive(R, e)) for e in _raw_idempotents(R)]


def partition_of_one(R: Semiring) -> list[Idempotent] | None:
    """Pairwise orthogonal primitive idempotents summing to one, or ``None``.

    Smaller families are preferred, then canonical order.
    """
    _require_finite(R, "partition_of_one")
    prims = [e for e in _raw_idempotents(R) if is_primitive(R, e)]
    for size in range(1, len(prims) + 1):
        for family in itertools.combinations(prims, size):
            if R.sum(family) != R.one:
                continue
            if all(are_orthogonal(R, f, g) for f, g in itertools.combinations(family, 2)):
                return [Idempotent(e, True) for e in family]
    return None
