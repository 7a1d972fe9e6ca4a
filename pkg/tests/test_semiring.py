import itertools

import pytest

from semimod import semiring as sr
from semimod.errors import StructuralError, UnsupportedOperation
from semimod.module import free_module, lacks_zero_sums as module_lzs
from semimod.semiring import NEG_INF


def naive_axioms(elems, add, mul, zero, one):
    """Independent textbook axiom check, returning the set of failing axiom names."""
    bad = set()
    for a, b, c in itertools.product(elems, repeat=3):
        if add(add(a, b), c) != add(a, add(b, c)):
            bad.add("add-associativity")
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            bad.add("mul-associativity")
        if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
            bad.add("left-distributivity")
        if mul(add(a, b), c) != add(mul(a, c), mul(b, c)):
            bad.add("right-distributivity")
    for a, b in itertools.product(elems, repeat=2):
        if add(a, b) != add(b, a):
            bad.add("add-commutativity")
    for a in elems:
        if add(a, zero) != a or add(zero, a) != a:
            bad.add("add-identity")
        if mul(a, one) != a or mul(one, a) != a:
            bad.add("mul-identity")
        if mul(a, zero) != zero or mul(zero, a) != zero:
            bad.add("zero-annihilation")
    return bad


class TestFamilies:
    def test_boolean(self, B):
        assert list(B.elements()) == [0, 1]
        assert B.add(1, 1) == 1 and B.mul(1, 0) == 0

    def test_truncated_caps_sum_and_product(self):
        T = sr.truncated(3)
        assert list(T.elements()) == [0, 1, 2, 3]
        assert T.add(2, 2) == 3 and T.mul(2, 2) == 3 and T.mul(3, 3) == 3
        assert T.add(1, 1) == 2

    def test_natural_is_exact(self):
        N = sr.natural()
        big = 10**40
        assert N.add(big, big) == 2 * big and N.mul(big, 3) == 3 * big
        assert not N.is_finite

    def test_maxplus(self):
        M = sr.maxplus_int()
        assert M.zero is NEG_INF and M.one == 0
        assert M.add(NEG_INF, 5) == 5 and M.add(3, -2) == 3
        assert M.mul(NEG_INF, 5) is NEG_INF and M.mul(3, -2) == 1
        assert NEG_INF < -(10**30)

    def test_truncated_one_is_boolean(self, B):
        T1 = sr.truncated(1)
        for a, b in itertools.product([0, 1], repeat=2):
            assert T1.add(a, b) == B.add(a, b) and T1.mul(a, b) == B.mul(a, b)


class TestAxioms:
    def test_closed_forms_trusted(self):
        for R in (sr.boolean(), sr.truncated(2), sr.natural(), sr.maxplus_int()):
            assert sr.verify_axioms(R) == []

    def test_injected_noncommutative_add(self):
        bad = sr.table(["0", "1"], [["0", "1"], ["0", "1"]], [["0", "0"], ["0", "1"]], "0", "1")
        report = sr.verify_axioms(bad)
        assert ("add-commutativity", ("0", "1")) in [(v.axiom, v.witness) for v in report]
        assert not sr.is_semiring(bad)

    def test_zmod2_is_semiring(self, Z2):
        assert sr.verify_axioms(Z2) == []

    def test_product_table(self, BxB):
        assert sr.verify_axioms(BxB) == []

    @pytest.mark.parametrize("carrier,add,mul,msg", [
        (["0", "1"], [["0", "1"]], [["0", "0"], ["0", "1"]], "rows"),
        (["0", "1"], [["0", "1"], ["1"]], [["0", "0"], ["0", "1"]], "entries"),
        (["0", "1"], [["0", "x"], ["1", "0"]], [["0", "0"], ["0", "1"]], "outside"),
        (["0", "0"], [["0", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]], "distinct"),
    ])
    def test_structural_errors(self, carrier, add, mul, msg):
        with pytest.raises(StructuralError, match=msg):
            sr.table(carrier, add, mul, "0", "1")

    def test_agrees_with_naive_on_every_two_element_table(self):
        # all 2^4 * 2^4 tables on {0, 1}; zero/one labels fixed
        labels = ["0", "1"]
        agreed = 0
        for av in itertools.product(labels, repeat=4):
            for mv in itertools.product(labels, repeat=4):
                add = [list(av[:2]), list(av[2:])]
                mul = [list(mv[:2]), list(mv[2:])]
                R = sr.table(labels, add, mul, "0", "1")
                expected = naive_axioms(labels, lambda a, b: add[int(a)][int(b)],
                                        lambda a, b: mul[int(a)][int(b)], "0", "1")
                assert {v.axiom for v in sr.verify_axioms(R)} == expected
                agreed += 1
        assert agreed == 256


class TestZeroSumsAndUnits:
    def test_lacks_zero_sums(self, B, Z2):
        assert sr.lacks_zero_sums(B)
        assert sr.lacks_zero_sums(sr.truncated(3))
        assert not sr.lacks_zero_sums(Z2)
        assert sr.lacks_zero_sums(sr.natural()) and sr.lacks_zero_sums(sr.maxplus_int())

    def test_units(self, B, Z2):
        assert sr.units(B) == {1}
        assert sr.units(sr.truncated(2)) == {1}
        assert sr.units(Z2) == {"1"}
        assert sr.units(sr.natural()) == {1}
        with pytest.raises(UnsupportedOperation):
            sr.units(sr.maxplus_int())

    def test_additively_generated(self, B, Z2, BxB):
        assert sr.additively_generated_by_units(B)
        assert sr.additively_generated_by_units(sr.truncated(2))
        assert sr.additively_generated_by_units(Z2)
        # units of B×B are only (1,1), whose sums never reach (1,0)
        assert not sr.additively_generated_by_units(BxB)

    @pytest.mark.parametrize("R", [sr.boolean(), sr.truncated(2), sr.truncated(3),
                                   sr.product(sr.boolean(), sr.boolean())])
    @pytest.mark.parametrize("n", [1, 2])
    def test_lzs_lifts_to_free_modules(self, R, n):
        assert sr.lacks_zero_sums(R)
        assert module_lzs(free_module(R, n).whole())


class TestIdempotents:
    def test_boolean(self, B):
        ids = sr.idempotents(B)
        assert [(e.value, e.primitive) for e in ids] == [(0, False), (1, True)]

    def test_truncated3(self):
        ids = {e.value: e.primitive for e in sr.idempotents(sr.truncated(3))}
        assert ids == {0: False, 1: True, 3: True}

    def test_zmod2(self, Z2):
        ids = {e.value: e.primitive for e in sr.idempotents(Z2)}
        assert ids == {"0": False, "1": True}

    def test_product_primitives(self, BxB):
        ids = {e.value: e.primitive for e in sr.idempotents(BxB)}
        assert ids == {"(0,0)": False, "(0,1)": True, "(1,0)": True, "(1,1)": False}
        assert sr.are_orthogonal(BxB, "(0,1)", "(1,0)")
        assert not sr.are_orthogonal(BxB, "(1,1)", "(1,0)")

    def test_fixed_points_of_squaring(self):
        for R in (sr.boolean(), sr.truncated(3), sr.zmod(2), sr.zmod(6)):
            assert [e.value for e in sr.idempotents(R)] == [a for a in R.elements()
                                                            if R.mul(a, a) == a]

    @pytest.mark.parametrize("R,expected", [
        (sr.boolean(), [1]), (sr.truncated(2), [1]),
        (sr.product(sr.boolean(), sr.boolean()), ["(0,1)", "(1,0)"]),
    ])
    def test_partition_of_one(self, R, expected):
        part = sr.partition_of_one(R)
        assert sorted(e.value for e in part) == sorted(expected)
        assert R.sum(e.value for e in part) == R.one
        for e, f in itertools.permutations(part, 2):
            assert sr.are_orthogonal(R, e.value, f.value)

    def test_infinite_carriers_refused(self):
        for R in (sr.natural(), sr.maxplus_int()):
            with pytest.raises(UnsupportedOperation, match=R.kind):
                sr.idempotents(R)
            with pytest.raises(UnsupportedOperation):
                sr.partition_of_one(R)


class TestSerialization:
    @pytest.mark.parametrize("R", [sr.boolean(), sr.truncated(3), sr.natural(), sr.maxplus_int(),
                                   sr.zmod(2), sr.product(sr.boolean(), sr.boolean())])
    def test_round_trip(self, R):
        back = sr.Semiring.from_json(R.to_json())
        assert back == R and back.to_json() == R.to_json()

    def test_neg_inf_element(self):
        M = sr.maxplus_int()
        assert M.element_to_json(NEG_INF) == "-inf"
        assert M.element_from_json("-inf") is NEG_INF

    def test_bad_kind(self):
        with pytest.raises(StructuralError, match="kind"):
            sr.Semiring.from_json({"kind": "tropical"})
        with pytest.raises(StructuralError, match="q"):
            sr.Semiring.from_json({"kind": "truncated"})
