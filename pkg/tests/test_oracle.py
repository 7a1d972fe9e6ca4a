import json

import pytest
from hypothesis import given, settings, strategies as st

from semimod import decomposition as dec
from semimod import greens
from semimod import oracle
from semimod import semiring as sr
from semimod.errors import PreconditionError
from semimod.module import free_module


def small_corpus(*semirings, ranks=(1, 2)):
    config = oracle.CorpusConfig(fixed=False, random_tables=0, ranks=ranks)
    insts = [oracle.Instance(R, n) for R in semirings for n in ranks]
    return oracle.InstanceCorpus(0, config, list(semirings), insts)


@pytest.fixture(scope="module")
def corpus():
    return oracle.generate_corpus(0)


@pytest.fixture(scope="module")
def contexts(corpus):
    return [a for a in oracle.ambients(corpus) if a.is_whole and len(a.subs) <= 150]


@pytest.fixture(scope="module")
def census(corpus):
    return oracle.hierarchy_census(corpus)


class TestCorpus:
    def test_fixed_members(self, corpus):
        names = [i.name for i in corpus.instances]
        for n in (1, 2, 3):
            assert f"boolean^{n}" in names
        assert [R.name for R in corpus.semirings[:5]] == [
            "boolean", "truncated(2)", "truncated(3)", "Z/2Z", "booleanxboolean"]

    def test_deterministic(self, corpus):
        again = oracle.generate_corpus(0)
        assert oracle.dumps(again.to_json()) == oracle.dumps(corpus.to_json())

    def test_bookkeeping(self, corpus):
        assert corpus.accepted + corpus.discarded == corpus.attempts
        assert corpus.accepted == corpus.config.random_tables
        for R in corpus.semirings:
            assert sr.verify_axioms(R) == []
            assert len(R.elements()) <= 4
        assert len(set(corpus.semirings)) == len(corpus.semirings)

    def test_excluded_are_recorded(self, corpus):
        assert {"semiring": "truncated(3)", "rank": 3} in [
            {k: e[k] for k in ("semiring", "rank")} for e in corpus.excluded]

    @settings(max_examples=8)
    @given(st.integers(0, 2**63 - 1))
    def test_random_tables_pass_axioms(self, seed):
        c = oracle.generate_corpus(seed, oracle.CorpusConfig(fixed=False, random_tables=2,
                                                             ranks=(1,)))
        assert c.accepted + c.discarded == c.attempts
        for R in c.semirings:
            assert sr.is_semiring(R)
        assert oracle.generate_corpus(seed, c.config).to_json() == c.to_json()

    def test_empty_config(self):
        with pytest.raises(PreconditionError):
            oracle.generate_corpus(0, oracle.CorpusConfig(fixed=False, random_tables=0))
        with pytest.raises(PreconditionError):
            oracle.generate_corpus(0, oracle.CorpusConfig(ranks=()))
        with pytest.raises(PreconditionError):
            oracle.generate_corpus(0, oracle.CorpusConfig(budget=1))


class TestClaims:
    def test_registry_ids_unique_and_sorted_output(self):
        ids = oracle.claim_ids()
        assert len(ids) == len(set(ids)) == len(oracle.REGISTRY)
        res = oracle.run_claims(small_corpus(sr.boolean()), ",".join(reversed(ids[:4])))
        assert [r.claim_id for r in res] == sorted(ids[:4])

    def test_boolean_descent_verified(self):
        (r,) = oracle.run_claims(small_corpus(sr.boolean()), ["weak-descent"])
        assert r.status == "verified" and r.instances_checked > 0

    def test_zero_sum_instances_skipped(self):
        (r,) = oracle.run_claims(small_corpus(sr.zmod(2)), ["weak-unique"])
        assert r.status == "skipped" and "zero sums" in r.reason
        assert r.skipped_instances > 0 and r.certificate is None

    def test_hypothesis_gate_counts_skips(self):
        (r,) = oracle.run_claims(small_corpus(sr.boolean(), sr.zmod(2)), ["weak-unique"])
        assert r.status == "verified" and r.skipped_instances > 0

    def test_broken_claim_certificate(self):
        res = oracle.run_claims(small_corpus(sr.boolean()), ["broken-negated-descent"])
        (r,) = res
        assert r.status == "counterexample"
        cert = json.loads(json.dumps(r.certificate))
        assert cert["claim"] == "broken-negated-descent"
        assert oracle.reverify_certificate(cert)

    def test_include_broken_flag(self):
        res = oracle.run_claims(small_corpus(sr.boolean()), ["weak-descent"], include_broken=True)
        assert [r.claim_id for r in res] == ["broken-negated-descent", "weak-descent"]

    def test_unknown_claim(self):
        with pytest.raises(PreconditionError, match="no-such"):
            oracle.run_claims(small_corpus(sr.boolean()), "no-such")

    def test_result_round_trip(self):
        for r in oracle.run_claims(small_corpus(sr.boolean()), include_broken=True):
            obj = json.loads(json.dumps(r.to_json()))
            assert oracle.ClaimResult.from_json(obj) == r

    def test_certificate_needs_only_its_own_data(self):
        (r,) = oracle.run_claims(small_corpus(sr.truncated(2)), ["broken-negated-descent"])
        a = oracle.ambient_from_certificate(r.certificate)
        assert a.R == sr.truncated(2) and a.V


class TestDualPath:
    """Oracle verdicts and decomposition/greens verdicts agree on whole ambients."""

    def _sub(self, F, S):
        return F.from_indices(F.index_of(F.vector(list(v))) for v in S)

    def test_complements_and_sa(self, contexts):
        for a in contexts:
            F = free_module(a.R, a.instance.rank)
            V = F.whole()
            for T in a.subs:
                Ts = self._sub(F, T)
                got = {frozenset(v.entries for v in W.elements)
                       for W in dec.direct_complements(V, Ts)}
                assert got == set(a.complements[T])
                assert dec.is_SA(V, Ts) == (T in a.sa_subs)

    def test_indecomposables_and_classes(self, contexts):
        for a in contexts:
            F = free_module(a.R, a.instance.rank)
            got = {frozenset(v.entries for v in S.elements)
                   for S in dec.indecomposable_summands(F.whole())}
            assert got == set(a.indecomposables)
            Q = greens.quotient(F)
            assert {frozenset(v.entries for v in c) for c in Q.class_vectors()} == set(a.classes)


class TestCensus:
    def test_b2_witness(self, census):
        b2 = census["per_instance"]["boolean^2/whole"]
        pair = {"W": [[0, 0], [1, 0]], "T": [[0, 0], [0, 1], [1, 1]]}
        assert pair in b2["gaps"]["trivial-intersection-not-weak"]
        assert b2["levels"]["direct"] >= 1

    def test_no_violations(self, census):
        assert set(census["violations"].values()) == {0}

    def test_counts_cover_all_pairs(self, census, corpus):
        total = sum(len(a.subs) ** 2 for a in oracle.ambients(corpus))
        assert sum(census["levels"].values()) == total

    def test_zero_ambient(self):
        z = oracle.Ambient(oracle.Instance(sr.boolean(), 0), [()], "whole", oracle.CorpusConfig())
        levels = oracle.hierarchy_census(contexts=[z])["levels"]
        assert levels == {"direct": 1, "semidirect": 0, "weak": 0, "trivial-intersection": 0,
                          "none": 0}
