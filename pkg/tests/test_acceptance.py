"""Acceptance suite: one check per primary criterion, each printing a PASS/FAIL line.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import json
import sys
import time
from functools import lru_cache

from semimod import decomposition as dec
from semimod import greens
from semimod import oracle
from semimod import semiring as sr
from semimod.cli import main as cli_main
from semimod.errors import MultiplicityError
from semimod.module import free_module

RUNTIME_LIMIT = 60.0


@lru_cache(maxsize=None)
def corpus():
    return oracle.generate_corpus(0)


@lru_cache(maxsize=None)
def contexts():
    return oracle.ambients(corpus())


def submodule(F, elements):
    return F.from_indices(F.index_of(F.vector(list(v))) for v in elements)


def ents(S):
    return frozenset(v.entries for v in S.elements)


def report(name: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", flush=True)
    return ok


# -- criteria ------------------------------------------------------------------


def criterion_theorem_suite():
    start = time.perf_counter()
    results = oracle.run_claims(corpus(), contexts=oracle.ambients(corpus()))
    elapsed = time.perf_counter() - start
    statuses = {r.claim_id: r.status for r in results}
    bad = {k: v for k, v in statuses.items() if v != "verified"}
    ok = not bad and len(results) == len(oracle.REGISTRY) and elapsed <= RUNTIME_LIMIT
    return ok, f"{len(results)} claims, non-verified {bad or 'none'}, {elapsed:.1f}s"


def criterion_uniqueness():
    checked = 0
    multiplicity = []
    for a in contexts():
        F = free_module(a.R, a.instance.rank)
        V = submodule(F, a.V)
        for T in a.subs:
            Ts = submodule(F, T)
            expected = a.complements[T]
            if a.lzs:
                got = dec.direct_complement(V, Ts)
                if not expected:
                    if got is not None:
                        return False, f"spurious complement in {a.instance.name}"
                    continue
                if len(expected) != 1 or got is None or ents(got) != expected[0]:
                    return False, f"mismatch in {a.instance.name}/{a.label}"
                checked += 1
            elif a.R.name == "Z/2Z" and len(expected) > 1:
                try:
                    dec.direct_complement(V, Ts)
                    return False, "Z/2Z multiplicity not reported"
                except MultiplicityError as exc:
                    if {ents(c) for c in exc.candidates} != set(expected):
                        return False, "Z/2Z candidates differ from exhaustive search"
                multiplicity.append(len(expected))
    verdict = (f"Z/2Z has {len(multiplicity)} summands with several complements "
               f"(max {max(multiplicity)})" if multiplicity else "Z/2Z: single candidates only")
    return checked > 0, f"{checked} summands with a unique complement; {verdict}"


def criterion_refinement():
    configs = 0
    for a in contexts():
        if not a.lzs or not a.is_whole:
            continue
        F = free_module(a.R, a.instance.rank)
        V = F.whole()
        nm = a.nm
        for T, W in a.direct_pairs:
            for Y, Z in a.direct_pairs:
                Ts, Ws, Ys, Zs = (submodule(F, X) for X in (T, W, Y, Z))
                parts = [ents(p) for p in dec.refine4(V, Ts, Ws, Ys, Zs).parts]
                if parts != [T & Y, T & Z, W & Y, W & Z]:
                    return False, f"refine4 parts differ in {a.instance.name}"
                rep = dec.sum_decomposition(V, Ts, Ws, Ys, Zs)
                if ents(rep.total) != nm.plus(T, Y):
                    return False, "T + Y differs"
                if [ents(p) for p in rep.decomposition.parts] != [T & Y, T & Z, W & Y]:
                    return False, "sum decomposition parts differ"
                if ents(rep.sum_complement) != W & Z:
                    return False, "(T + Y)^c differs from T^c ∩ Y^c"
                if ents(rep.meet_complement) != nm.plus_all([T & Z, W & Y, W & Z]):
                    return False, "(T ∩ Y)^c formula differs"
                configs += 1
    return configs >= 100, f"{configs} configurations matched part by part"


def criterion_dsoc():
    for n in (1, 2, 3):
        F = free_module(sr.boolean(), n)
        rep = dec.dsoc(F.whole())
        axes = {frozenset({(0,) * n, tuple(int(i == j) for j in range(n))}) for i in range(n)}
        if rep.socle != F.whole() or not rep.complement.is_zero():
            return False, f"dsoc(B^{n}) is not B^{n} with zero complement"
        if {ents(s) for s in rep.summands} != axes:
            return False, f"summands of B^{n} are not the coordinate axes"
    residual = 0
    for a in contexts():
        if not a.lzs or not oracle._naive_units_generate(a.R):
            continue
        F = free_module(a.R, a.instance.rank)
        rep = dec.dsoc(submodule(F, a.V))
        socle = a.nm.plus_all(a.indecomposables)
        if ents(rep.socle) != socle or rep.residual_is_submodule is not True:
            return False, f"residual check failed on {a.instance.name}/{a.label}"
        if not a.nm.is_submodule((a.V - socle) | a.zero_set):
            return False, "naive residual check failed"
        residual += 1
    return True, f"B^1..B^3 pinned; residual submodule on {residual} ambients"


def criterion_idempotents():
    seen = []
    for R in corpus().semirings:
        if not sr.lacks_zero_sums(R):
            continue
        rep = dec.projective_decomposition(R)
        a = next(c for c in contexts() if c.R == R and c.is_whole and c.instance.rank == 1)
        naive = (a.nm.plus_all(a.indecomposables) == a.V,
                 oracle._naive_partition(R) is not None,
                 bool(oracle._direct_subfamilies(a, a.indecomposables)))
        lib = (rep.dsoc_is_whole, rep.partition is not None, rep.finite_indecomposable_sum)
        if not rep.certified or len(set(lib)) != 1 or lib != naive:
            return False, f"verdicts disagree for {R.name}: {lib} vs {naive}"
        seen.append(R.name)
    bxb = sr.product(sr.boolean(), sr.boolean())
    part = sorted(e.value for e in sr.partition_of_one(bxb))
    ok = part == ["(0,1)", "(1,0)"]
    return ok, f"{len(seen)} semirings agree; B×B partition {part}"


def criterion_quotient_ub():
    n = 0
    for a in contexts():
        F = free_module(a.R, a.instance.rank)
        Q = greens.quotient(submodule(F, a.V))
        if not Q.ub or Q.source_ub != all(len(c) == 1 for c in Q.classes):
            return False, f"{a.instance.name}/{a.label}"
        if Q.source_ub != a.nm.is_ub(a.V):
            return False, "ub verdict differs from the naive path"
        n += 1
    z = greens.quotient(free_module(sr.zmod(2), 1))
    return len(z) == 1, f"{n} ambients; Z/2Z collapses to {len(z)} class"


def criterion_convexity():
    (r,) = oracle.run_claims(corpus(), ["convex-iff-sa"], contexts=contexts())
    small = [a for a in contexts() if len(a.V) <= 16]
    if r.status != "verified" or r.instances_checked != len(small):
        return False, f"subset sweep: {r.status}, {r.instances_checked}/{len(small)}"
    subsets = r.configurations
    bridged = 0
    for a in contexts():
        F = free_module(a.R, a.instance.rank)
        V = submodule(F, a.V)
        Q = greens.quotient(V)
        for S in a.subs:
            rep = greens.convexity_sa_bridge(V, submodule(F, S), Q)
            if not rep.certified or set(rep.holds) != {"convex-iff-sa", "convex-iff-quotient",
                                                      "sa-iff-quotient"}:
                return False, f"bridge failed on {a.instance.name}/{a.label}"
            bridged += 1
    extra = oracle.run_claims(corpus(), ["convex-class-union", "sa-quotient"],
                              contexts=contexts())
    if any(x.status != "verified" for x in extra):
        return False, "oracle disagrees on class unions"
    return True, f"{subsets} subsets with zero swept; {bridged} submodules bridged"


def criterion_census():
    census = oracle.hierarchy_census(corpus(), contexts())
    b2 = census["per_instance"]["boolean^2/whole"]
    pair = {"W": [[0, 0], [1, 0]], "T": [[0, 0], [0, 1], [1, 1]]}
    has_witness = pair in b2["gaps"]["trivial-intersection-not-weak"]
    direct = b2["levels"]["direct"]
    violations = sum(census["violations"].values())
    ok = has_witness and direct >= 1 and violations == 0 and len(census["violations"]) == 4
    return ok, (f"B² witness {'found' if has_witness else 'missing'}, {direct} direct pairs, "
                f"{violations} violations; gaps {census['gaps']}")


def _cli(*argv) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = cli_main(list(argv))
    return code, buf.getvalue()


def criterion_determinism(tmpdir: str):
    first = _cli("verify", "--seed", "0", "--json", "--census")
    second = _cli("verify", "--seed", "0", "--json", "--census")
    if first != second or first[0] != 0:
        return False, "verify reports differ between runs"
    reports = [first[1]]
    inst = {"semiring": {"kind": "boolean"}, "rank": 2,
            "submodules": {"a": [[1, 0]], "b": [[0, 1]]}}
    path = f"{tmpdir}/b2.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst, fh)
    for cmd in (["analyze", path, "a", "b"], ["decompose", path], ["dsoc", path],
                ["idempotents", path], ["quotient", path]):
        code, out = _cli(*cmd, "--json")
        if code != 0 or _cli(*cmd, "--json") != (code, out):
            return False, f"{cmd[0]} not deterministic"
        reports.append(out)
    for out in reports:
        if oracle.dumps(json.loads(out)) + "\n" != out:
            return False, "a report does not re-parse to the same bytes"
    obj = json.loads(first[1])
    back = [oracle.ClaimResult.from_json(r).to_json() for r in obj["results"]]
    if back != obj["results"]:
        return False, "claim results do not round-trip"
    F = free_module(sr.boolean(), 2)
    rep = dec.decompose(F.whole())
    if dec.DecompositionReport.from_json(json.loads(json.dumps(rep.to_json())), F).parts \
            != rep.parts:
        return False, "decomposition report does not round-trip"
    return True, f"{len(reports)} reports byte-stable and re-parsed"


# -- pytest entry points -----------------------------------------------------


def _check(capsys, name, fn, *args):
    ok, detail = fn(*args)
    with capsys.disabled():
        print()
        report(name, ok, detail)
    assert ok, detail


def test_theorem_suite(capsys):
    _check(capsys, "theorem suite green", criterion_theorem_suite)


def test_uniqueness_exactness(capsys):
    _check(capsys, "uniqueness exactness", criterion_uniqueness)


def test_refinement_identities(capsys):
    _check(capsys, "refinement identities", criterion_refinement)


def test_dsoc_correctness(capsys):
    _check(capsys, "dsoc correctness", criterion_dsoc)


def test_idempotent_equivalence(capsys):
    _check(capsys, "idempotent equivalence", criterion_idempotents)


def test_quotient_is_ub(capsys):
    _check(capsys, "quotient is ub", criterion_quotient_ub)


def test_convexity_bridge(capsys):
    _check(capsys, "convexity bridge", criterion_convexity)


def test_hierarchy_census(capsys):
    _check(capsys, "hierarchy census", criterion_census)


def test_determinism_and_round_trip(capsys, tmp_path):
    _check(capsys, "determinism and round-trip", criterion_determinism, str(tmp_path))


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        checks = [
            ("theorem suite green", criterion_theorem_suite, ()),
            ("uniqueness exactness", criterion_uniqueness, ()),
            ("refinement identities", criterion_refinement, ()),
            ("dsoc correctness", criterion_dsoc, ()),
            ("idempotent equivalence", criterion_idempotents, ()),
            ("quotient is ub", criterion_quotient_ub, ()),
            ("convexity bridge", criterion_convexity, ()),
            ("hierarchy census", criterion_census, ()),
            ("determinism and round-trip", criterion_determinism, (tmp,)),
        ]
        results = [report(name, *fn(*args)) for name, fn, args in checks]
    sys.exit(0 if all(results) else 1)
