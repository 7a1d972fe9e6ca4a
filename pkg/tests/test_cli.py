import json
import subprocess
import sys

import pytest

from semimod import oracle
from semimod.cli import main

B2 = {"semiring": {"kind": "boolean"}, "rank": 2,
      "submodules": {"axis1": [[1, 0]], "axis2": [[0, 1]], "other": [[0, 1], [1, 1]]}}
Z2 = {"semiring": {"kind": "table", "carrier": ["0", "1"], "add": [["0", "1"], ["1", "0"]],
                   "mul": [["0", "0"], ["0", "1"]], "zero": "0", "one": "1"}, "rank": 1}
T3 = {"semiring": {"kind": "truncated", "q": 3}}
MAXPLUS = {"semiring": {"kind": "maxplus-int"}, "rank": 2,
           "submodules": {"a": [[0, "-inf"]], "b": [["-inf", 0]]}}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="inst.json"):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def reparses(out: str) -> dict:
    obj = json.loads(out)
    assert oracle.dumps(obj) == out.rstrip("\n")
    return obj


class TestAnalyze:
    def test_direct(self, capsys, write):
        code, out, _ = run(capsys, "analyze", write(B2), "axis1", "axis2")
        assert code == 0 and out == "level: direct\n"

    def test_witness_line(self, capsys, write):
        code, out, _ = run(capsys, "analyze", write(B2), "axis1", "other")
        assert code == 0
        assert out.splitlines() == ["level: trivial-intersection",
                                    "witness: t1=(0,1), t2=(1,1), w=(1,0)"]

    def test_json(self, capsys, write):
        code, out, _ = run(capsys, "analyze", write(B2), "axis1", "axis2", "--json")
        assert code == 0 and reparses(out) == {"W": "axis1", "T": "axis2", "level": "direct",
                                               "witness": None}

    def test_missing_name(self, capsys, write):
        code, out, err = run(capsys, "analyze", write(B2), "axis1", "nope")
        assert code == 2 and "nope" in err and out == ""
        assert len(err.strip().splitlines()) == 1

    def test_maxplus_unsupported(self, capsys, write):
        code, _, err = run(capsys, "analyze", write(MAXPLUS), "a", "b")
        assert code == 3 and "enumerated" in err


class TestInputValidation:
    @pytest.mark.parametrize("patch,field", [
        ({"rank": -1}, "rank"),
        ({"rank": "2"}, "rank"),
        ({"submodules": {"x": [[1]]}}, "submodules.x[0]"),
        ({"submodules": {"x": [[1, 7]]}}, "submodules.x[0][1]"),
        ({"submodules": {"x": "oops"}}, "submodules.x"),
        ({"semiring": {"kind": "nope"}}, "semiring.kind"),
        ({"module": "ghost"}, "module"),
    ])
    def test_field_named(self, capsys, write, patch, field):
        code, _, err = run(capsys, "dsoc", write({**B2, **patch}))
        assert code == 2 and field in err

    def test_missing_semiring(self, capsys, write):
        code, _, err = run(capsys, "dsoc", write({"rank": 1}))
        assert code == 2 and "semiring" in err

    def test_duplicate_names(self, capsys, write):
        text = '{"semiring": {"kind": "boolean"}, "rank": 1, "submodules": {"a": [], "a": []}}'
        code, _, err = run(capsys, "dsoc", write(text))
        assert code == 2 and "duplicate" in err

    def test_not_json(self, capsys, write):
        code, _, err = run(capsys, "dsoc", write("{nope"))
        assert code == 2 and "JSON" in err

    def test_table_violating_axioms(self, capsys, write):
        bad = json.loads(json.dumps(Z2))
        bad["semiring"]["add"] = [["0", "1"], ["0", "0"]]
        code, _, err = run(capsys, "quotient", write(bad))
        assert code == 2 and "semiring" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "dsoc", str(tmp_path / "absent.json"))
        assert code == 4 and "absent.json" in err

    def test_bad_budget(self, capsys, write):
        code, _, err = run(capsys, "dsoc", write(B2), "--budget", "1")
        assert code == 2 and "--budget" in err

    def test_budget_too_small_for_module(self, capsys, write):
        code, _, err = run(capsys, "dsoc", write(B2), "--budget", "3")
        assert code == 3

    def test_usage_error(self, capsys):
        assert main(["frobnicate"]) == 2


class TestReports:
    def test_dsoc(self, capsys, write):
        code, out, _ = run(capsys, "dsoc", write(B2))
        assert code == 0
        assert out.splitlines()[0] == "dsoc: span{(0,1), (1,0)}  (full module)"
        assert "indecomposable summands: 2" in out
        code, out, _ = run(capsys, "dsoc", write(B2), "--json")
        obj = reparses(out)
        assert obj["is_whole"] and len(obj["summands"]) == 2

    def test_dsoc_of_named_module(self, capsys, write):
        code, out, _ = run(capsys, "dsoc", write({**B2, "module": "other"}), "--json")
        assert code == 0 and reparses(out)["dsoc"]["elements"] == [[0, 0], [0, 1], [1, 1]]

    def test_decompose(self, capsys, write):
        code, out, _ = run(capsys, "decompose", write(B2), "--json")
        obj = reparses(out)
        assert code == 0 and obj["certified"] and len(obj["parts"]) == 2

    def test_idempotents(self, capsys, write):
        code, out, _ = run(capsys, "idempotents", write(T3))
        assert code == 0
        assert out.splitlines()[:3] == ["0  primitive=false", "1  primitive=true",
                                        "3  primitive=true"]
        code, out, _ = run(capsys, "idempotents", write(T3), "--json")
        assert [e["value"] for e in reparses(out)["idempotents"]] == [0, 1, 3]

    def test_idempotents_infinite(self, capsys, write):
        code, _, err = run(capsys, "idempotents", write({"semiring": {"kind": "natural"}}))
        assert code == 3 and "natural" in err

    def test_quotient_zmod2(self, capsys, write):
        code, out, _ = run(capsys, "quotient", write(Z2))
        assert code == 0 and out.startswith("classes: 1  ub=true")
        code, out, _ = run(capsys, "quotient", write(Z2), "--json")
        obj = reparses(out)
        assert len(obj["classes"]) == 1 and obj["ub"] is True

    def test_human_output_is_stable(self, capsys, write):
        path = write(B2)
        first = run(capsys, "dsoc", path)
        assert run(capsys, "dsoc", path) == first


class TestVerify:
    def test_single_claim(self, capsys):
        code, out, _ = run(capsys, "verify", "--claims", "weak-descent", "--json")
        obj = reparses(out)
        assert code == 0 and [r["claimId"] for r in obj["results"]] == ["weak-descent"]
        assert obj["results"][0]["status"] == "verified"

    def test_injected_broken_claim(self, capsys, tmp_path):
        out_path = tmp_path / "certs.json"
        code, out, _ = run(capsys, "verify", "--claims", "weak-descent", "--inject-broken",
                           "--out", str(out_path))
        assert code == 1 and "counterexample" in out
        certs = json.loads(out_path.read_text(encoding="utf-8"))
        assert [c["claim"] for c in certs] == ["broken-negated-descent"]
        assert all(oracle.reverify_certificate(c) for c in certs)

    def test_hidden_flag_not_in_help(self, capsys):
        assert main(["verify", "--help"]) == 0
        assert "inject" not in capsys.readouterr().out

    def test_unwritable_out(self, capsys, tmp_path):
        code, _, _ = run(capsys, "verify", "--claims", "weak-descent", "--inject-broken",
                         "--out", str(tmp_path / "missing-dir" / "c.json"))
        assert code == 4

    def test_unknown_claim(self, capsys):
        code, _, err = run(capsys, "verify", "--claims", "no-such-claim")
        assert code == 2 and "no-such-claim" in err

    def test_seed_range(self, capsys):
        code, _, err = run(capsys, "verify", "--seed", "-1")
        assert code == 2 and "--seed" in err

    def test_deterministic(self, capsys):
        a = run(capsys, "verify", "--claims", "sa-lattice,quotient-ub", "--json", "--seed", "5")
        b = run(capsys, "verify", "--claims", "sa-lattice,quotient-ub", "--json", "--seed", "5")
        assert a == b and a[0] == 0


def test_module_entry_point(tmp_path):
    p = tmp_path / "b2.json"
    p.write_text(json.dumps(B2), encoding="utf-8")
    proc = subprocess.run([sys.executable, "-m", "semimod", "analyze", str(p), "axis1", "axis2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "level: direct\n"
