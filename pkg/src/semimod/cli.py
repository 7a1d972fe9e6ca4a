"""Command-line front end.

Exit codes: 0 success, 1 counterexample (or failed self-check), 2 invalid
input, 3 unsupported operation, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import decomposition as dec
from . import greens
from . import oracle
from . import semiring as sr
from .errors import (BudgetExceeded, InvariantViolation, PreconditionError, StructuralError,
                     UnsupportedOperation)
from .module import DEFAULT_BUDGET, FreeModule, Submodule, free_module, span

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_INVALID, EXIT_UNSUPPORTED, EXIT_IO = 0, 1, 2, 3, 4


class InputError(StructuralError):
    """Invalid instance file; the message names the offending field."""


@dataclass
class InstanceFile:
    semiring: sr.Semiring
    rank: int
    submodules: dict[str, list]
    module: str | None = None
    raw: dict | None = None

    def ambient(self, budget: int = DEFAULT_BUDGET) -> FreeModule:
        return free_module(self.semiring, self.rank, budget)

    def submodule(self, name: str, budget: int = DEFAULT_BUDGET) -> Submodule:
        if name not in self.submodules:
            raise InputError(f"submodules.{name}: missing")
        F = self.ambient(budget)
        return span([F.vector(g) for g in self.submodules[name]], F)

    def target(self, budget: int = DEFAULT_BUDGET) -> Submodule:
        """The module the command acts on: the named ``module`` or all of R^n."""
        if self.module is None:
            return self.ambient(budget).whole()
        return self.submodule(self.module, budget)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise InputError(f"{k}: duplicate key")
        out[k] = v
    return out


def parse_instance(text: str) -> InstanceFile:
    try:
        obj = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise InputError(f"file: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise InputError("file: top level must be an object")
    if "semiring" not in obj:
        raise InputError("semiring: missing")
    R = sr.Semiring.from_json(obj["semiring"], name=obj.get("name", ""))
    if R.kind == "table":
        bad = sr.verify_axioms(R)
        if bad:
            raise InputError(f"semiring: table violates {bad[0].axiom}")
    rank = obj.get("rank", 1)
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0:
        raise InputError("rank: must be a non-negative integer")
    subs = obj.get("submodules", {})
    if not isinstance(subs, dict):
        raise InputError("submodules: must be an object mapping names to generator lists")
    parsed = {}
    for name, gens in subs.items():
        if not isinstance(gens, list):
            raise InputError(f"submodules.{name}: must be a list of vectors")
        vecs = []
        for i, g in enumerate(gens):
            where = f"submodules.{name}[{i}]"
            if not isinstance(g, list) or len(g) != rank:
                raise InputError(f"{where}: expected a list of length {rank}")
            entries = []
            for j, x in enumerate(g):
                try:
                    entries.append(R.element_from_json(x))
                except (StructuralError, TypeError, ValueError):
                    raise InputError(f"{where}[{j}]: {x!r} is not an element of the carrier") \
                        from None
            vecs.append(entries)
        parsed[name] = vecs
    module = obj.get("module")
    if module is not None and module not in parsed:
        raise InputError(f"module: names unknown submodule {module!r}")
    return InstanceFile(R, rank, parsed, module, obj)


def load_instance(path: str) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- report rendering ----------------------------------------------------------


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _set(elements) -> str:
    return "{" + ", ".join(_vec(v) for v in elements) + "}"


def _part(S: Submodule) -> str:
    if S.is_zero():
        return "{0}"
    return "span" + _set(g.to_json() for g in S.generators)


def cmd_analyze(inst: InstanceFile, args) -> tuple[dict, list[str], int]:
    V = inst.target(args.budget)
    W, T = inst.submodule(args.W, args.budget), inst.submodule(args.T, args.budget)
    cc = dec.classify(V, W, T)
    lines = [f"level: {cc.level}"]
    if cc.witness:
        lines.append("witness: " + ", ".join(f"{k}={_vec(v) if isinstance(v, list) else v}"
                                             for k, v in sorted(cc.witness.items())))
    return {"W": args.W, "T": args.T, **cc.to_json()}, lines, EXIT_OK


def cmd_decompose(inst: InstanceFile, args):
    rep = dec.decompose(inst.target(args.budget))
    lines = [f"{len(rep.parts)} indecomposable summand(s), certified: {rep.certified}"]
    lines += [f"  {_part(p)}" for p in rep.parts]
    return rep.to_json(), lines, EXIT_OK


def cmd_dsoc(inst: InstanceFile, args):
    rep = dec.dsoc(inst.target(args.budget))
    lines = [
        f"dsoc: {_part(rep.socle)}" + ("  (full module)" if rep.complement.is_zero() else ""),
        f"complement: {_part(rep.complement)}",
        f"indecomposable summands: {len(rep.summands)}",
    ]
    lines += [f"  {_part(s)}" for s in rep.summands]
    if rep.residual_is_submodule is not None:
        lines.append(f"residual is a submodule: {rep.residual_is_submodule}")
    return rep.to_json(), lines, EXIT_OK


def cmd_idempotents(inst: InstanceFile, args):
    R = inst.semiring
    ids = sr.idempotents(R)
    part = sr.partition_of_one(R)
    obj = {
        "idempotents": [{"value": R.element_to_json(e.value), "primitive": e.primitive}
                        for e in ids],
        "partition_of_one": None if part is None else [R.element_to_json(e.value) for e in part],
    }
    lines = [f"{e.value}  primitive={str(e.primitive).lower()}" for e in ids]
    lines.append("partition of one: " + ("none" if part is None else
                                         " + ".join(str(e.value) for e in part)))
    return obj, lines, EXIT_OK


def cmd_quotient(inst: InstanceFile, args):
    Q = greens.quotient(inst.target(args.budget))
    obj = Q.to_json()
    lines = [f"classes: {len(Q)}  ub={str(Q.ub).lower()}  source_ub={str(Q.source_ub).lower()}"]
    lines += [f"  [{k}] {_set(c)}" for k, c in enumerate(obj["classes"])]
    return obj, lines, EXIT_OK


def cmd_verify(args):
    config = oracle.CorpusConfig(budget=args.budget)
    corpus = oracle.generate_corpus(args.seed, config)
    results = oracle.run_claims(corpus, args.claims, include_broken=args.inject_broken)
    certs = [r.certificate for r in results if r.certificate is not None]
    obj = {
        "seed": args.seed,
        "budget": args.budget,
        "corpus": corpus.to_json(),
        "results": [r.to_json() for r in results],
        "summary": {s: sum(r.status == s for r in results)
                    for s in ("verified", "counterexample", "skipped")},
    }
    if args.census:
        census = oracle.hierarchy_census(corpus)
        census.pop("per_instance")
        obj["census"] = census
    width = max((len(r.claim_id) for r in results), default=0)
    lines = [f"corpus: seed {args.seed}, {len(corpus.instances)} free modules, "
             f"{len(corpus.excluded)} excluded"]
    for r in results:
        line = f"{r.claim_id:<{width}}  {r.status:<14}  instances={r.instances_checked}"
        if r.reason:
            line += f"  ({r.reason})"
        lines.append(line)
    s = obj["summary"]
    lines.append(f"verified {s['verified']}, counterexamples {s['counterexample']}, "
                 f"skipped {s['skipped']}")
    if args.census:
        lines.append("census: " + ", ".join(f"{k}={v}" for k, v in obj["census"]["levels"].items()))
    code = EXIT_OK
    if certs:
        code = EXIT_COUNTEREXAMPLE
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(oracle.dumps(certs) + "\n")
            lines.append(f"certificates written to {args.out}")
    return obj, lines, code


COMMANDS = {
    "analyze": cmd_analyze,
    "decompose": cmd_decompose,
    "dsoc": cmd_dsoc,
    "idempotents": cmd_idempotents,
    "quotient": cmd_quotient,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum number of module elements to enumerate")
    p = argparse.ArgumentParser(prog="semimod",
                                description="Decompositions of modules over semirings.")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="classify the complement relation of W, T")
    a.add_argument("file")
    a.add_argument("W")
    a.add_argument("T")
    for name, text in (("decompose", "split into indecomposable direct summands"),
                       ("dsoc", "decomposition socle and its complement"),
                       ("idempotents", "idempotents of the semiring and a partition of one"),
                       ("quotient", "quotient by Green's congruence")):
        sub.add_parser(name, parents=[common], help=text).add_argument("file")
    v = sub.add_parser("verify", parents=[common], help="run the claim suite on a seeded corpus")
    v.add_argument("--seed", type=int, default=0, help="corpus seed (default 0)")
    v.add_argument("--claims", default=None, help="comma-separated claim ids")
    v.add_argument("--out", default=None, help="write counterexample certificates here")
    v.add_argument("--census", action="store_true", help="include the complement hierarchy census")
    v.add_argument("--inject-broken", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.budget < 2:
            raise PreconditionError("--budget: must be at least 2")
        if args.command == "verify":
            if not 0 <= args.seed < 2**64:
                raise PreconditionError("--seed: must fit in an unsigned 64-bit integer")
            obj, lines, code = cmd_verify(args)
        else:
            inst = load_instance(args.file)
            obj, lines, code = COMMANDS[args.command](inst, args)
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_IO
    except (UnsupportedOperation, BudgetExceeded) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (StructuralError, PreconditionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantViolation as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    if args.json:
        print(oracle.dumps(obj))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
