"""Command-line entry point: ``python -m mergeres <command> ...``.

Reports are key=value lines (``--json`` for a JSON object). Exit status: 0 on
success, 1 when a check ran and failed, 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import analysis, cdcl, families, oracles, proof, systems, transform, unit
from .cnf import Clause, CnfFormula, DimacsError, Restriction, parse_dimacs, write_dimacs

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- io helpers

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from e


def _digest(path: str) -> str:
    return hashlib.sha256(_read(path).encode()).hexdigest()[:16]


def _formula(path: str) -> CnfFormula:
    return parse_dimacs(_read(path))


def _proof(path: str) -> proof.Proof:
    return proof.parse_trace(_read(path))


def _layout(path: str) -> families.FamilyLayout:
    return families.parse_layout(_read(path))


def parse_restriction(text: str) -> Restriction:
    """Lines ``<var> <0|1|*>``; ``<var> =<lit>`` identifies var with a literal."""
    consts, ren = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if len(parts) != 2:
            raise UsageError(f"restriction line {lineno}: expected '<var> <value>'")
        v, val = int(parts[0]), parts[1]
        if val == "*":
            continue
        if val in ("0", "1"):
            consts[v] = int(val)
        elif val.startswith("="):
            ren[v] = int(val[1:])
        else:
            raise UsageError(f"restriction line {lineno}: bad value {val!r}")
    return Restriction.with_renaming(consts, ren)


def write_restriction(rho: Restriction, num_vars: int) -> str:
    lines = []
    for v in range(1, num_vars + 1):
        val = rho.value(v)
        if isinstance(val, tuple):
            lines.append(f"{v} ={val[1]}")
        else:
            lines.append(f"{v} {val}")
    return "\n".join(lines) + "\n"


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        s = str(args.seed)
        return int(s.split("=", 1)[1] if s.startswith("seed=") else s)
    return int(os.environ.get("MRT_SEED", "0"))


def _params(args, variant=None) -> families.FamilyParams:
    return families.FamilyParams(args.l, args.m, args.n, variant or getattr(args, "variant", "base"))


# ---------------------------------------------------------------- reporting

def _emit(args, report: dict):
    if args.json:
        sys.stdout.write(json.dumps(report, sort_keys=True, default=str) + "\n")
        return
    for k, v in _flatten(report):
        sys.stdout.write(f"{k}={v}\n")


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, bool):
            yield key, str(v).lower()
        elif isinstance(v, (list, tuple)):
            yield key, ",".join(map(str, v))
        else:
            yield key, v


def _expect_code(args, value: bool) -> int:
    expect = getattr(args, "expect", None)
    if expect is None:
        return EXIT_OK if value else EXIT_FAIL
    return EXIT_OK if value == (expect == "true") else EXIT_FAIL


# ---------------------------------------------------------------- commands

def cmd_gen(args):
    kind = args.family
    if kind in ("base", "v1", "v2", "v3"):
        f, lay = families.gen_family(_params(args, kind))
    elif kind == "weakening":
        f, lay, _ = families.gen_weakening_formula(_params(args, "base"))
    elif kind == "weakening-base":
        f, lay, _ = families.gen_weakening_base(_params(args, "base"))
    else:
        raise UsageError(f"unknown family {kind!r}")
    p = lay.params
    _write(args.out, write_dimacs(f, [f"F_{{{p.l},{p.m},{p.n}}} {kind}"]))
    if args.layout:
        _write(args.layout, families.write_layout(lay))
    _emit(args, {"command": "gen", "family": kind, "vars": f.num_vars, "clauses": len(f.clauses)})
    return EXIT_OK


def cmd_gen_proof(args):
    kind = args.kind
    if kind == "res-ub":
        p = families.build_res_ub(_params(args, "base"))
    elif kind == "rml-r1":
        p = families.build_rml_r1(_params(args, "base"))
    elif kind == "rml-r3":
        p = families.build_rml_r3(_params(args, "base"))
    elif kind == "variant":
        if args.variant == "base" or not args.system:
            raise UsageError("variant proofs need --variant v1|v2|v3 and --system")
        p = families.build_variant_refutation(args.variant, _params(args), args.system)
    elif kind == "weakening":
        p = families.build_weakening_refutation(_params(args, "base"))
    elif kind == "gn":
        p = families.build_gn_derivation(_params(args, "base"))
    else:
        raise UsageError(f"unknown proof kind {kind!r}")
    _write(args.out, proof.write_trace(p))
    _emit(args, {"command": "gen-proof", "kind": kind, "length": len(p)})
    return EXIT_OK


def cmd_check(args):
    f, p = _formula(args.formula), _proof(args.proof)
    rep = {"command": "check", "proof_sha": _digest(args.proof), "formula_sha": _digest(args.formula)}
    if p.semantic:
        v = proof.check_semantic(p, f)
    else:
        v = proof.check_valid(p, f, allow_weakening=args.allow_weakening,
                              require_refutation=args.refutation)
    rep["valid"] = bool(v)
    if not v:
        rep["error"] = f"step {v.step}: {v.reason}"
    value = bool(v)
    if args.system and v and not p.semantic:
        c = systems.classify(p, f, allow_weakening=args.allow_weakening)
        value = c.flag(args.system)
        rep[args.system.replace("-", "_")] = value
        if not value and args.system.replace("-", "_") in c.diagnostics:
            rep["why"] = c.diagnostics[args.system.replace("-", "_")]
    rep["length"] = len(p)
    _emit(args, rep)
    return _expect_code(args, value)


def cmd_classify(args):
    f, p = _formula(args.formula), _proof(args.proof)
    c = systems.classify(p, f, allow_weakening=args.allow_weakening)
    if args.json:
        sys.stdout.write(c.to_json() + "\n")
    else:
        sys.stdout.write(c.to_text())
    return EXIT_OK


def cmd_simulate(args):
    f, p = _formula(args.formula), _proof(args.proof)
    fn = transform.simulate_rml if args.target == "rml" else transform.simulate_lreml
    out = fn(p, f)
    _write(args.out, proof.write_trace(out))
    L, n = len(p), f.num_vars
    budget = (2 * n + 1) * L + n
    ok = len(out) <= budget and systems.classify(out, f).flag(args.target)
    _emit(args, {"command": "simulate", "target": args.target, "input_length": L,
                 "output_length": len(out), "budget": budget, "within_budget": len(out) <= budget,
                 args.target: ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_transform(args):
    p = _proof(args.proof)
    op = {"tree-to-input": transform.tree_to_input, "tree-to-merge": transform.tree_to_merge,
          "decompose": transform.decompose_input_structured,
          "regularize": transform.regularize_input}[args.op]
    out = op(p)
    _write(args.out, proof.write_trace(out))
    _emit(args, {"command": "transform", "op": args.op, "input_length": len(p),
                 "output_length": len(out), "conclusion": str(out.conclusion)})
    return EXIT_OK


def cmd_restrict(args):
    lay = _layout(args.layout) if args.layout else None
    rep = {"command": "restrict", "mode": args.mode}
    if args.mode == "apply":
        if not args.map:
            raise UsageError("restrict apply needs --map")
        rho = parse_restriction(_read(args.map))
    elif args.mode == "sample":
        if lay is None:
            raise UsageError("restrict sample needs --layout")
        s = analysis.sample_restriction(lay, _seed(args))
        rho = s.restriction
        rep.update(seed=s.seed, J="".join(map(str, s.J)), surviving=len(s.surviving))
    else:
        if lay is None or not args.proof:
            raise UsageError("restrict find-respecting needs --layout and --proof")
        s = analysis.find_respecting_restriction(_proof(args.proof), lay, args.max_tries, _seed(args))
        rep["found"] = s is not None
        if s is None:
            _emit(args, rep)
            return EXIT_FAIL
        rho = s.restriction
        rep.update(seed=s.seed, J="".join(map(str, s.J)), surviving=len(s.surviving))
    if args.map_out:
        nv = lay.num_vars if lay else max(rho.assigned().keys() | rho.renamed().keys() | {0})
        _write(args.map_out, write_restriction(rho, nv))
    code = EXIT_OK
    if args.formula:
        f = _formula(args.formula)
        fr = f.restrict(rho)
        rep["restricted_clauses"] = len(fr.clauses)
        if args.formula_out:
            _write(args.formula_out, write_dimacs(fr))
        if args.proof:
            s_eq = proof.syntactic_equivalent(proof.restrict_proof(_proof(args.proof), rho), fr)
            v = proof.check_valid(s_eq, fr)
            rep.update(restricted_length=len(s_eq), restricted_valid=bool(v))
            if args.out:
                _write(args.out, proof.write_trace(s_eq))
            code = EXIT_OK if v else EXIT_FAIL
    _emit(args, rep)
    return code


def cmd_stats(args):
    p = _proof(args.proof)
    d = proof.stats(p).as_dict()
    d = {"command": "stats", **d}
    _emit(args, d)
    return EXIT_OK


def cmd_mu_report(args):
    p, lay = _proof(args.proof), _layout(args.layout)
    hist = analysis.mu_histogram(p, lay)
    rep = {"command": "mu-report", "clauses": sum(hist.values()),
           "max_mu": max(hist) if hist else 0, "hist": {str(k): v for k, v in hist.items()}}
    _emit(args, rep)
    return EXIT_OK


def cmd_analyze_conflict(args):
    f = _formula(args.formula)
    if args.decisions:
        ep = cdcl.episode_from_decisions(f, [int(t) for t in args.decisions.replace(",", " ").split()])
        rep = {"command": "analyze-conflict", "decisions": args.decisions}
    else:
        ep = cdcl.random_episode(f, _seed(args))
        rep = {"command": "analyze-conflict", "seed": _seed(args)}
    rep.update(status=ep.status, trail_length=len(ep.trail))
    if ep.status != "conflict":
        _emit(args, rep)
        return EXIT_OK
    a = cdcl.conflict_derivation(ep.trail, f, ep.conflict)
    uip, j = cdcl.first_uip(a, ep.trail)
    sid = a.producer[j]
    step = a.proof[sid]
    merge = step.kind == proof.RESOLUTION and a.proof.step_is_merge(sid)
    asserting = [k for k in sorted(a.clauses) if k >= a.i_star and cdcl.is_asserting(a.clauses[k], ep.trail)]
    db = list(f.clauses)
    empowering = all(unit.is_empowering(db, a.clauses[k]) for k in asserting)
    if args.out:
        _write(args.out, proof.write_trace(a.proof))
    rep.update(conflict_clause=ep.conflict, i_star=a.i_star, uip=str(uip), uip_position=j,
               uip_is_merge=merge, asserting=len(asserting), all_asserting_empowering=empowering)
    _emit(args, rep)
    return EXIT_OK if merge and empowering else EXIT_FAIL


def cmd_oracle(args):
    f = _formula(args.formula)
    if f.num_vars > 4 or len(f.clauses) > 8:
        raise UsageError("oracle is for tiny formulas only (<= 4 vars, <= 8 clauses)")
    targets = [Clause(int(t) for t in args.clause.split())] if args.clause is not None \
        else list(oracles.all_clauses(f.num_vars))
    mism = [c for c in targets
            if unit.cl_i_member(f.clauses, c) != oracles.input_member(f.clauses, c)]
    _emit(args, {"command": "oracle", "targets": len(targets), "mismatches": len(mism),
                 "agree": not mism})
    return EXIT_OK if not mism else EXIT_FAIL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mergeres", description="Merge resolution proof toolkit")
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = ap.add_subparsers(dest="command", required=True)

    def fam(p):
        p.add_argument("--l", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("gen", help="write a family formula as DIMACS")
    p.add_argument("--family", default="base",
                   choices=["base", "v1", "v2", "v3", "weakening", "weakening-base"])
    fam(p)
    p.add_argument("--out")
    p.add_argument("--layout", help="write the layout sidecar here")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("gen-proof", help="write an explicit refutation")
    p.add_argument("--kind", required=True, choices=["res-ub", "rml-r1", "rml-r3", "variant", "weakening", "gn"])
    fam(p)
    p.add_argument("--variant", default="base", choices=["base", "v1", "v2", "v3"])
    p.add_argument("--system", choices=["rma", "rml", "lrma", "lrml"])
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_proof)

    p = sub.add_parser("check", help="check a proof, optionally its proof system")
    p.add_argument("--proof", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--system", choices=list(systems.FLAGS))
    p.add_argument("--expect", choices=["true", "false"])
    p.add_argument("--allow-weakening", action="store_true")
    p.add_argument("--refutation", action="store_true", help="require the empty clause")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("classify", help="report every proof system flag")
    p.add_argument("--proof", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--allow-weakening", action="store_true")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("simulate", help="turn a resolution refutation into RML or LREML")
    p.add_argument("--proof", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--target", default="rml", choices=["rml", "lreml"])
    p.add_argument("--out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("transform", help="tree and input derivation transformations")
    p.add_argument("--op", required=True, choices=["tree-to-input", "tree-to-merge", "decompose", "regularize"])
    p.add_argument("--proof", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("restrict", help="apply, sample or search restrictions")
    p.add_argument("mode", nargs="?", default="apply", choices=["apply", "sample", "find-respecting"])
    p.add_argument("--map", help="restriction file to apply")
    p.add_argument("--map-out", help="write the restriction used here")
    p.add_argument("--sample", dest="seed", help="seed=<s> or <s>; implies 'sample' mode")
    p.add_argument("--seed", dest="seed")
    p.add_argument("--layout")
    p.add_argument("--formula")
    p.add_argument("--formula-out")
    p.add_argument("--proof")
    p.add_argument("--out")
    p.add_argument("--max-tries", type=int, default=100)
    p.set_defaults(fn=cmd_restrict)

    p = sub.add_parser("stats", help="length, merges, width and degree of a proof")
    p.add_argument("--proof", required=True)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("mu-report", help="histogram of block widths over a proof")
    p.add_argument("--proof", required=True)
    p.add_argument("--layout", required=True)
    p.set_defaults(fn=cmd_mu_report)

    p = sub.add_parser("analyze-conflict", help="seeded CDCL episode and 1UIP analysis")
    p.add_argument("--formula", required=True)
    p.add_argument("--seed")
    p.add_argument("--decisions", help="decision literals in order; default: seeded random episode")
    p.add_argument("--out", help="write the conflict derivation as a trace")
    p.set_defaults(fn=cmd_analyze_conflict)

    p = sub.add_parser("oracle", help="brute-force input closure comparison (tiny formulas)")
    p.add_argument("--formula", required=True)
    p.add_argument("--clause", help="space separated literals; default: every clause")
    p.set_defaults(fn=cmd_oracle)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # the global flag may appear anywhere
    want_json = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    args.json = want_json
    if args.command == "restrict" and args.mode == "apply" and args.seed is not None and not args.map:
        args.mode = "sample"
    try:
        return args.fn(args)
    except (UsageError, DimacsError, proof.TraceError, ValueError, KeyError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
