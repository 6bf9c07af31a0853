"""Command-line front end with stable text/JSON output.

Exit codes: 0 success (all scored equations pass), 1 verification failure,
2 input errors.  FROBPAIR_AXIOMS overrides the shipped axiom manifest.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import cube as cube_mod
from .cobordism import CobordismError, diamond_exchange_suite, evaluate, parse_cobordism, \
    is_essential, pole_degree, total_degree
from .pair import (
    DOUBLE_EXPONENTS,
    PairError,
    Rank2Params,
    build_aps,
    build_double,
    build_it,
    build_laurent_sqrt,
    build_rank2,
    build_tt,
    load_pair,
    pair_to_json,
    universal_algebra,
    verify,
)
from .ring import INTEGERS, MOD2, RATIONALS, RingError, ring
from .theory import MANIFEST_VERSION, TheoryError, load_axioms


class InputError(Exception):
    """User input problems; mapped to exit code 2."""


def parse_params(values) -> dict:
    out = {}
    for chunk in values or []:
        for item in chunk.split(","):
            if not item:
                continue
            key, sep, val = item.partition("=")
            if not sep:
                raise InputError(f"bad parameter {item!r}: expected KEY=VAL")
            out[key.strip()] = val.strip()
    return out


RANK2_KEYS = {"a": "a", "cYY": "c_yy", "cYZ": "c_yz", "cZZ": "c_zz",
              "dYY": "d_yy", "dYZ": "d_yz", "dZZ": "d_zz",
              "eY": "e_y", "eZ": "e_z", "fY": "f_y", "fZ": "f_z"}


def build_builtin(name, params, strict_partial=False):
    if name == "aps":
        return build_aps()
    if name == "tt":
        return build_tt()
    if name == "it":
        return build_it(strict_partial=strict_partial)
    if name == "sqrt":
        return build_laurent_sqrt()
    if name == "rank2":
        decl = ring(INTEGERS)
        kw = {field: 0 for field in RANK2_KEYS.values()}
        for key, val in params.items():
            if key not in RANK2_KEYS:
                raise InputError(f"unknown rank2 parameter {key!r}")
            try:
                kw[RANK2_KEYS[key]] = int(val)
            except ValueError:
                raise InputError(f"rank2 parameter {key} must be an integer") from None
        return build_rank2(Rank2Params.over(decl, **kw))
    if name == "double":
        exps = list(DOUBLE_EXPONENTS)
        algebra = params.pop("algebra", "q1")
        for i, key in enumerate(("e0", "e1", "e2", "nu0", "nu1", "nu2")):
            if key in params:
                try:
                    exps[i] = int(params[key])
                except ValueError:
                    raise InputError(f"double parameter {key} must be an integer") from None
        if algebra == "q1":
            decl = ring(RATIONALS)
            alg = universal_algebra(decl, decl.zero(), decl.one())
            phi_inv = {"X": decl.const(Fraction(1, 2))}
        elif algebra == "z2h1":
            decl = ring(MOD2)
            alg = universal_algebra(decl, decl.one(), decl.zero())
            phi_inv = {"1": decl.one()}
        else:
            raise InputError(f"unknown double algebra {algebra!r} (use q1 or z2h1)")
        return build_double(alg, phi_inv, tuple(exps))
    raise InputError(f"unknown builtin {name!r}")


def get_pair(args, params=None):
    if getattr(args, "pair", None):
        try:
            return load_pair(args.pair)
        except OSError as exc:
            raise InputError(str(exc)) from None
    if getattr(args, "builtin", None):
        return build_builtin(args.builtin, params if params is not None else {},
                             strict_partial=getattr(args, "strict_partial", False))
    raise InputError("need --pair FILE or --builtin NAME")


def get_axioms(args):
    path = getattr(args, "axioms", None) or os.environ.get("FROBPAIR_AXIOMS")
    try:
        return load_axioms(path)
    except (OSError, TheoryError) as exc:
        raise InputError(f"cannot load axioms: {exc}") from None


def _tuple_str(t):
    return "&".join(t) if t else "()"


def _witness_obj(witness):
    if witness is None:
        return None
    if witness[0] == "shape":
        return {"kind": "shape", "lhs": str(witness[1]), "rhs": str(witness[2])}
    t, lhs_col, rhs_col = witness
    return {
        "input": _tuple_str(t),
        "lhs": [[_tuple_str(o), str(c)] for o, c in sorted(lhs_col.items())],
        "rhs": [[_tuple_str(o), str(c)] for o, c in sorted(rhs_col.items())],
    }


def report_json(report) -> str:
    obj = {
        "manifest_version": MANIFEST_VERSION,
        "pair": report.pair_name,
        "ok": report.ok(),
        "summary": {g: report.summary()[g] for g in sorted(report.summary())},
        "meta": {k: report.meta[k] for k in sorted(report.meta)},
        "equations": [
            {
                "name": r.name,
                "group": r.group,
                "provenance": r.provenance,
                "status": r.status,
                **({"witness": _witness_obj(r.witness)} if r.status == "fail" else {}),
                **({"missing": list(r.missing)} if r.status == "skip" else {}),
            }
            for r in report.records
        ],
    }
    return json.dumps(obj, indent=2)


def report_text(report) -> str:
    lines = []
    for r in report.records:
        if r.status == "pass":
            lines.append(f"PASS {r.name} [{r.group}]")
        elif r.status == "skip":
            lines.append(f"SKIP {r.name} [{r.group}] missing: {', '.join(r.missing)}")
        else:
            w = _witness_obj(r.witness)
            if w and "input" in w:
                detail = (f"input={w['input']} lhs={w['lhs']} rhs={w['rhs']}")
            else:
                detail = str(w)
            lines.append(f"FAIL {r.name} [{r.group}] ({r.provenance}) {detail}")
    for group in sorted(report.summary()):
        c = report.summary()[group]
        lines.append(f"group {group}: {c['pass']} pass, {c['fail']} fail, {c['skip']} skip")
    lines.append("RESULT: " + ("ok" if report.ok() else "FAILED"))
    return "\n".join(lines)


def cmd_verify(args) -> int:
    params = parse_params(args.params)
    pair = get_pair(args, params)
    equations = get_axioms(args)
    groups = set(args.groups.split(",")) if args.groups else None
    report = verify(pair, equations, groups)
    print(report_json(report) if args.report == "json" else report_text(report))
    return 0 if report.ok() else 1


def cmd_construct(args) -> int:
    params = parse_params(args.params)
    pair = build_builtin(args.builtin, params, strict_partial=args.strict_partial)
    text = pair_to_json(pair)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_eval(args) -> int:
    pair = get_pair(args)
    try:
        with open(args.cobordism, encoding="utf-8") as fh:
            cob = parse_cobordism(fh.read())
    except OSError as exc:
        raise InputError(str(exc)) from None
    m = evaluate(cob, pair)
    if m.dom == () and m.cod == ():
        print(str(m.column(()).get((), pair.ring.zero())))
        return 0
    print(f"map: {_tuple_str(m.dom)} -> {_tuple_str(m.cod)}")
    for t in pair.spec.tuples(m.dom):
        col = m.column(t)
        body = " + ".join(f"({c})*{_tuple_str(o)}" for o, c in sorted(col.items())) or "0"
        print(f"{_tuple_str(t)} -> {body}")
    return 0


def cmd_diamond(args) -> int:
    pair = get_pair(args)
    report = diamond_exchange_suite(pair)
    failures = report.failures()
    for r in report.records:
        if r.status == "fail":
            print(f"FAIL {r.name}")
    print(f"diamond: {len(report.records) - len(failures)} pass, {len(failures)} fail")
    return 0 if not failures else 1


def cmd_cube(args) -> int:
    pair = get_pair(args)
    try:
        cube = cube_mod.load_cube(args.cube)
    except OSError as exc:
        raise InputError(str(exc)) from None
    if args.specialize:
        assignment = {}
        for key, val in parse_params([args.specialize]).items():
            try:
                assignment[key] = pair.ring.parse(val)
            except RingError as exc:
                raise InputError(str(exc)) from None
        pair = cube_mod.specialize_pair(pair, assignment)
    report = cube_mod.homology(cube, pair, args.coeff)
    print("betti: " + " ".join(str(s["betti"]) for s in report))
    if args.coeff == "z":
        print("torsion: " + " ".join(
            ",".join(str(x) for x in s["torsion"]) or "-" for s in report))
    print("sign: (-1)^(ones before flipped index)")
    return 0


def cmd_degree(args) -> int:
    degrees = [pole_degree(w) for w in args.poles]
    total = total_degree(args.poles)
    label = "essential" if is_essential(args.poles) else "inessential"
    print(" ".join(str(d) for d in degrees) +
          (" " if degrees else "") + f"total={total} {label}")
    return 0


def cmd_snf(args) -> int:
    try:
        with open(args.matrix, encoding="utf-8") as fh:
            m = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from None
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise InputError("matrix file must hold a JSON list of rows")
    d, u, v = cube_mod.smith_normal_form(m)
    for name, mat in (("D", d), ("U", u), ("V", v)):
        print(name + ":")
        for row in mat:
            print("  " + " ".join(str(x) for x in row))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frobpair",
        description="Exact verifier and evaluator for commutative Frobenius "
                    "pairs with Mobius maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pair_args(p, with_params=True):
        p.add_argument("--pair", help="structure file")
        p.add_argument("--builtin", choices=["aps", "tt", "it", "rank2", "sqrt", "double"])
        if with_params:
            p.add_argument("--params", action="append", default=[],
                           help="builtin parameters KEY=VAL[,KEY=VAL...]")
        p.add_argument("--strict-partial", action="store_true",
                       help="leave undefined generators absent (builtin it)")

    p = sub.add_parser("verify", help="check the axiom manifest against a pair")
    add_pair_args(p)
    p.add_argument("--axioms", help="equation manifest path (or FROBPAIR_AXIOMS)")
    p.add_argument("--groups", help="comma-separated group filter")
    p.add_argument("--report", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="build a builtin pair and write its file")
    p.add_argument("--builtin", required=True,
                   choices=["aps", "tt", "it", "rank2", "sqrt", "double"])
    p.add_argument("--params", action="append", default=[])
    p.add_argument("--strict-partial", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("eval", help="evaluate a cobordism word file")
    add_pair_args(p, with_params=False)
    p.add_argument("cobordism")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("diamond", help="run the saddle-exchange suite")
    add_pair_args(p, with_params=False)
    p.set_defaults(func=cmd_diamond)

    p = sub.add_parser("cube", help="homology of a state cube")
    add_pair_args(p, with_params=False)
    p.add_argument("cube")
    p.add_argument("--coeff", choices=["q", "z", "z2"], default="q")
    p.add_argument("--specialize", help="ring assignment KEY=VAL[,...]")
    p.set_defaults(func=cmd_cube)

    p = sub.add_parser("degree", help="pole degrees of virtual circles")
    p.add_argument("poles", nargs="*", help="words over +/- (or L/R)")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("snf", help="Smith normal form of an integer matrix file")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_snf)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PairError, RingError, TheoryError, CobordismError, cube_mod.CubeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
