"""immcalc command line.

Every command writes one JSON object to stdout with a top-level "schema": 1
and the echoed command; diagnostics go to stderr.

Exit codes: 0 ok, 1 verification failed, 2 usage/parse/file error,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dicyclic import GroupError, abelianization, check_extension, dic_order, is_associative, quaternion_model_agrees, relations_hold
from .forms import SearchBudget, finite_abelian_label
from .kirby import IDENTITIES, KirbyError, MoveScript, run_script, verify_identity
from .plumbing import BoundaryError, ParseError, boundary_descriptor, euler_characteristic, intersection_form, parse_expr
from .singularities import BumpFunction, verify_no_rank2
from .smale import LedgerError, pipeline_f, pipeline_g

SCHEMA = 1
OK, FAILED, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 too, but keep our JSON-free stderr format
        self.print_usage(sys.stderr)
        print(f"immcalc: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def parse_range(text: str) -> list[int]:
    """'4' or '2..6' (inclusive)."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad range {text!r}; use N or A..B") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {text!r}; need 1 <= A <= B")
    return list(range(lo, hi + 1))


def parse_budget(text: str | None) -> SearchBudget:
    """'depth=24,entry_factor=4,max_states=200000'; omitted keys keep defaults."""
    if not text:
        return SearchBudget()
    fields = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in ("depth", "entry_factor", "max_states"):
            raise UsageError(f"bad budget item {part!r}")
        try:
            fields[key] = int(val)
        except ValueError:
            raise UsageError(f"budget {key} must be an integer") from None
    return SearchBudget(**fields)


# commands return (payload, exit code, one-line summary)


def cmd_eval(args) -> tuple[dict, int, str]:
    expr = parse_expr(args.expr)
    form = intersection_form(expr)
    inv = form.invariants()
    try:
        boundary = boundary_descriptor(expr).to_json()
    except BoundaryError as exc:
        boundary = {"error": str(exc)}
    out = {
        "expr": str(expr),
        "chi": euler_characteristic(expr),
        "rank": inv["rank"],
        "sigma": inv["sigma"],
        "det": inv["det"],
        "parity": inv["parity"],
        "snf": list(inv["snf"]),
        "boundary": boundary,
    }
    return out, OK, f"{expr}: chi={out['chi']} sigma={out['sigma']} det={out['det']} {out['parity']}"


def cmd_family(args) -> tuple[dict, int, str]:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    res = (pipeline_f if args.which == "f" else pipeline_g)(args.n)
    out = res.to_json(trace=args.trace)
    return out, OK, f"{args.which}_{args.n}: omega={tuple(out['omega'])} bordism={out['bordism']}"


def cmd_verify(args) -> tuple[dict, int, str]:
    if args.identity not in IDENTITIES:
        raise UsageError(f"unknown identity {args.identity!r}; choose from {', '.join(IDENTITIES)}")
    budget = parse_budget(args.budget)
    reports = [verify_identity(args.identity, n, budget) for n in parse_range(args.n)]
    ok = all(r.certified for r in reports)
    for r in reports:
        if not r.certified:
            print(f"immcalc: {args.identity} n={r.n}: {r.summary()}", file=sys.stderr)
    out = {
        "identity": args.identity,
        "all_certified": ok,
        "literal_all_hold": all(r.literal_holds for r in reports),
        "results": [r.to_json() for r in reports],
    }
    verdicts = ", ".join(f"n={r.n}:{'ok' if r.certified else 'FAIL'}" for r in reports)
    return out, OK if ok else FAILED, f"{args.identity}: {verdicts}"


def cmd_kirby(args) -> tuple[dict, int, str]:
    try:
        script = MoveScript.load(args.path)
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror or exc}") from None
    res = run_script(script)
    out = {"script": args.path, **res.to_json()}
    if not res.passed:
        print(f"immcalc: {args.path}: step {res.step}: {res.reason}", file=sys.stderr)
    return out, OK if res.passed else FAILED, f"{args.path}: {'pass' if res.passed else 'FAIL'}"


def cmd_group(args) -> tuple[dict, int, str]:
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    out = {
        "group": f"Dic{n}",
        "order": dic_order(n),
        "abelianization": finite_abelian_label(abelianization(n)),
        "extension_ok": check_extension(n),
    }
    ok = out["extension_ok"] and out["order"] == 4 * n
    if args.check:
        checks = {
            "relations": relations_hold(n),
            "associative": is_associative(n),
            "quaternion_model": quaternion_model_agrees(n),
        }
        out["checks"] = checks
        ok = ok and all(checks.values())
    return out, OK if ok else FAILED, f"Dic{n}: order {out['order']}, H1 = {out['abelianization']}"


def cmd_lemma46(args) -> tuple[dict, int, str]:
    try:
        c = Fraction(args.c)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--c must be a rational, got {args.c!r}") from None
    try:
        bump = BumpFunction(c, args.profile)
        res = verify_no_rank2(args.grid, bump, args.margin)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"c": str(c), "profile": args.profile, "grid": args.grid, "margin": args.margin, **res.to_json()}
    if not res.ok:
        print(f"immcalc: rank-2 check failed near {res.worst} (min max|J| = {res.min_entry_max:.3e})", file=sys.stderr)
    return out, OK if res.ok else FAILED, f"lemma46: ok={res.ok} min max|J|={res.min_entry_max:.4g}"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="immcalc", description="Forms, Kirby moves and Smale invariants of immersions S^3 -> R^4.")
    p.add_argument("--summary", action="store_true", help="also print a one-line summary to stderr")
    p.add_argument("--indent", type=int, default=None, help="pretty-print JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", help="invariants of a 4-manifold expression")
    s.add_argument("expr")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("family", help="Smale invariant of f_n or g_n")
    s.add_argument("which", choices=("f", "g"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("verify", help="form-level check of a handle identity")
    s.add_argument("identity", help=", ".join(IDENTITIES))
    s.add_argument("--n", default="1", help="N or A..B")
    s.add_argument("--budget", default=None, help="depth=..,entry_factor=..,max_states=..")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("kirby", help="Kirby move scripts")
    ksub = s.add_subparsers(dest="kirby_command", required=True, parser_class=_Parser)
    k = ksub.add_parser("run", help="replay a move script")
    k.add_argument("path")
    k.set_defaults(func=cmd_kirby)

    s = sub.add_parser("group", help="finite groups")
    gsub = s.add_subparsers(dest="group_command", required=True, parser_class=_Parser)
    g = gsub.add_parser("dic", help="dicyclic group Dic_n")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--check", action="store_true", help="also run the exhaustive consistency checks")
    g.set_defaults(func=cmd_group)

    s = sub.add_parser("lemma46", help="check the perturbed z^2 model has no rank-2 points")
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--c", default="1/20")
    s.add_argument("--margin", type=float, default=1e-6)
    s.add_argument("--profile", choices=("exp", "exp2"), default="exp")
    s.set_defaults(func=cmd_lemma46)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, code, summary = args.func(args)
    except (UsageError, ParseError, KirbyError, GroupError) as exc:
        print(f"immcalc: error: {exc}", file=sys.stderr)
        return USAGE
    except LedgerError as exc:
        print(f"immcalc: internal inconsistency: {exc}", file=sys.stderr)
        return INTERNAL
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        print(f"immcalc: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL
    report = {"schema": SCHEMA, "command": argv, "exit_code": code, "result": payload}
    sys.stdout.write(json.dumps(report, indent=args.indent) + "\n")
    if args.summary:
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
