"""Command-line interface.

Exit codes: 0 success, 1 verification mismatch or internal arithmetic failure,
2 usage or precondition error, 3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import mpmath

from hypercat import asymptotics, decomp, exact, oeis, trees
from hypercat.core import DEFAULT_BUDGET, BudgetExceeded, IntegralityViolation, Params

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

# test hook: "series:<n>" adds one to the series coefficient at n inside `verify`
FAULT_ENV = "HYPERCAT_TEST_FAULT"

METHODS = ("series", "closed", "special", "brute", "trees")


class UsageError(Exception):
    pass


def _params(args) -> Params:
    try:
        return Params(args.d, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _real(x, digits: int = 20) -> str:
    return mpmath.nstr(x, digits)


def _terms(params: Params, n_max: int, method: str, budget: int) -> list[int]:
    if method == "series":
        return exact.series_table(params, n_max).terms()
    if method == "closed":
        return [exact.closed_term(params, n) for n in range(1, n_max + 1)]
    if method == "special":
        return [exact.closed_special(params, n) for n in range(1, n_max + 1)]
    if method == "brute":
        return [sum(1 for _ in decomp.enumerate_decompositions(params, n, budget)) if params.is_admissible(n) else 0
                for n in range(1, n_max + 1)]
    if method == "trees":
        return [trees.count_maximal(params, n, budget).maximal_trees if params.is_admissible(n) else 0
                for n in range(1, n_max + 1)]
    raise UsageError(f"unknown method {method}")


def cmd_terms(args, out) -> int:
    params = _params(args)
    try:
        values = _terms(params, args.n_max, args.method, args.budget)
    except exact.UnsupportedPair as exc:
        raise UsageError(str(exc)) from None
    records = [{"d": params.d, "p": params.p, "n": n, "value": str(v), "method": args.method}
               for n, v in enumerate(values, start=1)]
    if args.format == "csv":
        out.write("d,p,n,value,method\n")
        for r in records:
            out.write(f"{r['d']},{r['p']},{r['n']},{r['value']},{r['method']}\n")
    else:
        json.dump(records, out, indent=1)
        out.write("\n")
    return EXIT_OK


def _fault():
    value = os.environ.get(FAULT_ENV, "")
    if value.startswith("series:"):
        return int(value.split(":", 1)[1])
    return None


def cmd_verify(args, out) -> int:
    params = _params(args)
    n_max = args.n_max
    checks = []
    mismatches = []

    def record(name, n, values: dict):
        ok = len(set(values.values())) == 1
        checks.append({"check": name, "n": n, "ok": ok})
        if not ok:
            mismatches.append({"check": name, "n": n, **{k: str(v) for k, v in values.items()}})

    series = list(exact.series_table(params, n_max).coeffs)
    fault = _fault()
    if fault is not None and 1 <= fault <= n_max:
        series[fault] += 1
    special = (params.d, params.p) in exact.SPECIAL_PAIRS
    for n in range(1, n_max + 1):
        values = {"closed": exact.closed_term(params, n), "series": series[n]}
        if special:
            values["special"] = exact.closed_special(params, n)
        record("formulas", n, values)

    brute_hi = min(n_max, args.brute_n_max)
    for n in range(1, brute_hi + 1):
        if not params.is_admissible(n) or trees.tree_count(params, n) > args.budget:
            continue
        try:
            brute = sum(1 for _ in decomp.enumerate_decompositions(params, n, args.budget))
            report = trees.count_maximal(params, n, args.budget)
        except BudgetExceeded:
            break
        record("exhaustive", n, {"closed": exact.closed_term(params, n), "brute": brute,
                                 "trees": report.maximal_trees, "classes": report.class_count})

    sequence = None
    if args.oeis or args.bfile:
        ref = _sequence_ref(args, params)
        if args.bfile:
            bfile = oeis.parse_bfile(Path(args.bfile).read_text())
        else:
            cache = Path(args.cache_dir) if args.cache_dir else oeis.default_cache_dir()
            try:
                bfile = oeis.fetch_bfile(ref, cache, offline=not args.online, fallback_dirs=[oeis.fixture_dir()])
            except oeis.NotCachedOffline as exc:
                raise UsageError(str(exc)) from None
        sequence = oeis.verify_sequence(ref, bfile, args.max_terms)
        if sequence["mismatches"] or not sequence["index_map_ok"]:
            mismatches.append({"check": "oeis", "id": ref.id, "mismatches": sequence["mismatches"],
                               "index_map_ok": sequence["index_map_ok"]})

    passed = not mismatches
    report = {"d": params.d, "p": params.p, "n_max": n_max, "passed": passed,
              "checked": len(checks), "mismatches": mismatches}
    if sequence is not None:
        report["oeis"] = sequence
    json.dump(report, out, indent=1)
    out.write("\n")
    return EXIT_OK if passed else EXIT_MISMATCH


def _sequence_ref(args, params: Params) -> oeis.SequenceRef:
    if args.oeis:
        ref = oeis.REGISTRY.get(args.oeis)
        if ref is None:
            ref = oeis.SequenceRef(args.oeis, params, nonzero_only=args.nonzero_only)
        elif ref.params != params:
            raise UsageError(f"{args.oeis} is registered for (d, p) = ({ref.params.d}, {ref.params.p})")
        return ref
    return oeis.SequenceRef("LOCALFILE", params, local=True, nonzero_only=args.nonzero_only,
                            first_index=args.first_index)


def cmd_asym(args, out) -> int:
    params = _params(args)
    profile = asymptotics.saddle(params, args.precision)
    estimates = []
    for n in args.n or []:
        est = asymptotics.estimate_term(profile, n)
        row = {"n": n, "logA": _real(est.log_value), "A": _real(est.value)}
        if n <= args.exact_max:
            row["ratio_to_exact"] = _real(asymptotics.ratio_to_estimate(exact.closed_term(params, n), est))
        estimates.append(row)
    payload = {
        "d": params.d, "p": params.p,
        "s": _real(profile.s), "r": _real(profile.r), "q_s": _real(profile.q_s),
        "qpp_s": _real(profile.qpp_s), "prefactor": _real(profile.prefactor),
        "growth": asymptotics.fixed(profile.growth, 6),
        "estimates": estimates,
    }
    json.dump(payload, out, indent=1)
    out.write("\n")
    return EXIT_OK


def cmd_enumerate(args, out) -> int:
    params = _params(args)
    if args.render and (args.kind != "decomps" or params.d > 2):
        raise decomp.UnsupportedDimension("--render needs decomps with d <= 2")
    emit = Path(args.emit) if args.emit else None
    render = Path(args.render) if args.render else None
    for directory in (emit, render):
        if directory is not None:
            directory.mkdir(parents=True, exist_ok=True)
    summary = {"kind": args.kind, "d": params.d, "p": params.p, "n": args.n}
    if args.kind == "decomps":
        count = 0
        for i, dec in enumerate(decomp.enumerate_decompositions(params, args.n, args.budget), start=1):
            count = i
            if emit:
                (emit / f"{i}.txt").write_text(decomp.dumps(dec))
            if render:
                (render / f"{i}.svg").write_text(decomp.render_svg(dec))
        summary["count"] = count
    else:
        total = maximal = 0
        index_lines = []
        for i, t in enumerate(trees.enumerate_trees(params, args.n, args.budget), start=1):
            total = i
            flag = trees.is_interchange_maximal(t)
            maximal += flag
            if emit:
                text = trees.format_tree(t)
                (emit / f"{i}.txt").write_text(text + "\n")
                index_lines.append(f"{i}\t{int(flag)}\t{text}\n")
        if emit:
            (emit / "index.tsv").write_text("".join(index_lines))
        summary["count"] = total
        summary["maximal"] = maximal
    json.dump(summary, out)
    out.write("\n")
    return EXIT_OK


def cmd_growth(args, out) -> int:
    if args.d_max < 1 or args.p_max < 2:
        raise UsageError("need --d-max >= 1 and --p-max >= 2")
    rows = asymptotics.growth_table(args.d_max, args.p_max, args.precision)
    out.write(asymptotics.growth_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def dp(p):
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--p", type=int, required=True)

    def budget(p):
        p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)

    p = sub.add_parser("terms", help="print C_{d,p}(1..n-max)")
    dp(p)
    p.add_argument("--n-max", type=_positive, required=True)
    p.add_argument("--method", choices=METHODS, default="series")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    budget(p)
    p.set_defaults(func=cmd_terms)

    p = sub.add_parser("verify", help="cross-check every method, optionally against a b-file")
    dp(p)
    p.add_argument("--n-max", type=_positive, required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--oeis", metavar="ID")
    src.add_argument("--bfile", metavar="PATH")
    p.add_argument("--nonzero-only", action="store_true", help="b-file lists only nonzero terms")
    p.add_argument("--first-index", type=int, default=1, help="first index of a --bfile")
    p.add_argument("--max-terms", type=_positive, default=None)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--online", action="store_true", help="allow downloading missing b-files")
    p.add_argument("--brute-n-max", type=int, default=6, help="largest n for exhaustive checks")
    budget(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asym", help="saddle point, growth rate and term estimates")
    dp(p)
    p.add_argument("--n", type=_positive, nargs="*")
    p.add_argument("--precision", type=mpmath.mpf, default=asymptotics.DEFAULT_PRECISION)
    p.add_argument("--exact-max", type=int, default=5000, help="largest n compared with the exact term")
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("enumerate", help="list every decomposition or labelled tree")
    p.add_argument("kind", choices=("decomps", "trees"))
    dp(p)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--render", metavar="DIR")
    p.add_argument("--emit", metavar="DIR")
    budget(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("growth", help="CSV table of growth rates")
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--precision", type=mpmath.mpf, default=asymptotics.DEFAULT_PRECISION)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"hypercat: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IntegralityViolation as exc:
        print(f"hypercat: internal error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UsageError, ValueError) as exc:
        print(f"hypercat: {exc}", file=sys.stderr)
        return EXIT_USAGE
