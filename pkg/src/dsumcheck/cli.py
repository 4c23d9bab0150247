"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage error (including an
id filter that matches nothing), 3 internal error (an entry was skipped
because a binding broke a kernel precondition, or an unexpected exception).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from typing import Optional, Sequence

from . import catalog, dsl, verify
from .bench import bench, rows_to_csv
from .exact import format_rational, rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "BATIR_SEED"

_STATUS_WORD = {verify.PASS: "PASS", verify.FAIL: "FAIL", verify.SKIPPED: "SKIP"}


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _parse_bind(text: str):
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        if "," in value:
            return name, tuple(rational(v) for v in value.split(","))
        return name, rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational in {text!r}: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsumcheck", description="Exact verification of double-sum identities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="show catalog entries")
    p.add_argument("--id", default="*", help="glob over identity ids")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="sweep entries and check both sides agree")
    p.add_argument("--id", default="*", help="glob over identity ids (default: all)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=0, help="worker processes (0: all CPUs)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--timings", action="store_true", help="record wall_time in the report")

    p = sub.add_parser("eval", help="evaluate a DSL expression")
    p.add_argument("expr")
    p.add_argument("--bind", action="append", type=_parse_bind, default=[],
                   help="name=p/q, or name=v0,v1,... for a sequence")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="time the double sum against the closed form")
    p.add_argument("--id", action="append", help="entry id (repeatable; default I-05)")
    p.add_argument("--n", dest="n_points", type=int, nargs="*", default=[500, 1000])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", help="write CSV here")

    p = sub.add_parser("export-catalog", help="write the catalog as JSON lines")
    p.add_argument("--id", default="*")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def summary_line(report: verify.VerificationReport, anchor: str) -> str:
    lo, hi = report.n_range
    word = _STATUS_WORD[report.status]
    return (f"{report.identity_id} {word} ({report.n_values} n-values, "
            f"{report.bindings_tested} bindings, n in [{lo},{hi}]) [{anchor}]")


def _cmd_list(args) -> int:
    records = verify.select(args.id)
    if args.format == "csv":
        raise UsageError("--format csv is only valid for bench")
    if args.format == "json":
        data = [{"id": r.id, "title": r.title, "anchor": r.anchor} for r in records]
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"{r.id}\t{r.title}\t[{r.anchor}]\n" for r in records), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.format == "csv":
        raise UsageError("--format csv is only valid for bench")
    if args.n_max is not None and args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    seed = _default_seed() if args.seed is None else args.seed
    records = verify.select(args.id)
    reports = verify.run_suite(args.id, args.n_max, seed, args.jobs, timings=args.timings)
    anchors = {r.id: r.anchor for r in records}
    payload = verify.reports_to_json(reports)
    if args.format == "json" and not args.out:
        sys.stdout.write(payload)
    else:
        for rep in reports:
            print(summary_line(rep, anchors[rep.identity_id]))
            cx = rep.counterexample
            if cx is not None:
                print(f"    counterexample: n={cx.n}, {cx.binding.describe()}: "
                      f"lhs={format_rational(cx.lhs_value)} rhs={format_rational(cx.rhs_value)}")
            if rep.reason:
                print(f"    reason: {rep.reason}")
        if args.out:
            _emit(payload, args.out)
    if any(r.status == verify.FAIL for r in reports):
        return EXIT_FAIL
    if any(r.status == verify.SKIPPED for r in reports):
        return EXIT_INTERNAL
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.format == "csv":
        raise UsageError("--format csv is only valid for bench")
    values, seqs = {}, {}
    for name, value in args.bind:
        (seqs if isinstance(value, tuple) else values)[name] = value
    try:
        result = dsl.evaluate(args.expr, values, seqs)
    except dsl.ParseError as exc:
        raise UsageError(f"parse error at {exc}") from None
    except dsl.EvalError as exc:
        raise UsageError(str(exc)) from None
    text = format_rational(result)
    if result.denominator == 1:
        text = str(result.numerator)
    if args.format == "json":
        text = json.dumps({"expr": args.expr, "value": format_rational(result)})
    _emit(text + "\n", args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    ids = args.id or ["I-05"]
    for ident in ids:
        try:
            catalog.get_record(ident)
        except KeyError:
            raise verify.UnknownIdentity(f"no identity {ident!r}") from None
    if args.reps < 5:
        raise UsageError("--reps must be at least 5")
    if any(n < 0 for n in args.n_points):
        raise UsageError("--n values must be non-negative")
    seed = _default_seed() if args.seed is None else args.seed
    rows = bench(ids, args.n_points, args.reps, seed)
    table = rows_to_csv(rows)
    if args.format == "csv" or args.out:
        _emit(table, args.out)
    if args.format == "json":
        data = [{"id": r.id, "n": r.n, "naive_ns": r.naive_ns, "closed_ns": r.closed_ns,
                 "speedup": r.speedup} for r in rows]
        print(json.dumps(data, indent=2))
    elif args.format == "text":
        for r in rows:
            print(f"{r.id} n={r.n}: naive {r.naive_ns / 1e6:.3f} ms, "
                  f"closed {r.closed_ns / 1e6:.4f} ms, speedup {r.speedup:.1f}x")
    return EXIT_OK


def _cmd_export(args) -> int:
    if args.format == "csv":
        raise UsageError("--format csv is only valid for bench")
    _emit(catalog.dump_catalog(verify.select(args.id)), args.out)
    return EXIT_OK


_COMMANDS = {
    "list": _cmd_list,
    "verify": _cmd_verify,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "export-catalog": _cmd_export,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dsumcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except verify.UnknownIdentity as exc:
        print(f"dsumcheck: UnknownIdentity: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
