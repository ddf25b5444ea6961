"""Command-line front end.

Subcommands: ``lgg``, ``complete``, ``optimal``, ``fragment``, ``det`` and
``bench``.  Problems are read from a file argument or stdin; ``--json``
switches to a machine-readable document.  Exit codes: 0 success, 1 parse or
type error, 2 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .equational import complete_set, minimize
from .fragments import (
    determinate_set,
    is_k_determined,
    is_kl_distinct,
    is_total_k_determined,
    is_total_kl_distinct,
    render_detset,
)
from .optimal import Strategy, optimal_generalize
from .syntactic import GeneralizationResult, syntactic_lgg
from .syntax import ParseError, Problem, format_subst, format_term, parse_problem
from .terms import BudgetExceeded, apply_subst, is_pattern

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_BUDGET = 2


def _read_problem(path: str) -> Problem:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parse_problem(text)


def _verify(problem: Problem, results: list[GeneralizationResult]) -> None:
    sig = problem.sig
    for res in results:
        if not is_pattern(res.term):
            raise AssertionError(f"result is not a pattern: {format_term(res.term, sig)}")
        left = apply_subst(res.term, res.theta_left, sig)
        right = apply_subst(res.term, res.theta_right, sig)
        if left != problem.left or right != problem.right:
            raise AssertionError(
                f"witness check failed for {format_term(res.term, sig)}"
            )


def _emit(
    problem: Problem,
    results: list[GeneralizationResult],
    args,
    stats: dict,
    truncated: bool = False,
) -> None:
    sig = problem.sig
    raw = args.raw
    if args.json:
        doc = {
            "generalizations": [
                {
                    "term": format_term(r.term, sig, raw=raw),
                    "theta_left": {
                        k: format_term(v, sig, raw=raw) for k, v in sorted(r.theta_left.items())
                    },
                    "theta_right": {
                        k: format_term(v, sig, raw=raw) for k, v in sorted(r.theta_right.items())
                    },
                }
                for r in results
            ],
            "stats": stats,
        }
        if truncated:
            doc["truncated"] = True
        print(json.dumps(doc, sort_keys=True))
        return
    for r in results:
        print(format_term(r.term, sig, raw=raw))
        if args.show_witnesses:
            print("  left:  " + format_subst(r.theta_left, raw=raw))
            print("  right: " + format_subst(r.theta_right, raw=raw))
    if truncated:
        print("(truncated: branch budget exceeded)", file=sys.stderr)


def _cmd_lgg(args) -> int:
    problem = _read_problem(args.file)
    result = syntactic_lgg(problem.left, problem.right, problem.sig)
    if args.verify:
        _verify(problem, [result])
    args.show_witnesses = True if not args.json else args.show_witnesses
    _emit(problem, [result], args, {"states_explored": 1, "branches": 0})
    return EXIT_OK


def _cmd_complete(args) -> int:
    problem = _read_problem(args.file)
    outcome = complete_set(
        problem.left,
        problem.right,
        problem.sig,
        max_states=args.max_branches,
        parallel=args.parallel,
    )
    kept_terms = minimize([r.term for r in outcome.results], problem.sig)
    keep = set(kept_terms)
    results = [r for r in outcome.results if r.term in keep]
    if args.verify:
        _verify(problem, results)
    stats = {
        "states_explored": outcome.stats.states_explored,
        "branches": outcome.stats.branches,
    }
    _emit(problem, results, args, stats, truncated=outcome.truncated)
    return EXIT_BUDGET if outcome.truncated else EXIT_OK


def _cmd_optimal(args) -> int:
    problem = _read_problem(args.file)
    strategy = Strategy(rigidity=args.rigidity, k=args.k, l=args.l)
    result = optimal_generalize(problem.left, problem.right, problem.sig, strategy)
    if args.verify:
        _verify(problem, [result])
    _emit(problem, [result], args, {"states_explored": 1, "branches": 0})
    return EXIT_OK


def _cmd_fragment(args) -> int:
    problem = _read_problem(args.file)
    sig, t, s = problem.sig, problem.left, problem.right
    k, l = args.k, args.l
    verdicts = {}
    if args.mode in ("a", "all"):
        verdicts["k_determined"] = is_k_determined(t, s, sig, k)
        verdicts["total_k_determined"] = is_total_k_determined(t, s, sig, k)
    if args.mode in ("c", "all"):
        verdicts["strict_k_determined"] = is_k_determined(t, s, sig, k, strict=True)
        verdicts["total_strict_k_determined"] = is_total_k_determined(t, s, sig, k, strict=True)
    if args.mode in ("ac", "all"):
        verdicts["kl_distinct"] = is_kl_distinct(t, s, sig, k, l)
        verdicts["total_kl_distinct"] = is_total_kl_distinct(t, s, sig, k, l)
    if args.json:
        print(json.dumps({"k": k, "l": l, **verdicts}, sort_keys=True))
    else:
        for name, value in verdicts.items():
            print(f"{name.replace('_', '-')}: {'yes' if value else 'no'}")
    return EXIT_OK


def _cmd_det(args) -> int:
    w1 = tuple(x.strip() for x in args.seq1.split(",") if x.strip())
    w2 = tuple(x.strip() for x in args.seq2.split(",") if x.strip())
    ds = determinate_set(args.k, w1, w2, strict=args.strict)
    if args.json:
        print(json.dumps({"det": render_detset(ds)}, sort_keys=True, ensure_ascii=False))
    else:
        print(render_detset(ds))
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .bench import run_bench

    report = run_bench(
        families=args.families.split(",") if args.families else None,
        out_dir=args.out,
        runs=args.runs,
        check=args.check,
    )
    return EXIT_OK if report.ok else EXIT_BUDGET


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hogen",
        description="Higher-order pattern generalization modulo A, C, and AC symbols",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_branches=False):
        p.add_argument("file", nargs="?", default="-", help="problem file (default: stdin)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--show-witnesses", action="store_true")
        p.add_argument("--verify", action="store_true", help="re-check witnesses before printing")
        p.add_argument("--raw", action="store_true", help="annotate binders with types")
        p.add_argument("--seed", type=int, default=0, help="reserved; all algorithms are deterministic")

    p = sub.add_parser("lgg", help="syntactic least general pattern generalization")
    common(p)
    p.set_defaults(fn=_cmd_lgg)

    p = sub.add_parser("complete", help="minimized complete set of generalizations")
    common(p)
    p.add_argument("--max-branches", type=int, default=None, help="cap on explored states")
    p.add_argument("--parallel", type=int, default=1, help="worker threads for branch exploration")
    p.set_defaults(fn=_cmd_complete)

    p = sub.add_parser("optimal", help="one greedy refined generalization")
    common(p)
    p.add_argument(
        "--rigidity",
        choices=["auto", "a", "a-full", "c", "ac"],
        default="auto",
        help="rigidity function steering the choice function",
    )
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.set_defaults(fn=_cmd_optimal)

    p = sub.add_parser("fragment", help="fragment membership verdicts")
    common(p)
    p.add_argument("--mode", choices=["a", "c", "ac", "all"], default="all")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.set_defaults(fn=_cmd_fragment)

    p = sub.add_parser("det", help="determinate set of two symbol sequences")
    p.add_argument("k", type=int)
    p.add_argument("seq1", help="comma-separated symbols")
    p.add_argument("seq2", help="comma-separated symbols")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_det)

    p = sub.add_parser("bench", help="empirical scaling report (CSV + figure)")
    p.add_argument("--families", default=None, help="comma-separated family names")
    p.add_argument("--out", default="bench_out", help="output directory")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--check", action="store_true", help="exit non-zero when a ratio bound fails")
    p.set_defaults(fn=_cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
