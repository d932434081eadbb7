"""Command-line front end: ``andorlab <command> [flags]``.

Tables go to standard output (CSV by default, or JSON with ``--format
json``); the run metadata (inputs, seed, generator, version) goes to
standard error as a ``# meta`` line in CSV mode and into the ``meta`` object
in JSON mode.  Exit codes: 0 success, 1 verification failure, 2 usage error,
3 budget refusal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .boolfn import SupportTooLarge, complexity, essential_count
from .combinatorics import ModelTag, count_trees, rat_asymptotic, rat_exact, threshold_M
from .trees import DEFAULT_BUDGET, BudgetExceeded, format_tree
from .truthtable import TruthTable

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[int]:
    """``"7"``, ``"50,100,200"`` or ``"2..6"`` (inclusive)."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad integer grid {text!r}") from None
    if not out or min(out) < 1:
        raise UsageError("grid values must be positive integers")
    return out


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on enumerated objects (default 1e8)")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--seed", type=_seed, default=0)

    def model_arg(p, required=True):
        p.add_argument("--model", choices=["G", "E"], required=required, default=None if required else "G")

    parser = argparse.ArgumentParser(prog="andorlab", description="Random And/Or tree laboratory")
    parser.add_argument("--version", action="version", version=f"andorlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="number of trees (G) or classes (E)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    model_arg(p)

    p = sub.add_parser("enumerate", parents=[common], help="list every tree (G) or class key (E)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    model_arg(p)

    p = sub.add_parser("sample", parents=[common], help="draw samples, or estimate an event with --event")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    model_arg(p)
    p.add_argument("--samples", type=_positive, default=1)
    p.add_argument("--event", help="always, tautology, simple_tautology, contradiction, satisfiable, computes:<table>")

    p = sub.add_parser("dist", parents=[common], help="exact distribution, or a normalised trend with --table")
    p.add_argument("--n", required=True, help="size, or grid like 2..6 / 50,100 with --table")
    p.add_argument("--k", type=_positive)
    p.add_argument("--k-rule", default=None, help="identity | sqrt | log | const:<c>")
    model_arg(p)
    p.add_argument("--table", help="target function, e.g. m=2:0x8, for the trend table")
    p.add_argument("--mode", choices=["auto", "exact", "monte_carlo"], default="auto")
    p.add_argument("--samples", type=_positive, default=100_000)
    p.add_argument("--next-k", action="store_true", help="normalise with k_(n+1) instead of k_n")

    p = sub.add_parser("tautology", parents=[common], help="tautology census or ratio report")
    p.add_argument("--n", required=True, help="size or grid")
    p.add_argument("--k", type=_positive)
    p.add_argument("--k-rule", default=None)
    model_arg(p)
    p.add_argument("--census", action="store_true", help="exact census rows instead of the ratio report")
    p.add_argument("--mode", choices=["auto", "exact", "monte_carlo"], default="auto")
    p.add_argument("--samples", type=_positive, default=100_000)

    p = sub.add_parser("complexity", parents=[common], help="L, E and R of a function")
    p.add_argument("--table", required=True, help="truth table, e.g. m=2:0x6")

    p = sub.add_parser("thresholds", parents=[common], help="M_n, n/ln n and rat over a grid")
    p.add_argument("--n", default="10,100,1000,10000", help="grid")
    p.add_argument("--k", type=_positive)
    p.add_argument("--k-rule", default=None)
    model_arg(p, required=False)
    p.add_argument("--exact-limit", type=_positive, default=5000,
                   help="largest n for the exact model E rat (Stirling rows grow quadratically)")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--n-max", type=_positive)
    p.add_argument("--samples", type=_positive, default=100_000)
    return parser


# --- output helpers ---------------------------------------------------------


def _meta(args) -> dict:
    from .sampling import GENERATOR

    params = {k: v for k, v in vars(args).items() if k not in ("format",)}
    return {"seed": args.seed, "generator": GENERATOR, "version": __version__, "params": params}


def _emit(args, rows: list[dict], columns: list[str], out, err) -> None:
    from .distribution import to_csv, to_json

    meta = _meta(args)
    if args.format == "json":
        out.write(to_json(rows, meta) + "\n")
    else:
        err.write("# meta " + json.dumps(meta, default=str) + "\n")
        out.write(to_csv(rows, columns))


def _k_values(args, grid: list[int]) -> list[int]:
    from .distribution import k_rule

    if args.k is not None and args.k_rule is not None:
        raise UsageError("give --k or --k-rule, not both")
    if args.k is not None:
        return [args.k] * len(grid)
    rule = k_rule(args.k_rule or "identity")
    return [rule(n) for n in grid]


def _rule_arg(args):
    if args.k is not None and args.k_rule is not None:
        raise UsageError("give --k or --k-rule, not both")
    return f"const:{args.k}" if args.k is not None else (args.k_rule or "identity")


# --- commands ---------------------------------------------------------------


def cmd_count(args, out, err) -> int:
    value = count_trees(args.n, args.k, args.model)
    if args.format == "json":
        _emit(args, [{"n": args.n, "k": args.k, "model": args.model, "count": value}], [], out, err)
    else:
        err.write("# meta " + json.dumps(_meta(args), default=str) + "\n")
        out.write(f"{value}\n")
    return EXIT_OK


def cmd_enumerate(args, out, err) -> int:
    from .quotient import enumerate_classes
    from .trees import enumerate_trees_G

    if args.model == "G":
        stream = (format_tree(t) for t in enumerate_trees_G(args.n, args.k, args.budget))
        column = "tree"
    else:
        stream = (str(key) for key in enumerate_classes(args.n, args.k, args.budget))
        column = "class_key"
    _emit(args, [{column: s} for s in stream], [column], out, err)
    return EXIT_OK


def cmd_sample(args, out, err) -> int:
    from .sampling import REPORT_COLUMNS, estimate, sample_batch, shard_plan, SHARD_SIZE

    if args.event:
        report = estimate(args.event, args.n, args.k, args.model, args.samples, args.seed, args.threads)
        row = report.row()
        row["generator"] = report.generator
        _emit(args, [row], REPORT_COLUMNS, out, err)
        return EXIT_OK
    rows = []
    for shard, size in enumerate(shard_plan(args.samples)):
        batch = sample_batch(args.n, args.k, args.model, size, args.seed, shard)
        for b in range(batch.size):
            obj = batch.tree(b) if args.model == "G" else batch.key(b)
            rows.append({"sample": shard * SHARD_SIZE + b, "object": format_tree(obj) if args.model == "G" else str(obj)})
    _emit(args, rows, ["sample", "object"], out, err)
    return EXIT_OK


def cmd_dist(args, out, err) -> int:
    from .distribution import DISTRIBUTION_COLUMNS, TREND_COLUMNS, distribution_rows, exact_distribution, theorem_trend

    grid = parse_grid(args.n)
    if args.table:
        rows = theorem_trend(
            TruthTable.parse(args.table), args.model, grid, _rule_arg(args), args.mode,
            args.samples, args.seed, args.threads, next_k=args.next_k,
        )
        _emit(args, rows, TREND_COLUMNS, out, err)
        return EXIT_OK
    if len(grid) != 1 or args.k is None:
        raise UsageError("exact distribution needs a single --n and --k")
    dist = exact_distribution(grid[0], args.k, args.model, args.budget)
    _emit(args, distribution_rows(dist), DISTRIBUTION_COLUMNS, out, err)
    return EXIT_OK


def cmd_tautology(args, out, err) -> int:
    from .distribution import TAUTOLOGY_COLUMNS, tautology_ratio_report
    from .patterns import CENSUS_COLUMNS, tautology_census

    grid = parse_grid(args.n)
    if args.census:
        rows = [tautology_census(n, k, args.model, args.budget).csv_row() for n, k in zip(grid, _k_values(args, grid))]
        _emit(args, rows, CENSUS_COLUMNS, out, err)
        return EXIT_OK
    rows = tautology_ratio_report(grid, _rule_arg(args), args.model, args.mode, args.samples, args.seed, args.threads)
    _emit(args, rows, TAUTOLOGY_COLUMNS, out, err)
    return EXIT_OK


def cmd_complexity(args, out, err) -> int:
    try:
        f = TruthTable.parse(args.table)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    l, e = complexity(f), essential_count(f)
    if args.format == "json":
        _emit(args, [{"table": str(f), "L": l, "E": e, "R": l - e}], [], out, err)
    else:
        err.write("# meta " + json.dumps(_meta(args), default=str) + "\n")
        out.write(f"L={l} E={e} R={l - e}\n")
    return EXIT_OK


def cmd_thresholds(args, out, err) -> int:
    grid = parse_grid(args.n)
    rows = []
    for n, k in zip(grid, _k_values(args, grid)):
        m = threshold_M(n)
        row = {"n": n, "M_n": m, "n_over_ln_n": f"{n / math.log(n):.10g}" if n > 1 else "", "k": k, "model": args.model}
        if n >= 2:
            skip = ModelTag.parse(args.model) is ModelTag.E and n > args.exact_limit
            exact = "" if skip else f"{float(rat_exact(n, k, args.model)):.10g}"
            asym = rat_asymptotic(n, k, args.model)
            row.update(rat_exact=exact, rat_asymptotic=f"{float(asym):.10g}",
                       regime="k<=M" if k <= m else "k>M")
        rows.append(row)
    _emit(args, rows, ["n", "M_n", "n_over_ln_n", "k", "model", "rat_exact", "rat_asymptotic", "regime"], out, err)
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    from .verify import CHECK_COLUMNS, run_suite

    checks = run_suite(args.suite, args.n_max, samples=args.samples, seed=args.seed, threads=args.threads)
    _emit(args, [c.row() for c in checks], CHECK_COLUMNS, out, err)
    failed = [c for c in checks if not c.ok]
    for c in failed:
        err.write(f"FAIL {c.suite}: {c.check} ({c.detail})\n")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "dist": cmd_dist,
    "tautology": cmd_tautology,
    "complexity": cmd_complexity,
    "thresholds": cmd_thresholds,
    "verify": cmd_verify,
}


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "model", None) is not None:
        args.model = ModelTag.parse(args.model).value
    try:
        return COMMANDS[args.command](args, out, err)
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc.count} {exc.what} > budget {exc.budget}\n")
        return EXIT_BUDGET
    except (UsageError, SupportTooLarge, ValueError) as exc:
        err.write(f"usage error: {exc}\n")
        parser.print_usage(err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
