"""``bench`` command line: seeded benchmark runs, summary tables and trajectory dumps.

Exit codes: 0 success, 1 bad arguments, 2 I/O failure, 3 one or more runs
ended in a line-search failure (the summary is still written).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchConfig, dump_trace, run_benchmark, write_summary
from .linesearch import LineSearchParams
from .problems import PROBLEM_NAMES
from .scaling import ALPHA_MAX, ALPHA_MIN
from .solvers import LINESEARCHES, METHODS

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FAILED_RUNS = 0, 1, 2, 3

# config-file keys and the argparse destinations they feed
CONFIG_KEYS = {
    "problem": "problem",
    "solver": "solver",
    "linesearch": "linesearch",
    "runs": "runs",
    "seed": "seed",
    "max_iter": "max_iter",
    "tol": "tol",
    "sigma": "sigma",
    "gamma": "gamma",
    "M": "M",
    "eta": "eta",
    "alpha_min": "alpha_min",
    "alpha_max": "alpha_max",
    "out": "out",
    "format": "format",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_numeric_options(p):
    p.add_argument("--max-iter", dest="max_iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--M", dest="M", type=int, default=10, help="max-type window length")
    p.add_argument("--eta", type=float, default=0.8, help="average-type weight")
    p.add_argument("--alpha-min", dest="alpha_min", type=float, default=ALPHA_MIN)
    p.add_argument("--alpha-max", dest="alpha_max", type=float, default=ALPHA_MAX)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bench", description="Multiobjective descent benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded benchmark cells and write a summary")
    run.add_argument("--problem", default="all", help="problem name or 'all'")
    run.add_argument("--solver", default="all", help="sdmo, bbmo, bbdmo or 'all'")
    run.add_argument("--linesearch", default="armijo", help="armijo, max, avg or 'all'")
    run.add_argument("--runs", type=int, default=200)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--out", default="summary.csv")
    run.add_argument("--format", choices=("csv", "md"), default="csv")
    run.add_argument("--timing", action="store_true", help="record wall time (makes output nondeterministic)")
    run.add_argument("--quiet", action="store_true")
    _add_numeric_options(run)

    trace = sub.add_parser("trace", help="write the trajectory of one run as CSV")
    trace.add_argument("--problem", required=True)
    trace.add_argument("--solver", default="bbdmo")
    trace.add_argument("--linesearch", default="armijo")
    trace.add_argument("--seed", type=int, default=42)
    trace.add_argument("--run-index", dest="run_index", type=int, default=0)
    trace.add_argument("--x0", help="comma-separated start point (overrides --seed)")
    trace.add_argument("--out", default="trace.csv")
    _add_numeric_options(trace)

    table = sub.add_parser("table", help="all problems x all solvers for one line search")
    table.add_argument("--linesearch", default="armijo")
    table.add_argument("--runs", type=int, default=200)
    table.add_argument("--seed", type=int, default=42)
    table.add_argument("--out", default="table.md")
    table.add_argument("--format", choices=("csv", "md"), default="md")
    table.add_argument("--timing", action="store_true", help="record wall time (makes output nondeterministic)")
    table.add_argument("--quiet", action="store_true")
    _add_numeric_options(table)
    parser.subcommands = {"run": run, "trace": trace, "table": table}
    return parser


def read_config(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[CONFIG_KEYS[key]] = value
    return values


def _choice(value: str, allowed, what: str) -> tuple[str, ...]:
    if value == "all":
        return tuple(allowed)
    if value not in allowed:
        raise UsageError(f"unknown {what} {value!r}; choose from {', '.join(allowed)} or all")
    return (value,)


def _bench_config(args, problems, solvers, linesearches, runs=1, timing=False) -> BenchConfig:
    params = LineSearchParams(sigma=args.sigma, gamma=args.gamma, M=args.M, eta=args.eta)
    return BenchConfig(
        problems=problems,
        solvers=solvers,
        linesearches=linesearches,
        runs=runs,
        seed=args.seed,
        max_iters=args.max_iter,
        tol=args.tol,
        params=params,
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max,
        timing=timing,
    )


def _progress(quiet):
    if quiet:
        return None

    def report(row):
        print(
            f"{row.linesearch:6s} {row.problem:10s} {row.solver:5s} "
            f"iter={row.avg_iter:.2f} feval={row.avg_feval:.2f} converged={row.converged_fraction:.3f}",
            file=sys.stderr,
        )

    return report


def _summarise(args, config) -> int:
    if args.format not in ("csv", "md"):
        raise UsageError(f"unknown format {args.format!r}; choose csv or md")
    summary = run_benchmark(config, progress=_progress(args.quiet))
    path = write_summary(summary, args.out, args.format)
    print(path)
    if summary.failures:
        print(f"{summary.failures} run(s) ended in a line-search failure", file=sys.stderr)
        return EXIT_FAILED_RUNS
    return EXIT_OK


def _cmd_run(args) -> int:
    problems = _choice(args.problem, PROBLEM_NAMES, "problem")
    solvers = _choice(args.solver, METHODS, "solver")
    linesearches = _choice(args.linesearch, LINESEARCHES, "line search")
    return _summarise(args, _bench_config(args, problems, solvers, linesearches, args.runs, args.timing))


def _cmd_table(args) -> int:
    linesearches = _choice(args.linesearch, LINESEARCHES, "line search")
    return _summarise(args, _bench_config(args, PROBLEM_NAMES, METHODS, linesearches, args.runs, args.timing))


def _cmd_trace(args) -> int:
    if "all" in (args.problem, args.solver, args.linesearch):
        raise UsageError("trace needs a single problem, solver and line search")
    problem = _choice(args.problem, PROBLEM_NAMES, "problem")[0]
    solver = _choice(args.solver, METHODS, "solver")[0]
    linesearch = _choice(args.linesearch, LINESEARCHES, "line search")[0]
    x0 = None
    if args.x0 is not None:
        try:
            x0 = [float(v) for v in args.x0.split(",")]
        except ValueError:
            raise UsageError(f"--x0 must be comma-separated numbers, got {args.x0!r}") from None
    config = _bench_config(args, (problem,), (solver,), (linesearch,))
    try:
        trace = dump_trace(problem, solver, linesearch, args.out, x0=x0, seed=args.seed,
                           run_index=args.run_index, config=config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(args.out)
    print(f"{trace.status} after {trace.iterations} iterations, {trace.fevals} fevals", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "trace": _cmd_trace, "table": _cmd_table}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            try:
                values = read_config(args.config)
            except OSError as exc:
                print(f"bench: cannot read config {args.config}: {exc.strerror or exc}", file=sys.stderr)
                return EXIT_IO
            # file values become defaults, so explicit flags still win
            subparser = parser.subcommands[args.command]
            known = {a.dest for a in subparser._actions}
            subparser.set_defaults(**{k: v for k, v in values.items() if k in known})
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return int(exc.code or 0)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
