"""Seeded benchmark harness: repeated runs per (problem, solver, line search) cell.

Each run draws its start from a seed that depends only on the master seed,
the problem name and the run index, so all solvers and line searches see the
same starting points.
"""
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .linesearch import LineSearchParams
from .problems import PROBLEM_NAMES, make_problem, sample_initial_point
from .scaling import ALPHA_MAX, ALPHA_MIN
from .solvers import LINESEARCHES, METHODS, SolverConfig, SolveTrace, solve

SUMMARY_COLUMNS = (
    "problem",
    "solver",
    "linesearch",
    "runs",
    "avg_iter",
    "avg_feval",
    "avg_time_ms",
    "avg_stepsize",
    "converged_fraction",
)

_LABELS = {"sdmo": "SDMO", "bbmo": "BBMO", "bbdmo": "BBDMO"}


def derive_run_seed(master_seed: int, problem: str, run_index: int) -> int:
    """64-bit seed mixed from (master seed, problem name, run index) with BLAKE2b."""
    key = f"{int(master_seed)}\x1f{problem}\x1f{int(run_index)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def initial_point(problem, master_seed: int, run_index: int) -> np.ndarray:
    rng = np.random.default_rng(derive_run_seed(master_seed, problem.name, run_index))
    return sample_initial_point(problem, rng)


@dataclass(frozen=True)
class BenchConfig:
    problems: tuple[str, ...] = PROBLEM_NAMES
    solvers: tuple[str, ...] = METHODS
    linesearches: tuple[str, ...] = ("armijo",)
    runs: int = 200
    seed: int = 42
    max_iters: int = 500
    tol: float = 1e-4
    params: LineSearchParams = field(default_factory=LineSearchParams)
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX
    # wall time is nondeterministic; leave it out unless asked so output is reproducible
    timing: bool = False

    def __post_init__(self):
        for name in self.problems:
            if name not in PROBLEM_NAMES:
                raise ValueError(f"unknown problem {name!r}")
        for name in self.solvers:
            if name not in METHODS:
                raise ValueError(f"unknown solver {name!r}")
        for name in self.linesearches:
            if name not in LINESEARCHES:
                raise ValueError(f"unknown line search {name!r}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")

    def solver_config(self, solver: str, linesearch: str) -> SolverConfig:
        return SolverConfig(
            method=solver,
            linesearch=linesearch,
            tol=self.tol,
            max_iters=self.max_iters,
            params=self.params,
            alpha_min=self.alpha_min,
            alpha_max=self.alpha_max,
        )


@dataclass
class RunRecord:
    problem: str
    solver: str
    linesearch: str
    run_index: int
    seed: int
    iterations: int
    fevals: int
    time_ms: float
    mean_beta: float
    status: str
    x: np.ndarray
    F: np.ndarray

    @classmethod
    def from_trace(cls, trace: SolveTrace, run_index: int, seed: int) -> "RunRecord":
        return cls(
            problem=trace.problem,
            solver=trace.method,
            linesearch=trace.linesearch,
            run_index=run_index,
            seed=seed,
            iterations=trace.iterations,
            fevals=trace.fevals,
            time_ms=1e3 * trace.wall_time,
            mean_beta=trace.mean_beta,
            status=trace.status,
            x=trace.x,
            F=trace.F,
        )


@dataclass
class SummaryRow:
    problem: str
    solver: str
    linesearch: str
    runs: int
    avg_iter: float
    avg_feval: float
    avg_time_ms: float
    avg_stepsize: float
    converged_fraction: float
    # not part of the CSV; a round trip cannot recover it
    failures: int = field(default=0, compare=False)

    def __eq__(self, other):
        if not isinstance(other, SummaryRow):
            return NotImplemented
        return all(_same(getattr(self, c), getattr(other, c)) for c in SUMMARY_COLUMNS)


def _same(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


@dataclass
class BenchmarkSummary:
    rows: list[SummaryRow]
    records: list[RunRecord] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r.failures for r in self.rows)

    def row(self, problem: str, solver: str, linesearch: str = "armijo") -> SummaryRow:
        for r in self.rows:
            if (r.problem, r.solver, r.linesearch) == (problem, solver, linesearch):
                return r
        raise KeyError((problem, solver, linesearch))

    def cell_records(self, problem: str, solver: str, linesearch: str = "armijo") -> list[RunRecord]:
        return [r for r in self.records if (r.problem, r.solver, r.linesearch) == (problem, solver, linesearch)]


def summarize(records: list[RunRecord], timing: bool = True) -> SummaryRow:
    """Arithmetic means over one cell's runs.

    Runs that stopped at x0 have no accepted stepsize and are left out of
    ``avg_stepsize`` (nan if no run took a step).
    """
    if not records:
        raise ValueError("cannot summarise an empty cell")
    first = records[0]
    betas = [r.mean_beta for r in records if not math.isnan(r.mean_beta)]
    return SummaryRow(
        problem=first.problem,
        solver=first.solver,
        linesearch=first.linesearch,
        runs=len(records),
        avg_iter=float(np.mean([r.iterations for r in records])),
        avg_feval=float(np.mean([r.fevals for r in records])),
        avg_time_ms=float(np.mean([r.time_ms for r in records])) if timing else math.nan,
        avg_stepsize=float(np.mean(betas)) if betas else math.nan,
        converged_fraction=sum(r.status == "critical" for r in records) / len(records),
        failures=sum(r.status == "linesearch_failure" for r in records),
    )


def run_cell(problem_name: str, solver: str, linesearch: str, config: BenchConfig) -> list[RunRecord]:
    problem = make_problem(problem_name)
    solver_config = config.solver_config(solver, linesearch)
    records = []
    for run_index in range(config.runs):
        seed = derive_run_seed(config.seed, problem_name, run_index)
        x0 = sample_initial_point(problem, np.random.default_rng(seed))
        trace = solve(problem, x0, solver_config)
        records.append(RunRecord.from_trace(trace, run_index, seed))
    records.sort(key=lambda r: r.run_index)
    return records


def run_benchmark(config: BenchConfig, progress=None) -> BenchmarkSummary:
    """Run every (problem, solver, line search) cell in ``config``.

    ``progress``, if given, is called with each finished SummaryRow.
    """
    rows, records = [], []
    for linesearch in config.linesearches:
        for problem_name in config.problems:
            for solver in config.solvers:
                cell = run_cell(problem_name, solver, linesearch, config)
                row = summarize(cell, timing=config.timing)
                rows.append(row)
                records.extend(cell)
                if progress is not None:
                    progress(row)
    return BenchmarkSummary(rows, records)


def _fmt_full(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_csv(summary: BenchmarkSummary) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in summary.rows:
        lines.append(",".join(_fmt_full(getattr(row, c)) for c in SUMMARY_COLUMNS))
    return "\n".join(lines) + "\n"


def _fmt2(value: float) -> str:
    return "-" if math.isnan(value) else f"{value:.2f}"


def summary_markdown(summary: BenchmarkSummary) -> str:
    """One table per line search: a row per problem, a column group per solver."""
    out = []
    linesearches = list(dict.fromkeys(r.linesearch for r in summary.rows))
    for linesearch in linesearches:
        rows = [r for r in summary.rows if r.linesearch == linesearch]
        solvers = list(dict.fromkeys(r.solver for r in rows))
        problems = list(dict.fromkeys(r.problem for r in rows))
        by_key = {(r.problem, r.solver): r for r in rows}
        runs = sorted({r.runs for r in rows})
        out.append(f"### Line search: {linesearch} ({'/'.join(map(str, runs))} runs per cell)")
        out.append("")
        header = ["Problem"]
        for s in solvers:
            label = _LABELS.get(s, s)
            header += [f"{label} iter", f"{label} feval", f"{label} time (ms)", f"{label} stepsize"]
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|")
        notes = []
        for p in problems:
            cells = [p]
            for s in solvers:
                r = by_key.get((p, s))
                if r is None:
                    cells += ["-"] * 4
                    continue
                mark = ""
                if r.failures:
                    notes.append(f"{p} / {_LABELS.get(s, s)}: {r.failures} of {r.runs} runs ended in a line-search failure")
                    mark = f"[^{len(notes)}]"
                cells += [_fmt2(r.avg_iter) + mark, _fmt2(r.avg_feval), _fmt2(r.avg_time_ms), _fmt2(r.avg_stepsize)]
            out.append("| " + " | ".join(cells) + " |")
        out.append("")
        for i, note in enumerate(notes, 1):
            out.append(f"[^{i}]: {note}")
        if notes:
            out.append("")
    return "\n".join(out)


def write_summary(summary: BenchmarkSummary, path, format: str = "csv") -> Path:
    """Write ``summary`` as CSV (full precision) or markdown (2 decimals)."""
    if not summary.rows:
        raise ValueError("summary is empty")
    if format == "csv":
        text = summary_csv(summary)
    elif format in ("md", "markdown"):
        text = summary_markdown(summary)
    else:
        raise ValueError(f"unknown format {format!r}")
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_summary_csv(path) -> BenchmarkSummary:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != SUMMARY_COLUMNS:
                raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
            rows = []
            for raw in reader:
                values = {}
                for f in fields(SummaryRow):
                    if f.name not in raw:
                        continue
                    text = raw[f.name]
                    if f.name in ("problem", "solver", "linesearch"):
                        values[f.name] = text
                    elif f.name == "runs":
                        values[f.name] = int(text)
                    else:
                        values[f.name] = float(text)
                rows.append(SummaryRow(**values))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return BenchmarkSummary(rows)


def trace_rows(trace: SolveTrace) -> list[list[str]]:
    """Header plus one row per iterate; ``status`` is filled on the last row only."""
    first = trace.records[0]
    header = ["iter"]
    header += [f"x_{i + 1}" for i in range(len(first.x))]
    header += [f"F_{i + 1}" for i in range(len(first.F))]
    header += ["dnorm", "beta", "theta", "status"]
    rows = [header]
    last = len(trace.records) - 1
    for i, rec in enumerate(trace.records):
        row = [str(rec.k)]
        row += [repr(float(v)) for v in rec.x]
        row += [repr(float(v)) for v in rec.F]
        row += [repr(float(rec.dnorm)), "" if rec.beta is None else repr(float(rec.beta)), repr(float(rec.theta))]
        row.append(trace.status if i == last else "")
        rows.append(row)
    return rows


def dump_trace(problem_name: str, solver: str, linesearch: str, path, x0=None, seed: int = 42,
               run_index: int = 0, config: BenchConfig | None = None) -> SolveTrace:
    """Solve once and write the trajectory CSV.

    Without ``x0`` the start is the benchmark start of ``(seed, run_index)``.
    """
    config = config or BenchConfig()
    problem = make_problem(problem_name)
    if x0 is None:
        x0 = initial_point(problem, seed, run_index)
    trace = solve(problem, np.asarray(x0, dtype=float), config.solver_config(solver, linesearch))
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(trace_rows(trace))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return trace
