"""Outer loops: steepest descent (SDMO), BB stepsize (BBMO) and BB descent (BBDMO)."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Evaluator, Problem
from .dual import DualSolution, solve_dual
from .linesearch import (
    LineSearchFailure,
    LineSearchParams,
    NonmonotoneState,
    armijo,
    avg_nonmonotone,
    max_nonmonotone,
)
from .scaling import ALPHA_MAX, ALPHA_MIN, ScalingState, scale_gradients, update_alphas

METHODS = ("sdmo", "bbmo", "bbdmo")
LINESEARCHES = ("armijo", "max", "avg")


@dataclass(frozen=True)
class SolverConfig:
    method: str = "bbdmo"
    linesearch: str = "armijo"
    tol: float = 1e-4
    max_iters: int = 500
    params: LineSearchParams = field(default_factory=LineSearchParams)
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX
    gap_tol: float = 1e-12
    # BBDMO only: which direction norm(s) must fall below tol to stop
    stop_on: str = "unscaled"

    def __post_init__(self):
        object.__setattr__(self, "method", self.method.lower())
        object.__setattr__(self, "linesearch", self.linesearch.lower())
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.linesearch not in LINESEARCHES:
            raise ValueError(f"unknown line search {self.linesearch!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.stop_on not in ("scaled", "unscaled", "both"):
            raise ValueError(f"unknown stop_on {self.stop_on!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class IterRecord:
    """State at x^k; ``beta``/``trials``/``slopes`` describe the step taken from it (None on the last row).

    ``direction`` is the search direction at x^k whose norm is ``dnorm``.
    """

    k: int
    x: np.ndarray
    F: np.ndarray
    dnorm: float
    theta: float
    direction: np.ndarray | None = None
    beta: float | None = None
    trials: int | None = None
    slopes: np.ndarray | None = None


@dataclass
class SolveTrace:
    problem: str
    method: str
    linesearch: str
    records: list[IterRecord]
    status: str  # "critical", "max_iters" or "linesearch_failure"
    fevals: int
    wall_time: float

    @property
    def iterations(self) -> int:
        return sum(1 for r in self.records if r.beta is not None)

    @property
    def betas(self) -> list[float]:
        return [r.beta for r in self.records if r.beta is not None]

    @property
    def mean_beta(self) -> float:
        betas = self.betas
        return float(np.mean(betas)) if betas else float("nan")

    @property
    def x(self) -> np.ndarray:
        return self.records[-1].x

    @property
    def F(self) -> np.ndarray:
        return self.records[-1].F


def _direction(method, jac, x, prev, scaling, lam_prev, config):
    """Search direction at x and the stepsize to start backtracking from."""
    k = prev["k"]
    if method == "bbdmo" and k > 0:
        scaling.update(x, prev["x"], jac, prev["jac"])
        sol = solve_dual(scale_gradients(jac, scaling.alphas), lam_prev, config.gap_tol)
        return sol, config.params.initial_beta
    sol = solve_dual(jac, lam_prev, config.gap_tol)
    if method == "bbmo" and k > 0:
        s = x - prev["x"]
        if np.linalg.norm(s) > 1e-16 * max(1.0, float(np.linalg.norm(x))):
            y = sol.direction - prev["d"]
            prev["alpha_bar"] = float(update_alphas(s, y[None, :], config.alpha_min, config.alpha_max)[0])
        return sol, 1.0 / prev["alpha_bar"]
    return sol, config.params.initial_beta


def _stop(sol, jac, k, method, config):
    """(stop?, solution whose norm decided it).

    For BBDMO the unscaled steepest direction decides criticality unless
    ``stop_on="scaled"``; ``"both"`` requires both norms below tol.
    """
    if method != "bbdmo" or k == 0 or config.stop_on == "scaled":
        return sol.norm < config.tol, sol
    if config.stop_on == "both" and sol.norm >= config.tol:
        return False, sol
    plain = solve_dual(jac, gap_tol=config.gap_tol)
    return plain.norm < config.tol, plain


def _search(config, evaluator, x, Fx, nm, k, d, slopes, beta0):
    """One line search; returns (outcome, q, C) with the averaged reference (unchanged unless avg)."""
    params = config.params
    if config.linesearch == "armijo":
        return armijo(evaluator, x, Fx, d, slopes, params, beta0), nm.q, nm.C
    if config.linesearch == "max":
        return max_nonmonotone(evaluator, x, nm, d, slopes, params, beta0), nm.q, nm.C
    if k == 0:
        # q^0 = 1, C^0 = F(x^0): the first reference is F(x^0) itself
        return armijo(evaluator, x, nm.C, d, slopes, params, beta0), nm.q, nm.C
    return avg_nonmonotone(evaluator, x, nm.q, nm.C, Fx, d, slopes, params, beta0)


def solve(problem: Problem, x0, config: SolverConfig) -> SolveTrace:
    """Run one solver from ``x0`` until ||d|| < tol, max_iters steps, or a line-search failure."""
    start = time.perf_counter()
    method = config.method
    params = config.params
    evaluator = Evaluator(problem)
    x = np.array(x0, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"x0 must have length {problem.n}")
    Fx = problem.values(x)
    scaling = ScalingState.initial(problem.m, config.alpha_min, config.alpha_max)
    nm = NonmonotoneState.start(Fx, params.M)
    prev = {"k": 0, "x": None, "jac": None, "d": None, "alpha_bar": 1.0}
    lam = None
    records: list[IterRecord] = []
    status = "max_iters"

    for k in range(config.max_iters + 1):
        prev["k"] = k
        jac = problem.jacobian(x)
        sol, beta0 = _direction(method, jac, x, prev, scaling, lam, config)
        lam = sol.lam
        stop, checked = _stop(sol, jac, k, method, config)
        if stop:
            sol = checked
        rec = IterRecord(k, x.copy(), Fx.copy(), sol.norm, sol.theta, sol.direction.copy())
        records.append(rec)
        if stop:
            status = "critical"
            break
        if k == config.max_iters:
            break

        slopes = jac @ sol.direction
        failed_trials = 0
        try:
            out, q, C = _search(config, evaluator, x, Fx, nm, k, sol.direction, slopes, beta0)
        except LineSearchFailure as exc:
            # a badly scaled BB direction can be too flat to pass in floating
            # point; retry once along the unscaled steepest direction
            if checked is sol:
                status = "linesearch_failure"
                break
            failed_trials = exc.trials
            sol = checked
            rec.dnorm, rec.theta, rec.direction = sol.norm, sol.theta, sol.direction.copy()
            slopes = jac @ sol.direction
            try:
                out, q, C = _search(config, evaluator, x, Fx, nm, k, sol.direction, slopes, params.initial_beta)
            except LineSearchFailure:
                status = "linesearch_failure"
                break

        nm.q, nm.C = q, C
        rec.beta, rec.trials, rec.slopes = out.beta, failed_trials + out.trials, slopes
        prev.update(x=x, jac=jac, d=sol.direction)
        x, Fx = out.accepted_point, out.accepted_values
        nm.push(Fx)

    return SolveTrace(
        problem=problem.name,
        method=method,
        linesearch=config.linesearch,
        records=records,
        status=status,
        fevals=evaluator.fevals,
        wall_time=time.perf_counter() - start,
    )


def run_sdmo(problem: Problem, x0, config: SolverConfig | None = None) -> SolveTrace:
    return solve(problem, x0, _with_method(config, "sdmo"))


def run_bbmo(problem: Problem, x0, config: SolverConfig | None = None) -> SolveTrace:
    return solve(problem, x0, _with_method(config, "bbmo"))


def run_bbdmo(problem: Problem, x0, config: SolverConfig | None = None) -> SolveTrace:
    return solve(problem, x0, _with_method(config, "bbdmo"))


def _with_method(config, method):
    if config is None:
        return SolverConfig(method=method)
    return replace(config, method=method)


def criticality_report(problem: Problem, x, tol: float = 1e-4) -> tuple[float, float, np.ndarray]:
    """(||d(x)||, theta(x), lambda(x)) of the unscaled steepest-descent subproblem."""
    sol: DualSolution = solve_dual(problem.jacobian(np.asarray(x, dtype=float)))
    return sol.norm, sol.theta, sol.lam
