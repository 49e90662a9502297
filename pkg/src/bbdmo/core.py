"""Multiobjective problem container and evaluation helpers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ValueOracle = Callable[[np.ndarray], np.ndarray]
JacobianOracle = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Problem:
    """A smooth map F: R^n -> R^m with box bounds used for sampling starts.

    The bounds are never enforced by the solvers; they only describe where
    initial points are drawn from.
    """

    name: str
    n: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    value_oracle: ValueOracle = field(repr=False)
    jacobian_oracle: JacobianOracle = field(repr=False)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"{self.name}: need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (self.n,) or upper.shape != (self.n,):
            raise ValueError(f"{self.name}: bounds must have shape ({self.n},)")
        if np.any(lower > upper):
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def values(self, x) -> np.ndarray:
        """F(x) without touching any counter."""
        x = _check_point(self, x)
        with np.errstate(all="ignore"):
            return np.asarray(self.value_oracle(x), dtype=float).reshape(self.m)

    def jacobian(self, x) -> np.ndarray:
        x = _check_point(self, x)
        with np.errstate(all="ignore"):
            return np.asarray(self.jacobian_oracle(x), dtype=float).reshape(self.m, self.n)


@dataclass
class Evaluation:
    x: np.ndarray
    values: np.ndarray
    jacobian: np.ndarray | None = None

    @property
    def finite(self) -> bool:
        ok = bool(np.all(np.isfinite(self.values)))
        if self.jacobian is not None:
            ok = ok and bool(np.all(np.isfinite(self.jacobian)))
        return ok


@dataclass
class FevalCounter:
    count: int = 0


class Evaluator:
    """Counts vector evaluations of F for one run.

    Calling the evaluator costs one feval; ``jacobian`` is free.
    """

    def __init__(self, problem: Problem, counter: FevalCounter | None = None):
        self.problem = problem
        self.counter = counter if counter is not None else FevalCounter()

    @property
    def fevals(self) -> int:
        return self.counter.count

    def __call__(self, x) -> np.ndarray:
        return evaluate(self.problem, x, self.counter)

    def jacobian(self, x) -> np.ndarray:
        return jacobian(self.problem, x)


def _check_point(problem: Problem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(
            f"{problem.name}: expected a point of length {problem.n}, got shape {x.shape}"
        )
    return x


def evaluate(problem: Problem, x, counter: FevalCounter | None = None) -> np.ndarray:
    """Return F(x) and bump ``counter`` by one.

    Non-finite components are returned as-is; callers test them with
    ``np.isfinite`` (line searches treat them as rejected trials).
    """
    values = problem.values(x)
    if counter is not None:
        counter.count += 1
    return values


def jacobian(problem: Problem, x) -> np.ndarray:
    """JF(x), shape (m, n); row i is the gradient of F_i."""
    return problem.jacobian(x)


def evaluation(problem: Problem, x, with_jacobian: bool = False) -> Evaluation:
    x = _check_point(problem, x)
    return Evaluation(
        x=x.copy(),
        values=problem.values(x),
        jacobian=problem.jacobian(x) if with_jacobian else None,
    )


def check_jacobian_fd(problem: Problem, x, h: float = 1e-6) -> float:
    """Largest relative gap between central differences and the analytic Jacobian.

    Each entry is scaled by ``max(1, |analytic|)``. Returns ``inf`` when any
    evaluation is non-finite.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = _check_point(problem, x)
    analytic = problem.jacobian(x)
    fd = np.empty_like(analytic)
    for j in range(problem.n):
        e = np.zeros(problem.n)
        e[j] = h
        fd[:, j] = (problem.values(x + e) - problem.values(x - e)) / (2.0 * h)
    if not (np.all(np.isfinite(fd)) and np.all(np.isfinite(analytic))):
        return float("inf")
    return float(np.max(np.abs(fd - analytic) / np.maximum(1.0, np.abs(analytic))))
