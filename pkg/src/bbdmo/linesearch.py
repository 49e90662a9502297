"""Backtracking line searches for a vector sufficient-decrease test.

A trial stepsize ``beta`` is accepted when every component satisfies

    F(x + beta d) - C <= sigma * beta * slopes

where ``slopes_i = <grad F_i(x), d>`` and the reference ``C`` is F(x)
(Armijo), the componentwise max over a window of past values, or an
exponentially weighted average of past values. Non-finite trial values are
always rejected.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LineSearchParams:
    sigma: float = 0.1
    gamma: float = 0.5
    initial_beta: float = 1.0
    beta_floor: float = 1e-12
    M: int = 10
    eta: float = 0.8

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.initial_beta > 0.0:
            raise ValueError("initial_beta must be positive")
        if int(self.M) != self.M or self.M < 0:
            raise ValueError("M must be a nonnegative integer")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")


@dataclass
class LineSearchOutcome:
    beta: float
    trials: int
    accepted_values: np.ndarray
    accepted_point: np.ndarray


class LineSearchFailure(RuntimeError):
    def __init__(self, trials: int, beta: float):
        super().__init__(f"stepsize fell below the floor after {trials} trials (beta={beta:.3e})")
        self.trials = trials
        self.beta = beta


@dataclass
class NonmonotoneState:
    """Reference memory for the nonmonotone searches.

    ``history`` holds the most recent F values (newest last, at most M+1 of
    them) for the max-type rule; ``q`` and ``C`` drive the average-type rule.
    """

    M: int = 10
    history: deque = field(default_factory=deque)
    q: float = 1.0
    C: np.ndarray | None = None

    @classmethod
    def start(cls, F0, M: int = 10) -> "NonmonotoneState":
        F0 = np.asarray(F0, dtype=float)
        state = cls(M=M, q=1.0, C=F0.copy())
        state.history.append(F0.copy())
        return state

    def push(self, F) -> None:
        self.history.append(np.asarray(F, dtype=float).copy())
        while len(self.history) > self.M + 1:
            self.history.popleft()

    def max_reference(self) -> np.ndarray:
        window = list(self.history)[-(self.M + 1):]
        return np.max(np.stack(window), axis=0)


def _backtrack(evaluator, x, reference, d, slopes, params: LineSearchParams, initial_beta=None) -> LineSearchOutcome:
    beta = params.initial_beta if initial_beta is None else float(initial_beta)
    trials = 0
    while True:
        if beta < params.beta_floor:
            raise LineSearchFailure(trials, beta)
        point = x + beta * d
        values = evaluator(point)
        trials += 1
        if np.all(np.isfinite(values)) and np.all(values - reference <= params.sigma * beta * slopes):
            return LineSearchOutcome(beta, trials, values, point)
        beta *= params.gamma


def armijo(evaluator, x, Fx, d, slopes, params: LineSearchParams = LineSearchParams(), initial_beta=None) -> LineSearchOutcome:
    """Monotone backtracking from ``initial_beta`` (default ``params.initial_beta``)."""
    return _backtrack(evaluator, x, np.asarray(Fx, dtype=float), d, slopes, params, initial_beta)


def max_nonmonotone(evaluator, x, state: NonmonotoneState, d, slopes, params: LineSearchParams = LineSearchParams(), initial_beta=None) -> LineSearchOutcome:
    """Backtracking against the componentwise max over the stored window.

    The newest history entry must be F(x). The caller pushes the accepted
    value afterwards.
    """
    if not state.history:
        raise ValueError("max-type search needs a nonempty history")
    return _backtrack(evaluator, x, state.max_reference(), d, slopes, params, initial_beta)


def update_avg_reference(q_prev: float, C_prev, Fx, eta: float) -> tuple[float, np.ndarray]:
    q = eta * q_prev + 1.0
    C = (eta * q_prev * np.asarray(C_prev, dtype=float) + np.asarray(Fx, dtype=float)) / q
    return q, C


def avg_nonmonotone(evaluator, x, q: float, C, Fx, d, slopes, params: LineSearchParams = LineSearchParams(), initial_beta=None):
    """Update the averaged reference with F(x), then backtrack against it.

    Returns ``(outcome, q_new, C_new)``.
    """
    q_new, C_new = update_avg_reference(q, C, Fx, params.eta)
    outcome = _backtrack(evaluator, x, C_new, d, slopes, params, initial_beta)
    return outcome, q_new, C_new
