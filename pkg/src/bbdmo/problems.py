"""Benchmark problems with hand-derived Jacobians.

The registry holds the eighteen standard test instances. Two extra fixtures
(``Example3.1``, ``Example4.2``) are available through ``make_problem`` but
are not part of the benchmark list.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Problem

WIT_LAMBDAS = {"WIT1": 0.0, "WIT2": 0.5, "WIT3": 0.9, "WIT4": 0.99, "WIT5": 0.999, "WIT6": 1.0}

PROBLEM_NAMES = (
    "Imbalance1",
    "Imbalance2",
    "JOS1a",
    "JOS1b",
    "JOS1c",
    "JOS1d",
    "WIT1",
    "WIT2",
    "WIT3",
    "WIT4",
    "WIT5",
    "WIT6",
    "Deb",
    "PNR",
    "DD1",
    "FDS",
    "TRIDIA1",
    "TRIDIA2",
)

EXTRA_NAMES = ("Example3.1", "Example4.2")


def _box(n, lo, hi):
    return np.full(n, float(lo)), np.full(n, float(hi))


def imbalance(name, a, b, c, d):
    def values(x):
        return np.array([a * x[0] ** 2 + b * x[1] ** 2, c * (x[0] - 50) ** 2 + d * (x[1] + 50) ** 2])

    def jac(x):
        return np.array([[2 * a * x[0], 2 * b * x[1]], [2 * c * (x[0] - 50), 2 * d * (x[1] + 50)]])

    lo, hi = _box(2, -2, 2)
    return Problem(name, 2, 2, lo, hi, values, jac, {"a": a, "b": b, "c": c, "d": d})


def jos1(name, n, bound):
    def values(x):
        return np.array([x @ x / n, (x - 2.0) @ (x - 2.0) / n])

    def jac(x):
        return np.vstack([2.0 * x / n, 2.0 * (x - 2.0) / n])

    lo, hi = _box(n, -bound, bound)
    return Problem(name, n, 2, lo, hi, values, jac, {"n": n})


def wit(name, lam):
    def values(x):
        u, v = x[0] - 2.0, x[1] - 2.0
        f1 = lam * (u**2 + v**2) + (1 - lam) * (u**4 + v**8)
        f2 = (x[0] + 2 * lam) ** 2 + (x[1] + 2 * lam) ** 2
        return np.array([f1, f2])

    def jac(x):
        u, v = x[0] - 2.0, x[1] - 2.0
        return np.array(
            [
                [2 * lam * u + 4 * (1 - lam) * u**3, 2 * lam * v + 8 * (1 - lam) * v**7],
                [2 * (x[0] + 2 * lam), 2 * (x[1] + 2 * lam)],
            ]
        )

    lo, hi = _box(2, -2, 2)
    return Problem(name, 2, 2, lo, hi, values, jac, {"lambda": lam})


def _deb_g(x2):
    e1 = np.exp(-(((x2 - 0.2) / 0.004) ** 2))
    e2 = np.exp(-(((x2 - 0.6) / 0.4) ** 2))
    g = 2.0 - e1 - 0.8 * e2
    dg = e1 * 2 * (x2 - 0.2) / 0.004**2 + 0.8 * e2 * 2 * (x2 - 0.6) / 0.4**2
    return g, dg


def deb():
    def values(x):
        g, _ = _deb_g(x[1])
        return np.array([x[0], g / x[0]])

    def jac(x):
        g, dg = _deb_g(x[1])
        return np.array([[1.0, 0.0], [-g / x[0] ** 2, dg / x[0]]])

    lo, hi = _box(2, 0.1, 1.0)
    return Problem("Deb", 2, 2, lo, hi, values, jac)


def pnr():
    def values(x):
        x1, x2 = x
        f1 = x1**4 + x2**4 - x1**2 + x2**2 - 10 * x1 * x2 + 0.25 * x1 + 20
        return np.array([f1, (x1 - 1) ** 2 + x2**2])

    def jac(x):
        x1, x2 = x
        return np.array(
            [
                [4 * x1**3 - 2 * x1 - 10 * x2 + 0.25, 4 * x2**3 + 2 * x2 - 10 * x1],
                [2 * (x1 - 1), 2 * x2],
            ]
        )

    lo, hi = _box(2, -2, 2)
    return Problem("PNR", 2, 2, lo, hi, values, jac)


def dd1():
    def values(x):
        f2 = 3 * x[0] + 2 * x[1] - x[2] / 3 + 0.01 * (x[3] - x[4]) ** 3
        return np.array([x @ x, f2])

    def jac(x):
        c = 0.03 * (x[3] - x[4]) ** 2
        return np.vstack([2 * x, [3.0, 2.0, -1.0 / 3.0, c, -c]])

    lo, hi = _box(5, -20, 20)
    return Problem("DD1", 5, 2, lo, hi, values, jac)


def fds(n=10):
    i = np.arange(1, n + 1, dtype=float)
    w3 = i * (n - i + 1) / (n * (n + 1))

    def values(x):
        f1 = np.sum(i * (x - i) ** 2) / n
        f2 = np.exp(x.sum() / n) + x @ x
        f3 = np.sum(w3 * np.exp(-x))
        return np.array([f1, f2, f3])

    def jac(x):
        return np.vstack(
            [
                2 * i * (x - i) / n,
                np.exp(x.sum() / n) / n + 2 * x,
                -w3 * np.exp(-x),
            ]
        )

    lo, hi = _box(n, -2, 2)
    return Problem("FDS", n, 3, lo, hi, values, jac, {"n": n})


def tridia1():
    def values(x):
        return np.array([(2 * x[0] - 1) ** 2, 2 * (2 * x[0] - x[1]) ** 2, 3 * (x[1] - x[2]) ** 2])

    def jac(x):
        a = 2 * x[0] - x[1]
        b = x[1] - x[2]
        return np.array(
            [
                [4 * (2 * x[0] - 1), 0.0, 0.0],
                [8 * a, -4 * a, 0.0],
                [0.0, 6 * b, -6 * b],
            ]
        )

    lo, hi = _box(3, -1, 1)
    return Problem("TRIDIA1", 3, 3, lo, hi, values, jac)


def tridia2():
    def values(x):
        f = np.empty(4)
        f[0] = (2 * x[0] - 1) ** 2 + x[1] ** 2
        for i in (2, 3):
            p, c = x[i - 2], x[i - 1]
            f[i - 1] = i * (2 * p - c) ** 2 - (i - 1) * p**2 + i * c**2
        f[3] = 4 * (2 * x[2] - x[3]) ** 2 - 3 * x[2] ** 2
        return f

    def jac(x):
        J = np.zeros((4, 4))
        J[0, 0] = 4 * (2 * x[0] - 1)
        J[0, 1] = 2 * x[1]
        for i in (2, 3):
            p, c = x[i - 2], x[i - 1]
            r = 2 * p - c
            J[i - 1, i - 2] = 4 * i * r - 2 * (i - 1) * p
            J[i - 1, i - 1] = -2 * i * r + 2 * i * c
        r = 2 * x[2] - x[3]
        J[3, 2] = 16 * r - 6 * x[2]
        J[3, 3] = -8 * r
        return J

    lo, hi = _box(4, -1, 1)
    return Problem("TRIDIA2", 4, 4, lo, hi, values, jac)


def example_3_1():
    """Strongly imbalanced pair: 100||x - (50,-50)||^2 against 0.5||x||^2."""

    def values(x):
        return np.array([100 * (x[0] - 50) ** 2 + 100 * (x[1] + 50) ** 2, 0.5 * (x @ x)])

    def jac(x):
        return np.array([[200 * (x[0] - 50), 200 * (x[1] + 50)], [x[0], x[1]]])

    lo, hi = _box(2, -2, 2)
    return Problem("Example3.1", 2, 2, lo, hi, values, jac)


def example_4_2():
    """Two quadratics plus the linear objective -x1."""

    def values(x):
        return np.array(
            [5 * x[0] ** 2 + 10 * x[1] ** 2, 2 * (x[0] - 2) ** 2 + 5 * x[1] ** 2, -x[0]]
        )

    def jac(x):
        return np.array([[10 * x[0], 20 * x[1]], [4 * (x[0] - 2), 10 * x[1]], [-1.0, 0.0]])

    lo, hi = _box(2, -2, 2)
    return Problem("Example4.2", 2, 3, lo, hi, values, jac)


_BUILDERS: dict[str, Callable[..., Problem]] = {
    "Imbalance1": lambda: imbalance("Imbalance1", 0.1, 10.0, 1.0, 100.0),
    "Imbalance2": lambda: imbalance("Imbalance2", 1.0, 1.0, 100.0, 100.0),
    "JOS1a": lambda n=50: jos1("JOS1a", n, 2.0),
    "JOS1b": lambda n=100: jos1("JOS1b", n, 2.0),
    "JOS1c": lambda n=100: jos1("JOS1c", n, 50.0),
    "JOS1d": lambda n=100: jos1("JOS1d", n, 100.0),
    **{name: (lambda lam=lam, name=name: wit(name, lam)) for name, lam in WIT_LAMBDAS.items()},
    "Deb": deb,
    "PNR": pnr,
    "DD1": dd1,
    "FDS": fds,
    "TRIDIA1": tridia1,
    "TRIDIA2": tridia2,
    "Example3.1": example_3_1,
    "Example4.2": example_4_2,
}

_RESIZABLE = {"JOS1a", "JOS1b", "JOS1c", "JOS1d", "FDS"}


def make_problem(name: str, n: int | None = None) -> Problem:
    """Build a problem by its registry name; ``n`` may be overridden for JOS1 and FDS."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES + EXTRA_NAMES)}") from None
    if n is None:
        return builder()
    if name not in _RESIZABLE:
        raise ValueError(f"{name} has a fixed dimension")
    return builder(n=n)


def sample_initial_point(problem: Problem, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw strictly inside the box."""
    lo, hi = problem.lower, problem.upper
    x = rng.uniform(lo, hi)
    while np.any((x <= lo) & (lo < hi)):
        x = rng.uniform(lo, hi)
    return x


@dataclass(frozen=True)
class ParetoReference:
    kind: str  # "segment", "axis-range" or "none"
    start: np.ndarray | None = None
    end: np.ndarray | None = None
    description: str = ""

    def points(self, count: int = 11) -> list[np.ndarray]:
        if self.kind != "segment":
            return []
        return [(1 - s) * self.start + s * self.end for s in np.linspace(0.0, 1.0, count)]

    def contains(self, x, tol: float = 1e-8) -> bool:
        if self.kind != "segment":
            return False
        x = np.asarray(x, dtype=float)
        seg = self.end - self.start
        s = np.clip((x - self.start) @ seg / (seg @ seg), 0.0, 1.0)
        return bool(np.linalg.norm(x - (self.start + s * seg)) <= tol)


def pareto_reference(name: str, n: int | None = None) -> ParetoReference:
    """Known Pareto-critical set, where one is available in closed form."""
    if name == "Example3.1":
        return ParetoReference("segment", np.zeros(2), np.array([50.0, -50.0]), "x = (1-s)(0,0) + s(50,-50)")
    if name.startswith("JOS1"):
        dim = n if n is not None else make_problem(name).n
        return ParetoReference("segment", np.zeros(dim), np.full(dim, 2.0), "x = c * ones, c in [0, 2]")
    if name == "WIT6":
        return ParetoReference("segment", np.full(2, -2.0), np.full(2, 2.0), "x = c * ones, c in [-2, 2]")
    return ParetoReference("none")
