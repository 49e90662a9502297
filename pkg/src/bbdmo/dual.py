"""Direction-finding subproblem solved through its dual over the unit simplex.

The common descent direction is ``d = -sum_i lam_i g_i`` where ``lam``
minimises ``0.5 * ||sum_i lam_i g_i||^2`` over the simplex. Single and
two-objective instances are solved in closed form; larger ones use a
fully-corrective Frank-Wolfe iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WEIGHT_TOL = 1e-10


@dataclass
class DualSolution:
    lam: np.ndarray
    direction: np.ndarray
    theta: float
    t: float
    active: tuple[int, ...]
    fw_iterations: int = 0
    duality_gap: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.direction))


class DualNonConvergence(RuntimeError):
    """Frank-Wolfe ran out of iterations far from the requested gap."""

    def __init__(self, message: str, solution: DualSolution):
        super().__init__(message)
        self.solution = solution


def direction_from_weights(gradients, lam) -> np.ndarray:
    G = np.atleast_2d(np.asarray(gradients, dtype=float))
    return -(np.asarray(lam, dtype=float) @ G)


def _finish(G: np.ndarray, lam: np.ndarray, iterations: int, gap: float) -> DualSolution:
    d = direction_from_weights(G, lam)
    dd = float(d @ d)
    t = -dd
    slopes = G @ d
    active_tol = 1e-8 * max(1.0, dd)
    active = set(np.flatnonzero(slopes >= t - active_tol).tolist())
    active.update(np.flatnonzero(lam > WEIGHT_TOL).tolist())
    return DualSolution(
        lam=lam,
        direction=d,
        theta=-0.5 * dd,
        t=t,
        active=tuple(sorted(active)),
        fw_iterations=iterations,
        duality_gap=gap,
    )


def _two_weights(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    diff = g1 - g2
    denom = float(diff @ diff)
    scale = max(float(g1 @ g1), float(g2 @ g2))
    if denom <= 1e-30 * max(scale, 1e-300):
        return np.array([0.5, 0.5])
    a = min(max(float((g2 - g1) @ g2) / denom, 0.0), 1.0)
    return np.array([a, 1.0 - a])


def _affine_minimizer(G: np.ndarray, support: list[int], weights: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the min-norm point of the affine hull of G[support].

    The hull is parametrised around the vertex carrying the most weight; the
    small weights are then computed directly instead of as 1 - (sum of the
    others), which keeps them accurate when gradient norms differ wildly.
    """
    if len(support) == 1:
        return np.ones(1)
    k = len(support)
    pivot = int(np.argmax(weights))
    for _ in range(2):
        others = [i for i in range(k) if i != pivot]
        base = G[support[pivot]]
        B = G[[support[i] for i in others]] - base
        z, *_ = np.linalg.lstsq(B.T, -base, rcond=None)
        mu = np.empty(k)
        mu[others] = z
        mu[pivot] = 1.0 - z.sum()
        if int(np.argmax(mu)) == pivot:
            break
        pivot = int(np.argmax(mu))
    return mu


def _correct(G: np.ndarray, lam: np.ndarray, support: list[int]) -> list[int]:
    # Move lam to the min-norm point of conv(G[support]), dropping vertices
    # whose weight hits zero on the way (in place on lam).
    while True:
        current = lam[support]
        mu = _affine_minimizer(G, support, current)
        if np.all(mu > 0.0):
            lam[:] = 0.0
            lam[support] = mu
            return support
        shrink = mu <= 0.0
        ratios = current[shrink] / (current[shrink] - mu[shrink])
        step = float(np.min(ratios))
        new = current + step * (mu - current)
        new[np.flatnonzero(shrink)[np.argmin(ratios)]] = 0.0
        new[new < WEIGHT_TOL * 1e-6] = 0.0
        lam[:] = 0.0
        lam[support] = new
        support = [i for i in support if lam[i] > 0.0]
        lam /= lam.sum()


def _frank_wolfe(G: np.ndarray, lam: np.ndarray, gap_tol: float, max_iters: int):
    """Fully-corrective Frank-Wolfe on 0.5 * ||lam @ G||^2 over the simplex.

    Each step adds the Frank-Wolfe vertex argmax_i <g_i, d> to the working
    set and re-minimises exactly over the convex hull of that set. Affine
    minimisations are least-squares solves on the gradients themselves, so the
    Gram matrix (which squares the conditioning) is never formed.
    """
    norms = np.linalg.norm(G, axis=1)
    g_max = float(norms.max())
    m, n = G.shape
    support = [int(i) for i in np.flatnonzero(lam > 0.0)]
    if not 0 < len(support) <= min(m, n + 1):
        support = [int(np.argmin(np.linalg.norm(G, axis=1)))]
    total = 0
    for attempt in range(2):
        lam_k = np.zeros(m)
        lam_k[support] = lam[support] if attempt == 0 and lam[support].sum() > 0 else 1.0
        lam_k /= lam_k.sum()
        support = _correct(G, lam_k, support)
        best_gap, best_lam = np.inf, lam_k.copy()
        stalled = 0
        for it in range(max_iters + 1):
            d = -(lam_k @ G)
            slopes = G @ d
            dd = float(d @ d)
            j = int(np.argmax(slopes))
            gap = dd + float(slopes[j])
            if gap < best_gap:
                best_gap, best_lam, stalled = gap, lam_k.copy(), 0
            else:
                stalled += 1
            converged = gap <= gap_tol * max(1.0, g_max * float(lam_k @ norms))
            if converged or it == max_iters or j in support or stalled > 2 * m:
                break
            support = _correct(G, lam_k, sorted(support + [j]))
        total += it
        if converged:
            break
        # roundoff stall: restart once from the shortest gradient
        support = [int(np.argmin(np.linalg.norm(G, axis=1)))]
    return best_lam, total, best_gap


def solve_dual(gradients, warm_start=None, gap_tol: float = 1e-12, max_fw_iters: int | None = None) -> DualSolution:
    """Minimum-norm element of the convex hull of ``gradients``.

    ``gradients`` is an (m, n) array (rows are gradients). The Frank-Wolfe gap
    ``||d||^2 + max_i <g_i, d>`` is checked against
    ``gap_tol * max(1, max_i ||g_i|| * sum_i lam_i ||g_i||)``, the roundoff
    level of the slopes, so badly scaled gradients do not stall the iteration.

    Raises DualNonConvergence (carrying the best iterate) if Frank-Wolfe stops
    at ``max_fw_iters`` with a gap above ``1e3 * gap_tol`` in the same scale.
    """
    G = np.atleast_2d(np.asarray(gradients, dtype=float))
    m = G.shape[0]
    if G.ndim != 2 or G.shape[1] < 1 or m < 1:
        raise ValueError("gradients must be a non-empty (m, n) array")
    if not np.all(np.isfinite(G)):
        raise ValueError("gradients must be finite")
    if m == 1:
        return _finish(G, np.ones(1), 0, 0.0)
    if m == 2:
        return _finish(G, _two_weights(G[0], G[1]), 0, 0.0)

    if max_fw_iters is None:
        max_fw_iters = 1000 * m
    if warm_start is not None and len(warm_start) == m:
        lam = np.clip(np.asarray(warm_start, dtype=float), 0.0, None)
        total = lam.sum()
        lam = lam / total if total > 0 else np.full(m, 1.0 / m)
    else:
        lam = np.full(m, 1.0 / m)
    lam, iterations, gap = _frank_wolfe(G, lam, gap_tol, max_fw_iters)
    solution = _finish(G, lam, iterations, gap)
    norms = np.linalg.norm(G, axis=1)
    scale = max(1.0, float(norms.max() * (lam @ norms)))
    if gap > 1e3 * gap_tol * scale:
        raise DualNonConvergence(
            f"Frank-Wolfe stopped after {iterations} iterations with gap {gap:.3e}", solution
        )
    return solution


def kkt_residual(gradients, solution: DualSolution) -> float:
    """Worst violation of simplex feasibility, primal feasibility and complementarity."""
    G = np.atleast_2d(np.asarray(gradients, dtype=float))
    lam = np.asarray(solution.lam, dtype=float)
    slopes = G @ solution.direction
    t = solution.t
    return float(
        max(
            abs(lam.sum() - 1.0),
            float(np.max(np.maximum(-lam, 0.0))),
            float(np.max(np.maximum(slopes - t, 0.0))),
            float(np.max(np.abs(lam * (t - slopes)))),
        )
    )


def is_critical(solution: DualSolution, tol: float) -> bool:
    return solution.norm < tol
