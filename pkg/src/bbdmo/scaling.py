"""Per-objective Barzilai-Borwein coefficients and gradient scaling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALPHA_MIN = 1e-3
ALPHA_MAX = 1e3
# |<s, y>| below this fraction of ||s|| ||y|| counts as an exact zero
ZERO_PRODUCT_RTOL = 1e-12


def update_alphas(s, ys, alpha_min: float = ALPHA_MIN, alpha_max: float = ALPHA_MAX) -> np.ndarray:
    """Safeguarded spectral coefficients, one per row of ``ys``.

    Positive curvature uses <s,y>/<s,s>, negative curvature falls back to
    ||y||/||s||, and a zero product gives ``alpha_min``. The first two cases
    are clamped into [alpha_min, alpha_max].
    """
    s = np.asarray(s, dtype=float)
    Y = np.atleast_2d(np.asarray(ys, dtype=float))
    ss = float(s @ s)
    if not ss > 0.0:
        raise ValueError("step s must be nonzero to update the BB coefficients")
    s_norm = np.sqrt(ss)
    products = Y @ s
    y_norms = np.linalg.norm(Y, axis=1)
    alphas = np.empty(len(Y))
    for i, (sy, y_norm) in enumerate(zip(products, y_norms)):
        if abs(sy) <= ZERO_PRODUCT_RTOL * s_norm * y_norm:
            alphas[i] = alpha_min
        elif sy > 0:
            alphas[i] = min(max(sy / ss, alpha_min), alpha_max)
        else:
            alphas[i] = min(max(y_norm / s_norm, alpha_min), alpha_max)
    return alphas


def scale_gradients(jac, alphas) -> np.ndarray:
    """Divide row i of ``jac`` by ``alphas[i]``."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0):
        raise ValueError("alphas must be positive")
    return np.asarray(jac, dtype=float) / alphas[:, None]


@dataclass
class ScalingState:
    """BB memory carried between iterations of one run."""

    alphas: np.ndarray
    s: np.ndarray | None = None
    ys: np.ndarray | None = None
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX

    @classmethod
    def initial(cls, m: int, alpha_min: float = ALPHA_MIN, alpha_max: float = ALPHA_MAX) -> "ScalingState":
        return cls(alphas=np.ones(m), alpha_min=alpha_min, alpha_max=alpha_max)

    def update(self, x_new, x_old, jac_new, jac_old) -> bool:
        """Refresh the coefficients from the last step; returns False when the step was skipped.

        Steps with ||s|| <= 1e-16 * max(1, ||x||) keep the previous alphas.
        """
        s = np.asarray(x_new, dtype=float) - np.asarray(x_old, dtype=float)
        if np.linalg.norm(s) <= 1e-16 * max(1.0, float(np.linalg.norm(x_new))):
            return False
        ys = np.asarray(jac_new, dtype=float) - np.asarray(jac_old, dtype=float)
        self.alphas = update_alphas(s, ys, self.alpha_min, self.alpha_max)
        self.s, self.ys = s, ys
        return True
