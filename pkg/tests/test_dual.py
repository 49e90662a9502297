import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bbdmo import DualNonConvergence, direction_from_weights, is_critical, kkt_residual, solve_dual
from bbdmo.dual import WEIGHT_TOL

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def bisect_two(g1, g2, iters=200):
    """Minimise ||a g1 + (1-a) g2||^2 over [0, 1] by bisection on the derivative's sign."""
    slope = lambda a: float((a * g1 + (1 - a) * g2) @ (g1 - g2))
    if slope(0.0) >= 0:
        return 0.0
    if slope(1.0) <= 0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def grid_min_three(G, h=1e-3):
    k = int(round(1 / h))
    i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
    mask = i + j <= k
    L = np.stack([i[mask], j[mask], k - i[mask] - j[mask]], axis=1) / k
    V = L @ G
    return 0.5 * float(np.min(np.sum(V * V, axis=1)))


def test_single_objective_is_negative_gradient():
    g = np.array([[3.0, -4.0]])
    sol = solve_dual(g)
    np.testing.assert_array_equal(sol.lam, [1.0])
    np.testing.assert_array_equal(sol.direction, [-3.0, 4.0])
    assert sol.theta == pytest.approx(-12.5)
    assert sol.t == pytest.approx(-25.0)


def test_two_objectives_match_bisection(rng):
    for _ in range(200):
        n = rng.integers(1, 6)
        G = rng.normal(size=(2, n)) * rng.uniform(0.1, 10)
        sol = solve_dual(G)
        a = bisect_two(G[0], G[1])
        expected = -(a * G[0] + (1 - a) * G[1])
        assert np.linalg.norm(sol.direction - expected) <= 1e-8 * max(1.0, np.abs(G).max())


def test_identical_gradients_give_that_gradient():
    g = np.array([1.0, 2.0])
    sol = solve_dual(np.vstack([g, g]))
    np.testing.assert_allclose(sol.direction, -g)


def test_antiparallel_gradients_give_zero_direction():
    sol = solve_dual(np.array([[2.0, 0.0], [-1.0, 0.0]]))
    assert sol.norm <= 1e-15
    np.testing.assert_allclose(sol.lam, [1 / 3, 2 / 3])


def test_three_objectives_against_grid(rng):
    for _ in range(100):
        G = rng.normal(size=(3, 2))
        sol = solve_dual(G)
        assert -sol.theta <= grid_min_three(G) + 1e-5


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 5)), elements=finite))
def test_kkt_and_strong_duality(G):
    sol = solve_dual(G)
    scale = max(1.0, float(np.max(np.linalg.norm(G, axis=1))) ** 2)
    assert kkt_residual(G, sol) <= 1e-8 * scale
    assert sol.theta == pytest.approx(-0.5 * sol.norm**2, abs=1e-10 * scale)
    assert sol.lam.min() >= 0.0
    assert sol.lam.sum() == pytest.approx(1.0, abs=1e-12)


@given(arrays(np.float64, st.tuples(st.integers(3, 6), st.integers(1, 4)), elements=finite))
def test_direction_is_weighted_sum(G):
    sol = solve_dual(G)
    np.testing.assert_allclose(sol.direction, direction_from_weights(G, sol.lam), atol=1e-12 * (1 + np.abs(G).max()))


def test_active_set_contains_weighted_objectives(rng):
    for _ in range(100):
        G = rng.normal(size=(4, 3))
        sol = solve_dual(G)
        assert set(np.flatnonzero(sol.lam > WEIGHT_TOL)) <= set(sol.active)
        slopes = G @ sol.direction
        for i in sol.active:
            assert slopes[i] == pytest.approx(sol.t, abs=1e-8 * max(1.0, sol.norm**2))


def test_badly_scaled_rows(rng):
    # gradient norms spread over ten orders of magnitude
    for _ in range(300):
        m, n = rng.integers(3, 7), rng.integers(1, 6)
        G = rng.normal(size=(m, n)) * np.exp(rng.normal(size=(m, 1)) * 4)
        sol = solve_dual(G)
        norms = np.linalg.norm(G, axis=1)
        assert kkt_residual(G, sol) <= 1e-9 * max(1.0, norms.max() * (sol.lam @ norms))


def test_huge_and_tiny_gradient_pair_in_three_objectives():
    G = np.array([[-4473.0, 0.0, 0.0], [1.19e-4, -5.97e-5, 0.0], [0.0, -0.509, 0.509]])
    sol = solve_dual(G)
    slopes = G @ sol.direction
    assert np.all(slopes <= sol.t + 1e-12)


def test_warm_start_does_not_change_the_answer(rng):
    for _ in range(50):
        G = rng.normal(size=(5, 3))
        cold = solve_dual(G)
        warm = solve_dual(G, warm_start=rng.dirichlet(np.ones(5)))
        np.testing.assert_allclose(warm.direction, cold.direction, atol=1e-10)


def test_scaling_one_gradient_up_never_shrinks_direction(rng):
    for _ in range(1000):
        m, n = rng.integers(2, 5), rng.integers(1, 4)
        G = rng.normal(size=(m, n))
        k1 = rng.uniform(0.1, 10)
        k2 = k1 * rng.uniform(1, 10)
        G1, G2 = G.copy(), G.copy()
        G1[-1] *= k1
        G2[-1] *= k2
        s1, s2 = solve_dual(G1), solve_dual(G2)
        assert s1.norm <= s2.norm + 1e-10
        assert s1.t >= s2.t - 1e-10


def test_linear_objective_influence_vanishes_at_k29():
    # f1 = 5x1^2 + 10x2^2, f2 = 2(x1-2)^2 + 5x2^2, f3 = -x1 at x = (1, -1)
    g1, g2, g3 = np.array([10.0, -20.0]), np.array([-4.0, -10.0]), np.array([-1.0, 0.0])
    without = solve_dual(np.vstack([g1, g2]))
    scaled = solve_dual(np.vstack([g1, g2, 29 * g3]))
    np.testing.assert_allclose(scaled.direction, without.direction, rtol=1e-6)
    np.testing.assert_allclose(without.direction, [4.0, 10.0])
    # with a smaller multiplier the linear objective still bends the direction
    assert np.linalg.norm(solve_dual(np.vstack([g1, g2, 5 * g3])).direction - without.direction) > 1e-2


def test_non_convergence_carries_best_iterate():
    G = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0], [2.0, 0.5]])
    with pytest.raises(DualNonConvergence) as info:
        solve_dual(G, max_fw_iters=0, warm_start=np.array([0.0, 0.0, 0.0, 1.0]))
    assert info.value.solution.lam.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("G", [np.zeros((0, 2)), np.array([[np.nan, 1.0], [0.0, 1.0]])])
def test_rejects_bad_input(G):
    with pytest.raises(ValueError):
        solve_dual(G)


def test_is_critical():
    assert is_critical(solve_dual(np.array([[1.0], [-1.0]])), 1e-4)
    assert not is_critical(solve_dual(np.array([[1.0], [2.0]])), 1e-4)
