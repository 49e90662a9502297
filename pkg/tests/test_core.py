import numpy as np
import pytest

from bbdmo import Evaluator, FevalCounter, Problem, check_jacobian_fd, evaluate, jacobian
from bbdmo.core import evaluation


def _quadratic(n=2):
    return Problem(
        "quad",
        n,
        2,
        -np.ones(n),
        np.ones(n),
        lambda x: np.array([x @ x, (x - 1) @ (x - 1)]),
        lambda x: np.vstack([2 * x, 2 * (x - 1)]),
    )


def test_problem_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        Problem("p", 0, 1, np.zeros(0), np.zeros(0), None, None)
    with pytest.raises(ValueError):
        Problem("p", 1, 0, np.zeros(1), np.ones(1), None, None)


def test_problem_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        Problem("p", 2, 1, np.ones(2), np.zeros(2), None, None)


def test_bounds_are_read_only():
    p = _quadratic()
    with pytest.raises(ValueError):
        p.lower[0] = 5.0


def test_values_and_jacobian_shapes_are_checked():
    bad = Problem("bad", 2, 2, -np.ones(2), np.ones(2), lambda x: np.zeros(3), lambda x: np.zeros((3, 2)))
    with pytest.raises(ValueError):
        bad.values(np.zeros(2))
    with pytest.raises(ValueError):
        bad.jacobian(np.zeros(2))


def test_evaluator_counts_only_value_calls():
    counter = FevalCounter()
    ev = Evaluator(_quadratic(), counter)
    x = np.array([0.5, -0.5])
    ev(x)
    ev(x)
    ev.jacobian(x)
    assert ev.fevals == 2
    assert counter.count == 2


def test_evaluate_helpers_agree():
    p = _quadratic()
    x = np.array([0.25, 0.75])
    counter = FevalCounter()
    F = evaluate(p, x, counter)
    np.testing.assert_array_equal(F, p.values(x))
    assert counter.count == 1
    np.testing.assert_array_equal(jacobian(p, x), p.jacobian(x))
    e = evaluation(p, x)
    assert e.finite
    np.testing.assert_array_equal(e.values, F)


def test_fd_check_accepts_correct_jacobian(rng):
    p = _quadratic(3)
    for _ in range(5):
        assert check_jacobian_fd(p, rng.uniform(-1, 1, 3)) <= 1e-6


def test_fd_check_catches_wrong_jacobian():
    wrong = Problem(
        "wrong", 2, 1, -np.ones(2), np.ones(2), lambda x: np.array([x[0] ** 2]), lambda x: np.array([[x[0], 0.0]])
    )
    assert check_jacobian_fd(wrong, np.array([0.7, 0.1])) > 0.1


def test_fd_check_reports_non_finite_as_inf():
    p = Problem("log", 1, 1, np.zeros(1), np.ones(1), lambda x: np.log(x), lambda x: np.array([1.0 / x]))
    assert check_jacobian_fd(p, np.array([0.0])) == np.inf
