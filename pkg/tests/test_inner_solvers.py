"""Inner-solver behaviour: hand-checked iterations, continuity, divergence."""

import numpy as np
import pytest

from hozog import (
    InnerSolver,
    InvalidConfig,
    NonFiniteIterate,
    adam_solve,
    gd_solve,
    trajectory,
)
from hozog.data_io import random_classification_dataset, split_2_1_1
from hozog.problems import LogRegProblem, SyntheticBilevel


def quad_grad(w, lam):
    # L(w) = 0.5*(w - 3)^2
    return w - 3.0


class TestConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(InvalidConfig):
            InnerSolver(steps=-1, lr=0.1)
        with pytest.raises(InvalidConfig):
            InnerSolver(steps=1, lr=0.0)
        with pytest.raises(InvalidConfig):
            InnerSolver(steps=1, lr=0.1, variant="lbfgs")

    def test_missing_w0_is_an_error(self):
        with pytest.raises(InvalidConfig):
            gd_solve(quad_grad, InnerSolver(steps=1, lr=0.5), np.zeros(1))


class TestGdSolve:
    def test_zero_steps_returns_w0(self):
        alg = InnerSolver(steps=0, lr=0.5, w0=np.array([0.0]))
        np.testing.assert_array_equal(gd_solve(quad_grad, alg, np.zeros(1)), [0.0])

    def test_hand_iteration(self):
        # w <- w + 0.5*(3 - w): 0 -> 1.5 -> 2.25
        one = gd_solve(quad_grad, InnerSolver(steps=1, lr=0.5, w0=np.array([0.0])), np.zeros(1))
        two = gd_solve(quad_grad, InnerSolver(steps=2, lr=0.5, w0=np.array([0.0])), np.zeros(1))
        assert one[0] == pytest.approx(1.5)
        assert two[0] == pytest.approx(2.25)

    def test_synthetic_inner_reaches_stationary_point(self):
        prob = SyntheticBilevel(c=3.0, w_star=1.0)
        alg = InnerSolver(steps=500, lr=0.1, w0=np.zeros(1))
        w = gd_solve(prob.inner_loss_grad, alg, np.array([0.0]))
        assert abs(w[0] - 1.0) < 1e-6

    def test_exact_gradient_call_count(self):
        calls = {"n": 0}

        def counting(w, lam):
            calls["n"] += 1
            return w - 3.0

        gd_solve(counting, InnerSolver(steps=17, lr=0.1, w0=np.zeros(1)), np.zeros(1))
        assert calls["n"] == 17

    def test_monotone_descent_on_stable_quadratic(self):
        alg = InnerSolver(steps=40, lr=0.5, w0=np.array([10.0]))
        path = trajectory(quad_grad, alg, np.zeros(1))
        losses = [0.5 * (w[0] - 3.0) ** 2 for w in path]
        assert all(b <= a for a, b in zip(losses, losses[1:]))

    def test_divergence_raises_with_step_index(self):
        # lr = 3 on unit curvature: multiplier -2, exponential blow-up
        alg = InnerSolver(steps=10_000, lr=3.0, w0=np.array([1.0]))
        with pytest.raises(NonFiniteIterate) as excinfo:
            gd_solve(quad_grad, alg, np.zeros(1))
        assert excinfo.value.t is not None and excinfo.value.t > 0


class TestAdamSolve:
    def test_zero_steps_returns_w0(self):
        alg = InnerSolver(steps=0, lr=0.1, variant="adam", w0=np.array([1.0]))
        np.testing.assert_array_equal(adam_solve(lambda w, lam: w, alg, np.zeros(1)), [1.0])

    def test_first_step_hand_value(self):
        # g=1, m_hat=1, v_hat=1 => w1 = 1 - 0.1/(1 + 1e-8) ~ 0.9
        alg = InnerSolver(steps=1, lr=0.1, variant="adam", w0=np.array([1.0]))
        w = adam_solve(lambda w, lam: w, alg, np.zeros(1))
        assert w[0] == pytest.approx(0.9, abs=1e-8)

    def test_long_run_contracts_quadratic(self):
        alg = InnerSolver(steps=2000, lr=0.1, variant="adam", w0=np.array([1.0]))
        w = adam_solve(lambda w, lam: w, alg, np.zeros(1))
        assert abs(w[0]) <= 1e-3


class TestTrajectory:
    def test_zero_steps(self):
        alg = InnerSolver(steps=0, lr=0.5, w0=np.array([0.0]))
        path = trajectory(quad_grad, alg, np.zeros(1))
        assert len(path) == 1
        np.testing.assert_array_equal(path[0], [0.0])

    def test_hand_iteration_path(self):
        alg = InnerSolver(steps=2, lr=0.5, w0=np.array([0.0]))
        path = trajectory(quad_grad, alg, np.zeros(1))
        np.testing.assert_allclose([w[0] for w in path], [0.0, 1.5, 2.25])

    @pytest.mark.parametrize("variant", ["gd", "adam"])
    def test_last_element_bitwise_equals_solve(self, variant):
        prob = SyntheticBilevel(c=3.0, w_star=1.0)
        alg = InnerSolver(steps=137, lr=0.07, variant=variant, w0=np.array([0.25]))
        path = trajectory(prob.inner_loss_grad, alg, np.array([0.4]))
        if variant == "gd":
            direct = gd_solve(prob.inner_loss_grad, alg, np.array([0.4]))
        else:
            direct = adam_solve(prob.inner_loss_grad, alg, np.array([0.4]))
        np.testing.assert_array_equal(path[-1], direct)
        assert len(path) == 138


class TestSolverContinuity:
    """||A(lam + d) - A(lam)|| <= C * d with C from the largest probe."""

    def _ratios(self, loss_grad, alg, lam0, d):
        base = gd_solve(loss_grad, alg, lam0)
        out = []
        for delta in (1e-2, 1e-3, 1e-4):
            shifted = lam0.copy()
            shifted[0] += delta
            moved = gd_solve(loss_grad, alg, shifted)
            out.append(np.linalg.norm(moved - base) / delta)
        return out

    def test_synthetic(self):
        prob = SyntheticBilevel(c=3.0, w_star=1.0)
        alg = InnerSolver(steps=120, lr=0.1, w0=np.zeros(1))
        ratios = self._ratios(prob.inner_loss_grad, alg, np.array([0.2]), 1)
        c = ratios[0]
        assert all(r <= 2.0 * c + 1e-9 for r in ratios)

    def test_logreg(self):
        ds = random_classification_dataset(160, 8, seed=3)
        train, val, test = split_2_1_1(ds, seed=0)
        prob = LogRegProblem.from_datasets(train, val, test)
        alg = InnerSolver(steps=50, lr=0.02, w0=np.zeros(prob.d))
        ratios = self._ratios(prob.inner_loss_grad, alg, np.array([0.0]), prob.d)
        c = ratios[0]
        assert all(r <= 2.0 * c + 1e-9 for r in ratios)

    def test_determinism_bitwise(self):
        prob = SyntheticBilevel(c=3.0, w_star=1.0)
        alg = InnerSolver(steps=64, lr=0.1, w0=np.zeros(1))
        a = gd_solve(prob.inner_loss_grad, alg, np.array([0.3]))
        b = gd_solve(prob.inner_loss_grad, alg, np.array([0.3]))
        np.testing.assert_array_equal(a, b)
