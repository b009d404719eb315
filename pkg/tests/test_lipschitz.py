"""Product bound and empirical Lipschitz sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hozog import (
    InnerSolver,
    InvalidConfig,
    StepJacobians,
    empirical_lipschitz,
    function_objective,
    lipschitz_product_bound,
    synthetic_step_jacobians,
)
from hozog.problems import make_synthetic


class TestProductBound:
    def test_zero_horizon_reduces_to_outer_term(self):
        jacs = StepJacobians(a=np.array([0.8]), b=np.array([1.3]))
        assert lipschitz_product_bound(jacs) == pytest.approx(1.3)

    def test_one_step_hand_arithmetic(self):
        # 0.2*0.9 + 0.1 = 0.28
        jacs = StepJacobians(a=np.array([0.5, 0.9]), b=np.array([0.2, 0.1]))
        assert lipschitz_product_bound(jacs) == pytest.approx(0.28)

    def test_unit_contraction_degenerates_linearly(self):
        for horizon in (0, 3, 10, 50):
            jacs = StepJacobians(a=np.ones(horizon + 1), b=np.full(horizon + 1, 0.7))
            assert lipschitz_product_bound(jacs) == pytest.approx((horizon + 1) * 0.7)

    @given(
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=0, max_value=2**31 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_every_entry(self, length, seed):
        rng = np.random.default_rng(seed)
        a = rng.random(length) * 1.5
        b = rng.random(length) * 2.0
        base = lipschitz_product_bound(StepJacobians(a=a, b=b))
        for i in range(length):
            for which in ("a", "b"):
                bumped_a, bumped_b = a.copy(), b.copy()
                (bumped_a if which == "a" else bumped_b)[i] += 0.25
                bumped = lipschitz_product_bound(StepJacobians(a=bumped_a, b=bumped_b))
                assert bumped >= base - 1e-12

    def test_linear_growth_when_contractive(self):
        # with every |A| <= 1 the bound grows at most linearly in T
        def bound_at(horizon):
            a = np.full(horizon + 1, 0.95)
            b = np.full(horizon + 1, 0.4)
            return lipschitz_product_bound(StepJacobians(a=a, b=b))

        t0, t1 = 10, 100
        assert bound_at(t1) <= bound_at(t0) + (t1 - t0) * 0.4 + 1e-9

    def test_rejects_negative_entries(self):
        with pytest.raises(InvalidConfig):
            StepJacobians(a=np.array([-0.1]), b=np.array([1.0]))


class TestSyntheticStepJacobians:
    def test_point_box_hand_value(self):
        jacs = synthetic_step_jacobians(3.0, 1.0, eta=0.1, t_inner=5, lambda_box=(0.0, 0.0))
        np.testing.assert_allclose(jacs.a[:-1], 0.7, atol=1e-12)

    def test_frozen_solver_leaves_outer_term(self):
        jacs = synthetic_step_jacobians(3.0, 1.0, eta=0.0, t_inner=4, lambda_box=(-1.0, 1.0))
        np.testing.assert_allclose(jacs.a[:-1], 1.0)
        np.testing.assert_allclose(jacs.b[:-1], 0.0)
        assert lipschitz_product_bound(jacs) == pytest.approx(jacs.b[-1])
        assert jacs.b[-1] == 0.0  # outer loss does not touch lam directly

    def test_hyper_jacobian_envelope(self):
        jacs = synthetic_step_jacobians(3.0, 1.0, eta=0.1, t_inner=3, lambda_box=(0.0, 0.0))
        # |B| <= 2 * eta * e^lam * w_env = 2*0.1*1*3
        np.testing.assert_allclose(jacs.b[:-1], 0.6, atol=1e-12)

    def test_expansive_step_rejected(self):
        with pytest.raises(InvalidConfig):
            synthetic_step_jacobians(3.0, 1.0, eta=0.5, t_inner=3, lambda_box=(0.0, 2.0))


class TestEmpiricalLipschitz:
    def test_constant_oracle(self):
        spec = function_objective(lambda lam: 4.2, p=2)
        report = empirical_lipschitz(spec, [[-1, 1], [-1, 1]], n_pairs=50, seed=0)
        assert report.empirical_max_ratio == 0.0
        assert report.samples == 50

    def test_linear_oracle_exact_slope(self):
        spec = function_objective(lambda lam: float(2.0 * lam[0]), p=1)
        report = empirical_lipschitz(spec, [[0.0, 1.0]], n_pairs=200, seed=1)
        assert report.empirical_max_ratio == pytest.approx(2.0, rel=1e-9)

    def test_deterministic_per_seed(self):
        spec = make_synthetic(3.0, 1.0)
        a = empirical_lipschitz(spec, [[-2, 2]], n_pairs=300, seed=7)
        b = empirical_lipschitz(spec, [[-2, 2]], n_pairs=300, seed=7)
        assert a.empirical_max_ratio == b.empirical_max_ratio

    def test_dominated_by_product_bound(self):
        eta, steps = 0.1, 30
        spec = make_synthetic(3.0, 1.0, inner=InnerSolver(steps=steps, lr=eta))
        report = empirical_lipschitz(spec, [[-2.0, 2.0]], n_pairs=500, seed=3)
        bound = lipschitz_product_bound(
            synthetic_step_jacobians(3.0, 1.0, eta=eta, t_inner=steps, lambda_box=(-2.0, 2.0))
        )
        assert report.empirical_max_ratio <= bound

    def test_worker_fanout_same_answer(self):
        spec = make_synthetic(3.0, 1.0, inner=InnerSolver(steps=20, lr=0.1))
        a = empirical_lipschitz(spec, [[-1, 1]], n_pairs=100, seed=5, max_workers=1)
        b = empirical_lipschitz(spec, [[-1, 1]], n_pairs=100, seed=5, max_workers=4)
        assert a.empirical_max_ratio == b.empirical_max_ratio
