import math

import numpy as np
import pytest

from curvlab.divergences import tv_grid
from curvlab.harness import (
    grid_fixed_point,
    mixing_curve,
    stationarity_check,
    verify_backward_winfty,
    verify_curvature,
    verify_def_t2_ou,
    verify_def_t2_ps_grid,
    verify_rte_ou,
    verify_rte_ps_grid,
)
from curvlab.kernels import KernelSpec, stationary_gaussian
from curvlab.model import (
    GaussianMeasure,
    dirac,
    grid_from_gaussian,
    quadratic_potential,
)

QUAD = quadratic_potential(1.0, dim=1)
SIN = quadratic_potential(1.0, dim=1, h_kind="sinusoid", h_amp=0.5, h_freq=1.0)


class TestCurvature:
    def test_exact_affine_path_is_tight(self):
        rep = verify_curvature("lmc", QUAD, 0.1, [([0.0], [2.0]), ([1.0], [1.0])],
                               seed=1)
        assert rep.all_passed
        # H = 0: the defect term vanishes and the bound is an equality
        assert rep.cases[0].margin == pytest.approx(0.0, abs=1e-12)
        assert rep.cases[1].lhs == 0.0

    def test_monte_carlo_path_perturbed(self):
        pairs = [(np.array([-1.0]), np.array([2.0])), (np.array([0.3]), np.array([0.3]))]
        for kind in ("lmc", "ps"):
            rep = verify_curvature(kind, SIN, 0.5, pairs, n_samples=20_000, seed=3)
            assert rep.all_passed
            assert rep.cases[1].lhs <= rep.notes["M"] + 3 * rep.cases[1].std_error

    def test_exact_ps_path(self):
        rep = verify_curvature("ps", QUAD, 1.0, [([0.0], [3.0])], seed=5)
        assert rep.all_passed
        assert rep.cases[0].lhs == pytest.approx(1.5)   # K = 1/2, M = 0


class TestBackwardWinfty:
    def test_trivial_and_quadratic(self):
        rep = verify_backward_winfty(QUAD, 0.5, [(1.0, 1.0), (0.0, 1.5)],
                                     n_samples=20_000, seed=7)
        assert rep.all_passed
        # equal-variance translate: true W_inf is the mean gap, below the bound
        mean_gap = 1.5 / (1 + 1 * 0.5)
        assert rep.cases[1].lhs == pytest.approx(mean_gap, abs=0.05)

    def test_sinusoid_pairs(self):
        pairs = [(0.0, 1.0), (-2.0, 2.0), (0.5, 0.7)]
        rep = verify_backward_winfty(SIN, 0.5, pairs, n_samples=20_000, seed=9)
        assert rep.all_passed


class TestDefT2:
    def test_ou_trivial_and_random(self):
        rep = verify_def_t2_ou(alpha=1.0, T=1.0, x0=3.0, n_test=50, seed=11)
        assert rep.all_passed
        assert rep.notes["B"] == 0.0

    def test_ps_grid(self):
        rep = verify_def_t2_ps_grid(QUAD, 1.0, 3, GaussianMeasure((0.5,), (0.8,)),
                                    n_test=20, seed=13, n_grid=4096)
        assert rep.all_passed

    def test_ps_grid_perturbed(self):
        rep = verify_def_t2_ps_grid(SIN, 1.0, 2, GaussianMeasure((0.0,), (1.0,)),
                                    n_test=10, seed=15, n_grid=4096)
        assert rep.all_passed


class TestRte:
    def test_heat_flow_tightness(self):
        rep = verify_rte_ou(alpha=0.0, T=0.25, pairs=[(dirac(0.0), dirac(1.0))], seed=17)
        case = rep.cases[0]
        assert case.lhs == pytest.approx(1.0, abs=1e-12)
        assert case.rhs == pytest.approx(1.0, abs=1e-12)
        assert rep.all_passed

    def test_ou_strict(self):
        for t in (0.1, 1.0):
            rep = verify_rte_ou(alpha=1.0, T=t, n_pairs=10, seed=19)
            assert rep.all_passed

    def test_ps_grid(self):
        pairs = [(GaussianMeasure((-0.5,), (1.0,)), GaussianMeasure((0.7,), (1.4,)))]
        rep = verify_rte_ps_grid(SIN, 1.0, 2, pairs, n_grid=4096, seed=21)
        assert rep.all_passed


class TestMixing:
    def test_init_equals_target(self):
        pot = quadratic_potential(1.0, dim=1)
        target = grid_from_gaussian(stationary_gaussian(pot), -12, 12, 4096)
        kernel = KernelSpec(kind="ou_exact", h=0.1, potential=pot)
        curve = mixing_curve(kernel, target, target, max_steps=5, eps_list=[0.25, 0.01])
        assert np.all(curve.tv <= 1e-3)
        assert curve.t_mix[0.25] == 0.0
        assert curve.t_mix[0.01] == 0.0

    def test_ou_tv_monotone_and_window(self):
        pot = quadratic_potential(1.0, dim=1)
        target = stationary_gaussian(pot)
        kernel = KernelSpec(kind="ou_exact", h=0.05, potential=pot)
        init = GaussianMeasure((4.0,), (0.25,))
        curve = mixing_curve(kernel, init, target, max_steps=200, eps_list=[0.25])
        assert np.all(np.diff(curve.tv) <= 1e-9)
        assert curve.reached
        assert curve.w_mix[0.25] >= 0.0
        assert curve.continuous_time

    def test_max_steps_reported_not_fatal(self):
        pot = quadratic_potential(1.0, dim=1)
        target = stationary_gaussian(pot)
        kernel = KernelSpec(kind="ou_exact", h=0.01, potential=pot)
        curve = mixing_curve(kernel, GaussianMeasure((6.0,), (0.01,)), target,
                             max_steps=5, eps_list=[0.25])
        assert not curve.reached
        assert curve.t_mix == {}


class TestStationarity:
    def test_ou_stationary(self):
        pot = quadratic_potential(1.0, dim=1)
        target = grid_from_gaussian(stationary_gaussian(pot), -12, 12, 4096)
        kernel = KernelSpec(kind="ou_exact", h=0.3, potential=pot)
        assert stationarity_check(kernel, target) <= 1e-9

    def test_ps_boltzmann_stationary(self):
        from curvlab.kernels import _u_value_1d
        from curvlab.model import GridDensity

        x = np.linspace(-12, 12, 4096)
        boltz = GridDensity(lo=-12, hi=12, values=np.exp(-_u_value_1d(SIN, x)))
        kernel = KernelSpec(kind="ps", h=1.0, potential=SIN)
        assert stationarity_check(kernel, boltz) <= 1e-3

    def test_lmc_bias_is_order_h(self):
        from curvlab.kernels import _u_value_1d
        from curvlab.model import GridDensity

        x = np.linspace(-12, 12, 4096)
        boltz = GridDensity(lo=-12, hi=12, values=np.exp(-_u_value_1d(QUAD, x)))
        defect_big = stationarity_check(KernelSpec(kind="lmc", h=0.4, potential=QUAD), boltz)
        defect_small = stationarity_check(KernelSpec(kind="lmc", h=0.05, potential=QUAD), boltz)
        assert 0 < defect_small < defect_big

    def test_grid_fixed_point_is_stationary(self):
        from curvlab.kernels import _u_value_1d
        from curvlab.model import GridDensity

        x = np.linspace(-12, 12, 2048)
        boltz = GridDensity(lo=-12, hi=12, values=np.exp(-_u_value_1d(QUAD, x)))
        kernel = KernelSpec(kind="lmc", h=0.25, potential=QUAD)
        fixed = grid_fixed_point(kernel, boltz, tol=1e-10)
        assert stationarity_check(kernel, fixed) <= 1e-9
        # the Euler-Maruyama fixed point is wider than the target law
        assert fixed.var() > boltz.var()


def test_reports_are_deterministic():
    pairs = [(np.array([0.0]), np.array([1.0]))]
    a = verify_curvature("ps", SIN, 0.5, pairs, n_samples=5000, seed=23)
    b = verify_curvature("ps", SIN, 0.5, pairs, n_samples=5000, seed=23)
    assert a.cases == b.cases
    c = verify_curvature("ps", SIN, 0.5, pairs, n_samples=5000, seed=24)
    assert c.cases[0].lhs != a.cases[0].lhs
