import math

import numpy as np
import pytest

from curvlab.divergences import tv_grid
from curvlab.kernels import (
    GridOperator,
    KernelSpec,
    backward_grid_law,
    gaussian_pushforward,
    grid_pushforward,
    run_chain,
    sample_batch,
    stationary_gaussian,
    step_sample,
)
from curvlab.model import (
    EmpiricalMeasure,
    GaussianMeasure,
    dirac,
    grid_from_gaussian,
    quadratic_potential,
)

QUAD = quadratic_potential(1.0, dim=1)
SIN = quadratic_potential(1.0, dim=1, h_kind="sinusoid", h_amp=0.5, h_freq=1.0)


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(kind="nope", h=0.1)
    with pytest.raises(ValueError):
        KernelSpec(kind="lmc", h=0.1)          # potential required
    with pytest.raises(ValueError):
        KernelSpec(kind="lmc", h=2.0, potential=QUAD)   # h > 1/beta
    with pytest.raises(ValueError):
        KernelSpec(kind="ou_exact", h=1.0, potential=SIN)
    with pytest.raises(ValueError):
        KernelSpec(kind="gaussian", h=0.0)


def test_grad_step_examples():
    flat = quadratic_potential(0.0, dim=1)
    k0 = KernelSpec(kind="grad_step", h=0.7, potential=flat)
    assert step_sample(k0, [1.3], 0)[0] == pytest.approx(1.3)
    k = KernelSpec(kind="grad_step", h=0.1, potential=QUAD)
    assert step_sample(k, [1.0], 0)[0] == pytest.approx(0.9)
    with pytest.raises(ValueError):
        sample_batch(k, np.array([[np.inf]]), 0)


def test_backward_sampler_moments_quadratic():
    # completing the square: z | y ~ N(y/(1+a h), h/(1+a h))
    h, y, n = 1.0, 2.0, 100_000
    kernel = KernelSpec(kind="ps_backward", h=h, potential=QUAD)
    cloud = run_chain(kernel, EmpiricalMeasure(np.full((n, 1), y)), 1,
                      np.random.default_rng(101))
    m_exp, v_exp = y / 2.0, h / 2.0
    se_mean = math.sqrt(v_exp / n)
    se_var = v_exp * math.sqrt(2.0 / (n - 1))
    assert abs(cloud.points.mean() - m_exp) <= 4 * se_mean
    assert abs(cloud.points.var() - v_exp) <= 4 * se_var


def test_gaussian_pushforward_examples():
    g = gaussian_pushforward(KernelSpec(kind="gaussian", h=1.0), GaussianMeasure((0.0,), (1.0,)))
    assert g.mean[0] == 0.0 and g.var[0] == pytest.approx(2.0)

    lmc = KernelSpec(kind="lmc", h=0.1, potential=QUAD)
    img = gaussian_pushforward(lmc, dirac(2.0))
    assert img.mean[0] == pytest.approx(1.8)
    assert img.var[0] == pytest.approx(0.2)

    ou = KernelSpec(kind="ou_exact", h=80.0, potential=QUAD)
    inf = gaussian_pushforward(ou, GaussianMeasure((5.0,), (7.0,)))
    assert inf.mean[0] == pytest.approx(0.0, abs=1e-12)
    assert inf.var[0] == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(ValueError):
        gaussian_pushforward(KernelSpec(kind="lmc", h=0.1, potential=SIN), dirac(0.0))


def test_ps_pushforward_matches_two_stage_composition():
    ps = KernelSpec(kind="ps", h=0.8, potential=QUAD)
    fwd = KernelSpec(kind="ps_forward", h=0.8)
    bwd = KernelSpec(kind="ps_backward", h=0.8, potential=QUAD)
    g = GaussianMeasure((1.0,), (0.5,))
    direct = gaussian_pushforward(ps, g)
    staged = gaussian_pushforward(bwd, gaussian_pushforward(fwd, g))
    assert direct.mean[0] == pytest.approx(staged.mean[0], abs=1e-14)
    assert direct.var[0] == pytest.approx(staged.var[0], abs=1e-14)


def test_grid_pushforward_gaussian_matches_exact():
    g = GaussianMeasure((0.0,), (0.8,))
    rho = grid_from_gaussian(g, -14, 14, 8192)
    out = grid_pushforward(KernelSpec(kind="gaussian", h=0.5), rho)
    exact = gaussian_pushforward(KernelSpec(kind="gaussian", h=0.5), g)
    assert np.max(np.abs(out.values - exact.pdf_1d(out.x))) <= 1e-6


def test_grid_pushforward_grad_step_identity_when_flat():
    flat = quadratic_potential(0.0, dim=1)
    rho = grid_from_gaussian(GaussianMeasure((0.0,), (1.0,)), -13, 13, 4096)
    out = grid_pushforward(KernelSpec(kind="grad_step", h=0.3, potential=flat), rho)
    assert np.max(np.abs(out.values - rho.values)) <= 1e-12


def test_grid_pushforward_lmc_50_steps():
    g = GaussianMeasure((0.0,), (1.0,))
    kernel = KernelSpec(kind="lmc", h=0.1, potential=QUAD)
    rho = grid_from_gaussian(g, -13, 13, 8192)
    op = GridOperator(kernel, -13, 13, 8192)
    sup = 0.0
    for _ in range(50):
        rho = op.apply(rho)
        g = gaussian_pushforward(kernel, g)
        sup = max(sup, float(np.max(np.abs(rho.values - g.pdf_1d(rho.x)))))
    assert sup <= 1e-5


def test_grid_pushforward_ps_matches_exact_gaussian():
    kernel = KernelSpec(kind="ps", h=1.0, potential=QUAD)
    g = GaussianMeasure((1.5,), (0.7,))
    rho = grid_from_gaussian(g, -14, 16, 8192)
    out = GridOperator(kernel, -14, 16, 8192).apply(rho)
    exact = gaussian_pushforward(kernel, g)
    assert np.max(np.abs(out.values - exact.pdf_1d(out.x))) <= 1e-6


def test_grid_mass_leak_detected():
    rho = grid_from_gaussian(GaussianMeasure((0.0,), (1.0,)), -3, 3, 512)
    with pytest.raises(ValueError, match="mass leak"):
        grid_pushforward(KernelSpec(kind="gaussian", h=4.0), rho)


def test_run_chain_examples():
    rng = np.random.default_rng(7)
    init = EmpiricalMeasure(np.arange(5.0)[:, None])
    out = run_chain(KernelSpec(kind="gaussian", h=1.0), init, 0, rng)
    np.testing.assert_array_equal(out.points, init.points)

    # lmc cloud mean tracks the exact recursion
    kernel = KernelSpec(kind="lmc", h=0.1, potential=QUAD)
    n = 100_000
    cloud = run_chain(kernel, GaussianMeasure((0.0,), (1.0,)), 100, rng, n_particles=n)
    g = GaussianMeasure((0.0,), (1.0,))
    for _ in range(100):
        g = gaussian_pushforward(kernel, g)
    assert abs(cloud.points.mean() - g.mean[0]) <= 4 * math.sqrt(g.var[0] / n)
    assert abs(cloud.points.var() - g.var[0]) <= 4 * g.var[0] * math.sqrt(2.0 / (n - 1))


def test_ps_chain_variance_matches_grid_oracle():
    kernel = KernelSpec(kind="ps", h=1.0, potential=QUAD)
    n = 100_000
    cloud = run_chain(kernel, dirac(0.0), 1, np.random.default_rng(11), n_particles=n)
    # grid oracle: exact forward image of a point mass, then the backward matrix
    fwd = grid_from_gaussian(GaussianMeasure((0.0,), (1.0,)), -14, 14, 8192)
    rho = GridOperator(KernelSpec(kind="ps_backward", h=1.0, potential=QUAD),
                       -14, 14, 8192).apply(fwd)
    v = rho.var()
    assert abs(cloud.points.var() - v) <= 4 * v * math.sqrt(2.0 / (n - 1))


@pytest.mark.parametrize("kind,h", [("gaussian", 0.7), ("lmc", 0.2),
                                    ("ps", 0.9), ("ou_exact", 0.5)])
def test_sampler_matches_gaussian_oracle_moments(kind, h):
    kernel = KernelSpec(kind=kind, h=h, potential=QUAD)
    start = GaussianMeasure((1.0,), (0.5,))
    n = 100_000
    cloud = run_chain(kernel, start, 1, np.random.default_rng(13), n_particles=n)
    exact = gaussian_pushforward(kernel, start)
    assert abs(cloud.points.mean() - exact.mean[0]) <= 4 * math.sqrt(exact.var[0] / n)
    assert abs(cloud.points.var() - exact.var[0]) <= 4 * exact.var[0] * math.sqrt(2.0 / (n - 1))


def test_backward_grid_law_ks_against_own_cdf():
    n = 100_000
    law = backward_grid_law(SIN, 0.5, 1.3)
    draws = law.sample(np.random.default_rng(17), n)
    sorted_draws = np.sort(draws)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    cdf_vals = law.cdf(sorted_draws)
    ks = max(np.max(np.abs(cdf_vals - emp_hi)), np.max(np.abs(cdf_vals - emp_lo)))
    assert ks <= 1.63 / math.sqrt(n)


def test_rejection_sampler_agrees_with_grid_law():
    # the two backward-step routes target the same law
    n = 100_000
    kernel = KernelSpec(kind="ps_backward", h=0.5, potential=SIN)
    cloud = run_chain(kernel, EmpiricalMeasure(np.full((n, 1), 1.3)), 1,
                      np.random.default_rng(19))
    law = backward_grid_law(SIN, 0.5, 1.3)
    sorted_draws = np.sort(cloud.points[:, 0])
    emp_hi = np.arange(1, n + 1) / n
    ks = float(np.max(np.abs(law.cdf(sorted_draws) - emp_hi)))
    assert ks <= 1.63 / math.sqrt(n)


def test_backward_rejection_d2_quadratic_moments():
    pot = quadratic_potential(1.0, dim=2)
    kernel = KernelSpec(kind="ps_backward", h=0.5, potential=pot)
    n = 50_000
    y = np.array([1.0, -2.0])
    cloud = run_chain(kernel, EmpiricalMeasure(np.repeat(y[None, :], n, axis=0)), 1,
                      np.random.default_rng(23))
    m_exp = y / 1.5
    v_exp = 0.5 / 1.5
    for i in range(2):
        assert abs(cloud.points[:, i].mean() - m_exp[i]) <= 4 * math.sqrt(v_exp / n)
        assert abs(cloud.points[:, i].var() - v_exp) <= 4 * v_exp * math.sqrt(2.0 / (n - 1))


def test_determinism_same_seed_bit_identical():
    kernel = KernelSpec(kind="ps", h=0.5, potential=SIN)
    a = run_chain(kernel, GaussianMeasure((0.0,), (1.0,)), 3,
                  np.random.default_rng(31), n_particles=5000)
    b = run_chain(kernel, GaussianMeasure((0.0,), (1.0,)), 3,
                  np.random.default_rng(31), n_particles=5000)
    np.testing.assert_array_equal(a.points, b.points)


def test_stationary_gaussian():
    g = stationary_gaussian(quadratic_potential(2.0, dim=1))
    assert g.var[0] == pytest.approx(0.5)
    ou = KernelSpec(kind="ou_exact", h=0.3, potential=quadratic_potential(2.0, dim=1))
    img = gaussian_pushforward(ou, g)
    assert img.var[0] == pytest.approx(0.5, abs=1e-14)
    assert img.mean[0] == pytest.approx(0.0, abs=1e-14)
