import numpy as np
import pytest

from curvlab.model import (
    EmpiricalMeasure,
    GaussianMeasure,
    GridDensity,
    PotentialSpec,
    grad_h_sup_norm,
    grid_from_gaussian,
    potential_gradient,
    potential_value,
    quadratic_potential,
)


def test_potential_value_examples():
    quad = quadratic_potential(1.0, dim=1)
    assert potential_value(quad, [2.0]) == pytest.approx(2.0, abs=1e-15)

    sin = quadratic_potential(1.0, dim=1, h_kind="sinusoid", h_amp=0.5, h_freq=1.0)
    assert potential_value(sin, [0.0]) == pytest.approx(0.0, abs=1e-15)

    smooth = quadratic_potential(1.0, dim=1, h_kind="smoothed_norm", h_scale=1.0)
    assert potential_value(smooth, [0.0]) == pytest.approx(1.0, abs=1e-15)


def test_gradient_examples():
    quad = quadratic_potential(1.0, dim=1)
    assert potential_gradient(quad, [1.0])[0] == pytest.approx(1.0, abs=1e-15)

    sin = quadratic_potential(1.0, dim=1, h_kind="sinusoid", h_amp=0.5, h_freq=1.0)
    assert potential_gradient(sin, [0.0])[0] == pytest.approx(0.5, abs=1e-15)

    # gradient vanishes at the quadratic minimizer when H = 0
    quad5 = quadratic_potential(2.0, dim=3, center=1.5)
    np.testing.assert_allclose(potential_gradient(quad5, [1.5] * 3), 0.0, atol=1e-15)


def test_grad_h_sup_norm_examples():
    assert grad_h_sup_norm(quadratic_potential(1.0, dim=2)) == 0.0
    sin = quadratic_potential(1.0, dim=1, h_kind="sinusoid", h_amp=0.5, h_freq=1.0)
    assert grad_h_sup_norm(sin) == pytest.approx(0.5)
    smooth = quadratic_potential(1.0, dim=4, h_kind="smoothed_norm", h_scale=2.0)
    assert grad_h_sup_norm(smooth) == pytest.approx(2.0)


SPECS = [
    quadratic_potential(1.0, dim=1),
    quadratic_potential(0.5, dim=3, beta=2.0, center=0.7),
    quadratic_potential(1.0, dim=2, h_kind="sinusoid", h_amp=0.5, h_freq=2.0),
    quadratic_potential(0.8, dim=4, h_kind="smoothed_norm", h_scale=1.3),
]


@pytest.mark.parametrize("spec", SPECS)
def test_gradient_matches_finite_differences(spec):
    rng = np.random.default_rng(11)
    eps = 1e-6
    for _ in range(100):
        x = rng.uniform(-3, 3, spec.dim)
        g = potential_gradient(spec, x)
        fd = np.empty_like(g)
        for i in range(spec.dim):
            e = np.zeros(spec.dim)
            e[i] = eps
            fd[i] = (potential_value(spec, x + e) - potential_value(spec, x - e)) / (2 * eps)
        assert np.max(np.abs(g - fd)) <= 1e-5 * (1.0 + np.linalg.norm(g))


def test_quadratic_monotonicity_bounds():
    spec = quadratic_potential(0.5, dim=3, beta=2.0)
    spec = PotentialSpec(dim=3, alpha=0.5, beta=2.0, lip_h=0.0,
                         curvatures=(0.5, 1.2, 2.0))
    rng = np.random.default_rng(7)
    for _ in range(1000):
        x, y = rng.uniform(-4, 4, 3), rng.uniform(-4, 4, 3)
        gap = np.dot(spec.v_grad(x) - spec.v_grad(y), x - y)
        d2 = np.dot(x - y, x - y)
        assert spec.alpha * d2 - 1e-12 <= gap <= spec.beta * d2 + 1e-12


@pytest.mark.parametrize("spec", SPECS)
def test_grad_h_bounded_by_sup_norm(spec):
    rng = np.random.default_rng(3)
    bound = grad_h_sup_norm(spec)
    for _ in range(1000):
        x = rng.uniform(-10, 10, spec.dim)
        assert np.linalg.norm(spec.h_grad(x)) <= bound + 1e-12


def test_constructor_validation():
    with pytest.raises(ValueError):
        PotentialSpec(dim=1, alpha=2.0, beta=1.0, lip_h=0.0)
    with pytest.raises(ValueError):
        # sinusoid sup|grad H| = amp*freq must not exceed the certified bound
        PotentialSpec(dim=1, alpha=1.0, beta=1.0, lip_h=0.5,
                      h_kind="sinusoid", h_amp=1.0, h_freq=1.0)
    with pytest.raises(ValueError):
        PotentialSpec(dim=1, alpha=1.0, beta=1.0, lip_h=0.0, curvatures=(0.5, 0.5))
    with pytest.raises(ValueError):
        potential_value(quadratic_potential(1.0, dim=2), [1.0])


def test_gaussian_measure_validation():
    g = GaussianMeasure(mean=(0.0, 1.0), var=(1.0, 2.0))
    assert g.dim == 2
    # degenerate (point-mass) variance is allowed, negative is not
    GaussianMeasure(mean=(0.0,), var=(0.0,))
    with pytest.raises(ValueError):
        GaussianMeasure(mean=(0.0,), var=(-1.0,))
    with pytest.raises(ValueError):
        GaussianMeasure(mean=(0.0, 0.0), var=(1.0, 1.0, 1.0))


def test_grid_density_normalizes():
    rho = grid_from_gaussian(GaussianMeasure((0.0,), (1.0,)), -12, 12, 4096)
    assert rho.mass() == pytest.approx(1.0, abs=1e-12)
    assert rho.mean() == pytest.approx(0.0, abs=1e-10)
    assert rho.var() == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        GridDensity(lo=0.0, hi=1.0, values=-np.ones(16))
    with pytest.raises(ValueError):
        GridDensity(lo=1.0, hi=0.0, values=np.ones(16))


def test_empirical_measure_validation():
    m = EmpiricalMeasure(points=np.zeros((5, 2)))
    assert m.n == 5 and m.dim == 2
    with pytest.raises(ValueError):
        EmpiricalMeasure(points=np.zeros((0, 1)))
    with pytest.raises(ValueError):
        EmpiricalMeasure(points=np.array([[np.nan]]))
