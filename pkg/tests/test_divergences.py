import math

import numpy as np
import pytest

from curvlab.divergences import (
    KL_INFINITE,
    kl_gaussian,
    kl_grid,
    tv_gaussian_equal_var_1d,
    tv_grid,
)
from curvlab.kernels import GridOperator, KernelSpec
from curvlab.model import GaussianMeasure, GridDensity, grid_from_gaussian


N01 = GaussianMeasure((0.0,), (1.0,))


def test_kl_gaussian_examples():
    assert kl_gaussian(N01, N01).value == 0.0
    assert kl_gaussian(GaussianMeasure((1.0,), (1.0,)), N01).value == pytest.approx(0.5)
    # sd ratio e: log e + (1 + 0)/(2 e^2) - 1/2
    val = kl_gaussian(N01, GaussianMeasure((0.0,), (math.e ** 2,))).value
    assert val == pytest.approx(0.5 + 1.0 / (2.0 * math.e ** 2), rel=1e-12)
    with pytest.raises(ValueError):
        kl_gaussian(GaussianMeasure((0.0,), (0.0,)), N01)


def test_kl_grid_examples():
    r1 = grid_from_gaussian(GaussianMeasure((1.0,), (1.0,)), -14, 15, 8192)
    r2 = grid_from_gaussian(N01, -14, 15, 8192)
    assert kl_grid(r2, r2).value == 0.0
    assert kl_grid(r1, r2).value == pytest.approx(0.5, abs=1e-5)
    # mass where the reference vanishes -> +inf sentinel
    x = np.linspace(-1, 1, 512)
    top = GridDensity(lo=-1, hi=1, values=np.where(np.abs(x) < 0.3, 1.0, 0.0))
    bottom = GridDensity(lo=-1, hi=1, values=np.where(np.abs(x - 0.6) < 0.3, 1.0, 0.0))
    assert kl_grid(top, bottom).value == KL_INFINITE


def test_tv_grid_examples():
    r = grid_from_gaussian(N01, -16, 16, 8192)
    assert tv_grid(r, r).value == 0.0
    far = grid_from_gaussian(GaussianMeasure((10.0,), (1.0,)), -16, 16, 8192)
    assert tv_grid(r, far).value == pytest.approx(1.0, abs=1e-4)
    near = grid_from_gaussian(GaussianMeasure((1.0,), (1.0,)), -16, 16, 8192)
    assert tv_grid(r, near).value == pytest.approx(0.3829249, abs=1e-4)


def test_tv_gaussian_closed_form_examples():
    assert tv_gaussian_equal_var_1d(2.0, 2.0, 1.0).value == 0.0
    assert tv_gaussian_equal_var_1d(0.0, 1e9, 1.0).value == pytest.approx(1.0)
    assert tv_gaussian_equal_var_1d(0.0, 1.0, 1.0).value == pytest.approx(0.3829249, abs=1e-7)
    with pytest.raises(ValueError):
        tv_gaussian_equal_var_1d(0.0, 1.0, 0.0)


def test_gibbs_nonnegativity():
    rng = np.random.default_rng(41)
    r2 = grid_from_gaussian(N01, -14, 14, 4096)
    for _ in range(20):
        m = rng.uniform(-1, 1)
        s = rng.uniform(0.7, 1.5)
        r1 = grid_from_gaussian(GaussianMeasure((m,), (s * s,)), -14, 14, 4096)
        kl = kl_grid(r1, r2).value
        assert kl >= 0.0
        if np.max(np.abs(r1.values - r2.values)) <= 1e-9:
            assert kl <= 1e-9
        else:
            assert kl > 0.0


def test_pinsker_on_gaussian_pairs():
    rng = np.random.default_rng(43)
    for _ in range(1000):
        m1, m2 = rng.uniform(-3, 3, 2)
        s = rng.uniform(0.3, 2.5)
        tv = tv_gaussian_equal_var_1d(m1, m2, s).value
        kl = kl_gaussian(GaussianMeasure((m1,), (s * s,)),
                         GaussianMeasure((m2,), (s * s,))).value
        assert tv <= math.sqrt(kl / 2.0) + 1e-9


def test_tv_grid_matches_closed_form():
    rng = np.random.default_rng(47)
    for _ in range(100):
        m1, m2 = rng.uniform(-2, 2, 2)
        s = rng.uniform(0.5, 2.0)
        lo = min(m1, m2) - 12 * s
        hi = max(m1, m2) + 12 * s
        r1 = grid_from_gaussian(GaussianMeasure((m1,), (s * s,)), lo, hi, 8192)
        r2 = grid_from_gaussian(GaussianMeasure((m2,), (s * s,)), lo, hi, 8192)
        assert tv_grid(r1, r2).value == pytest.approx(
            tv_gaussian_equal_var_1d(m1, m2, s).value, abs=1e-4)


def test_data_processing_under_gaussian_smoothing():
    """KL never increases under the common Gaussian convolution kernel.

    The two mixtures of a pair share component widths so that both tails stay
    representable on the grid (the inequality itself is width-agnostic).
    """
    rng = np.random.default_rng(53)
    lo, hi, n = -16.0, 16.0, 4096
    op = GridOperator(KernelSpec(kind="gaussian", h=0.5), lo, hi, n)
    x = np.linspace(lo, hi, n)
    for _ in range(50):
        s1, s2 = rng.uniform(0.5, 1.5, 2)

        def mixture():
            m1, m2 = rng.uniform(-2, 2, 2)
            w = rng.uniform(0.2, 0.8)
            vals = (w * np.exp(-0.5 * (x - m1) ** 2 / s1 ** 2) / s1
                    + (1 - w) * np.exp(-0.5 * (x - m2) ** 2 / s2 ** 2) / s2)
            return GridDensity(lo=lo, hi=hi, values=vals)

        r1, r2 = mixture(), mixture()
        before = kl_grid(r1, r2).value
        after = kl_grid(op.apply(r1), op.apply(r2)).value
        assert after <= before + 1e-6
