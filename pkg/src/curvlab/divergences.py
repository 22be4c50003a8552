"""KL divergence and total variation, in Gaussian closed form and grid quadrature.

KL between diagonal Gaussians sums per coordinate
    log(s2/s1) + (s1^2 + (m1-m2)^2) / (2 s2^2) - 1/2,
which for equal variances reduces to |m1-m2|^2 / (2 s^2).  KL off absolute
continuity is +inf, carried as an explicit float('inf') sentinel.  TV equals
half the L1 distance of densities; for equal-variance 1D Gaussians it has the
closed form 2*Phi(|m1-m2|/(2s)) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GaussianMeasure, GridDensity

__all__ = [
    "DivergenceResult",
    "kl_gaussian",
    "kl_grid",
    "tv_grid",
    "tv_gaussian_equal_var_1d",
    "KL_INFINITE",
]

KL_INFINITE = float("inf")


@dataclass(frozen=True)
class DivergenceResult:
    kind: str
    value: float
    method: str

    def __post_init__(self):
        if self.kind == "tv" and not (-1e-12 <= self.value <= 1.0 + 1e-12):
            raise ValueError("tv must lie in [0, 1]")
        if self.kind == "kl" and self.value < -1e-12:
            raise ValueError("kl must be nonnegative")


def kl_gaussian(g1: GaussianMeasure, g2: GaussianMeasure) -> DivergenceResult:
    """KL(g1 || g2) for diagonal Gaussians with strictly positive variances."""
    if g1.dim != g2.dim:
        raise ValueError("dimension mismatch")
    v1, v2 = g1.var_arr, g2.var_arr
    if np.any(v1 <= 0) or np.any(v2 <= 0):
        raise ValueError("kl_gaussian needs strictly positive variances")
    dm = g1.mean_arr - g2.mean_arr
    val = float(np.sum(0.5 * np.log(v2 / v1) + (v1 + dm ** 2) / (2.0 * v2) - 0.5))
    return DivergenceResult(kind="kl", value=max(val, 0.0), method="gaussian_closed_form")


def kl_grid(r1: GridDensity, r2: GridDensity) -> DivergenceResult:
    """Trapezoid quadrature of r1*log(r1/r2) with 0*log0 = 0.

    Absolute-continuity failure returns the +inf sentinel when r1 puts
    quadrature-resolvable mass (> 1e-6) where r2 vanishes.  Zero nodes of r2
    carrying less r1-mass than that are numerical underflow of far tails, not
    support mismatch; they are evaluated against a relative density floor and
    perturb the value by no more than the 1e-4 quadrature budget.
    """
    if not r1.same_grid(r2):
        raise ValueError("grid mismatch")
    a, b = r1.values, r2.values
    tiny = 1e-300
    bad = (a > 0) & (b <= tiny)
    if np.any(bad):
        bad_mass = float(np.trapezoid(np.where(bad, a, 0.0), dx=r1.dx))
        if bad_mass > 1e-6:
            return DivergenceResult(kind="kl", value=KL_INFINITE, method="grid_quadrature")
    floor = max(1e-30 * float(b.max()), tiny)
    integrand = np.where(a > 0, a * (np.log(np.maximum(a, tiny)) - np.log(np.maximum(b, floor))), 0.0)
    val = float(np.trapezoid(integrand, dx=r1.dx))
    return DivergenceResult(kind="kl", value=max(val, 0.0), method="grid_quadrature")


def tv_grid(r1: GridDensity, r2: GridDensity) -> DivergenceResult:
    """Half the trapezoid L1 distance of the two grid densities."""
    if not r1.same_grid(r2):
        raise ValueError("grid mismatch")
    val = 0.5 * float(np.trapezoid(np.abs(r1.values - r2.values), dx=r1.dx))
    return DivergenceResult(kind="tv", value=min(val, 1.0), method="grid_quadrature")


def tv_gaussian_equal_var_1d(m1: float, m2: float, sigma: float) -> DivergenceResult:
    """TV between N(m1, s^2) and N(m2, s^2): erf(|m1-m2| / (2s sqrt(2)))."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    val = math.erf(abs(m1 - m2) / (2.0 * sigma * math.sqrt(2.0)))
    return DivergenceResult(kind="tv", value=val, method="gaussian_closed_form")
