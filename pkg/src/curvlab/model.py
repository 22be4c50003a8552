"""Potentials and probability-measure representations shared by every module.

The target potential is U = V + H with V a per-coordinate quadratic whose
curvatures lie in [alpha, beta] and H a bounded-gradient perturbation
(|grad H| <= L).  Three perturbation families are supported, all with
closed-form gradients and analytic gradient sup-norms:

    zero            H = 0
    sinusoid        H(x) = amp * sum_i sin(freq * x_i) / sqrt(d),  sup|grad H| = amp*freq
    smoothed_norm   H(x) = scale * sqrt(1 + |x|^2),                sup|grad H| <= scale

Measures come in three interchangeable forms: exact diagonal Gaussians,
1D quadrature grids, and equal-weight sample clouds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PotentialSpec",
    "GaussianMeasure",
    "GridDensity",
    "EmpiricalMeasure",
    "potential_value",
    "potential_gradient",
    "grad_h_sup_norm",
    "quadratic_potential",
]

H_KINDS = ("zero", "sinusoid", "smoothed_norm")


@dataclass(frozen=True)
class PotentialSpec:
    """U = V + H on R^d.

    V is the quadratic sum_i curvatures[i]*(x_i - center[i])^2 / 2 with every
    per-coordinate curvature in [alpha, beta].  lip_h is the certified bound
    on |grad H| (the constant L entering every curvature certificate).
    """

    dim: int
    alpha: float
    beta: float
    lip_h: float
    center: tuple = ()
    curvatures: tuple = ()
    h_kind: str = "zero"
    h_amp: float = 0.0
    h_freq: float = 0.0
    h_scale: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        if not (0.0 <= self.alpha <= self.beta):
            raise ValueError("need 0 <= alpha <= beta")
        if self.lip_h < 0:
            raise ValueError("lip_h must be >= 0")
        center = self.center if self.center else (0.0,) * self.dim
        curv = self.curvatures if self.curvatures else (self.alpha,) * self.dim
        object.__setattr__(self, "center", tuple(float(c) for c in center))
        object.__setattr__(self, "curvatures", tuple(float(a) for a in curv))
        if len(self.center) != self.dim or len(self.curvatures) != self.dim:
            raise ValueError("center/curvatures length must equal dim")
        for a in self.curvatures:
            if not (self.alpha - 1e-12 <= a <= self.beta + 1e-12):
                raise ValueError("per-coordinate curvature outside [alpha, beta]")
        if self.h_kind not in H_KINDS:
            raise ValueError(f"unknown h_kind {self.h_kind!r}")
        if self.h_kind == "sinusoid":
            if self.h_amp < 0 or self.h_freq < 0:
                raise ValueError("sinusoid amplitude/frequency must be >= 0")
            if self.h_amp * self.h_freq > self.lip_h + 1e-12:
                raise ValueError("sinusoid sup|grad H| = amp*freq exceeds lip_h")
        elif self.h_kind == "smoothed_norm":
            if self.h_scale < 0:
                raise ValueError("smoothed_norm scale must be >= 0")
            if self.h_scale > self.lip_h + 1e-12:
                raise ValueError("smoothed_norm sup|grad H| = scale exceeds lip_h")

    # --- quadratic part -------------------------------------------------
    def v_value(self, x: np.ndarray) -> float:
        a = np.asarray(self.curvatures)
        c = np.asarray(self.center)
        return float(0.5 * np.sum(a * (x - c) ** 2))

    def v_grad(self, x: np.ndarray) -> np.ndarray:
        a = np.asarray(self.curvatures)
        c = np.asarray(self.center)
        return a * (x - c)

    # --- perturbation ---------------------------------------------------
    def h_value(self, x: np.ndarray) -> float:
        if self.h_kind == "zero":
            return 0.0
        if self.h_kind == "sinusoid":
            return float(self.h_amp * np.sum(np.sin(self.h_freq * x)) / math.sqrt(self.dim))
        return float(self.h_scale * math.sqrt(1.0 + float(np.dot(x, x))))

    def h_grad(self, x: np.ndarray) -> np.ndarray:
        if self.h_kind == "zero":
            return np.zeros(self.dim)
        if self.h_kind == "sinusoid":
            return self.h_amp * self.h_freq * np.cos(self.h_freq * x) / math.sqrt(self.dim)
        return self.h_scale * x / math.sqrt(1.0 + float(np.dot(x, x)))

    # --- batched versions (rows of xs are points) -----------------------
    def h_value_batch(self, xs: np.ndarray) -> np.ndarray:
        if self.h_kind == "zero":
            return np.zeros(xs.shape[0])
        if self.h_kind == "sinusoid":
            return self.h_amp * np.sin(self.h_freq * xs).sum(axis=1) / math.sqrt(self.dim)
        return self.h_scale * np.sqrt(1.0 + (xs * xs).sum(axis=1))

    def grad_batch(self, xs: np.ndarray) -> np.ndarray:
        a = np.asarray(self.curvatures)
        c = np.asarray(self.center)
        g = a[None, :] * (xs - c[None, :])
        if self.h_kind == "sinusoid":
            g = g + self.h_amp * self.h_freq * np.cos(self.h_freq * xs) / math.sqrt(self.dim)
        elif self.h_kind == "smoothed_norm":
            g = g + self.h_scale * xs / np.sqrt(1.0 + (xs * xs).sum(axis=1))[:, None]
        return g

    def h_inf_box(self, lo: np.ndarray, hi: np.ndarray) -> float:
        """Analytic infimum of H over the axis-aligned box [lo, hi].

        Used as the exact log-offset of the rejection acceptance ratio, so it
        must never exceed min over the box.
        """
        if self.h_kind == "zero":
            return 0.0
        if self.h_kind == "sinusoid":
            w = self.h_freq
            if w == 0.0:
                return 0.0
            total = 0.0
            for a, b in zip(lo, hi):
                if w * (b - a) >= 2.0 * math.pi:
                    total += -1.0
                else:
                    m = min(math.sin(w * a), math.sin(w * b))
                    # interior minimum at w*t = 3*pi/2 (mod 2*pi)
                    k0 = math.ceil((w * a - 1.5 * math.pi) / (2.0 * math.pi))
                    if 1.5 * math.pi + 2.0 * math.pi * k0 <= w * b:
                        m = -1.0
                    total += m
            return self.h_amp * total / math.sqrt(self.dim)
        # smoothed_norm: closest point of the box to the origin
        nearest = np.clip(0.0, lo, hi)
        return self.h_scale * math.sqrt(1.0 + float(np.dot(nearest, nearest)))


def quadratic_potential(alpha, dim=1, beta=None, center=0.0, h_kind="zero",
                        h_amp=0.0, h_freq=0.0, h_scale=0.0, lip_h=None) -> PotentialSpec:
    """Convenience constructor for the common isotropic-quadratic case."""
    beta = alpha if beta is None else beta
    if lip_h is None:
        lip_h = {"zero": 0.0, "sinusoid": h_amp * h_freq, "smoothed_norm": h_scale}[h_kind]
    center_t = (float(center),) * dim if np.isscalar(center) else tuple(center)
    return PotentialSpec(dim=dim, alpha=alpha, beta=beta, lip_h=lip_h,
                         center=center_t, curvatures=(alpha,) * dim,
                         h_kind=h_kind, h_amp=h_amp, h_freq=h_freq, h_scale=h_scale)


def _check_dim(spec: PotentialSpec, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (spec.dim,):
        raise ValueError(f"point has shape {x.shape}, expected ({spec.dim},)")
    return x


def potential_value(spec: PotentialSpec, x) -> float:
    """U(x) = V(x) + H(x)."""
    x = _check_dim(spec, x)
    return spec.v_value(x) + spec.h_value(x)


def potential_gradient(spec: PotentialSpec, x) -> np.ndarray:
    """grad U(x) = grad V(x) + grad H(x)."""
    x = _check_dim(spec, x)
    return spec.v_grad(x) + spec.h_grad(x)


def grad_h_sup_norm(spec: PotentialSpec) -> float:
    """Analytic sup-norm of grad H (0, amp*freq, or scale by family)."""
    if spec.h_kind == "zero":
        return 0.0
    if spec.h_kind == "sinusoid":
        return spec.h_amp * spec.h_freq
    return spec.h_scale


# ---------------------------------------------------------------------------
# measure representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianMeasure:
    """Diagonal Gaussian N(mean, diag(var)).  var entries may be 0 (point mass)."""

    mean: tuple
    var: tuple

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        var = np.atleast_1d(np.asarray(self.var, dtype=float))
        if var.shape == (1,) and mean.shape != (1,):
            var = np.repeat(var, mean.shape[0])
        if mean.shape != var.shape:
            raise ValueError("mean and var must have the same length")
        if np.any(var < 0) or not np.all(np.isfinite(mean)) or not np.all(np.isfinite(var)):
            raise ValueError("var must be >= 0 and all entries finite")
        object.__setattr__(self, "mean", tuple(mean))
        object.__setattr__(self, "var", tuple(var))

    @property
    def dim(self) -> int:
        return len(self.mean)

    @property
    def mean_arr(self) -> np.ndarray:
        return np.asarray(self.mean)

    @property
    def var_arr(self) -> np.ndarray:
        return np.asarray(self.var)

    @property
    def std_arr(self) -> np.ndarray:
        return np.sqrt(self.var_arr)

    def pdf_1d(self, x: np.ndarray) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("pdf_1d requires a 1D Gaussian")
        m, v = self.mean[0], self.var[0]
        if v == 0:
            raise ValueError("point mass has no density")
        return np.exp(-0.5 * (x - m) ** 2 / v) / math.sqrt(2.0 * math.pi * v)


def dirac(x) -> GaussianMeasure:
    """Point mass as a degenerate Gaussian."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return GaussianMeasure(mean=tuple(x), var=(0.0,) * x.shape[0])


@dataclass(frozen=True)
class GridDensity:
    """1D density sampled on a uniform grid over [lo, hi], trapezoid-normalized."""

    lo: float
    hi: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 8:
            raise ValueError("values must be a 1D array with at least 8 nodes")
        if self.hi <= self.lo:
            raise ValueError("need hi > lo")
        if np.any(vals < 0):
            mn = vals.min()
            if mn < -1e-12 * max(vals.max(), 1.0):
                raise ValueError("density values must be nonnegative")
            vals = np.clip(vals, 0.0, None)
        mass = np.trapezoid(vals, dx=(self.hi - self.lo) / (vals.size - 1))
        if not np.isfinite(mass) or mass <= 0:
            raise ValueError("density must have positive finite mass")
        object.__setattr__(self, "values", vals / mass)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / (self.values.size - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.values.size)

    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.dx))

    def mean(self) -> float:
        return float(np.trapezoid(self.x * self.values, dx=self.dx))

    def var(self) -> float:
        m = self.mean()
        return float(np.trapezoid((self.x - m) ** 2 * self.values, dx=self.dx))

    def cdf(self) -> np.ndarray:
        """CDF at the nodes by cumulative trapezoid, normalized to end at 1."""
        c = np.concatenate([[0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * self.dx)])
        return c / c[-1]

    def same_grid(self, other: "GridDensity") -> bool:
        return (self.n_points == other.n_points
                and math.isclose(self.lo, other.lo, rel_tol=0, abs_tol=1e-12)
                and math.isclose(self.hi, other.hi, rel_tol=0, abs_tol=1e-12))


def grid_from_function(fn, lo: float, hi: float, n_points: int = 8192) -> GridDensity:
    """Grid a nonnegative function (normalization happens in the constructor)."""
    x = np.linspace(lo, hi, n_points)
    return GridDensity(lo=lo, hi=hi, values=fn(x))


def grid_from_gaussian(g: GaussianMeasure, lo: float, hi: float, n_points: int = 8192) -> GridDensity:
    return grid_from_function(g.pdf_1d, lo, hi, n_points)


def grid_window(*gaussians: GaussianMeasure, span: float = 12.0) -> tuple:
    """[min mean - span*max sd, max mean + span*max sd] over 1D Gaussians."""
    means = [g.mean[0] for g in gaussians]
    sds = [math.sqrt(g.var[0]) for g in gaussians]
    smax = max(max(sds), 1e-6)
    return (min(means) - span * smax, max(means) + span * smax)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Equal-weight sample cloud; points has shape (n, d)."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty (n, d) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]
