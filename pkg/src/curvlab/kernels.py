"""One-step Markov kernels in three forms: samplers, exact Gaussian pushforwards,
and 1D grid-density pushforwards.

Kernels
-------
    grad_step(h)    x -> x - h*grad U(x)                       (deterministic)
    gaussian(h)     x -> x + N(0, h I)
    lmc(h)          grad_step(h) followed by gaussian(2h)
    ps_forward(h)   gaussian(h)
    ps_backward(h)  draw z ~ exp(-U(z) - |z-x|^2 / (2h)) / Z(x)
    ps(h)           ps_forward(h) followed by ps_backward(h)
    ou_exact(T)     exact Ornstein-Uhlenbeck transition for quadratic U, H = 0

The backward draw uses rejection sampling: propose from the Gaussian obtained
by dropping H (exact for quadratic V), reject proposals outside a ball of
radius ENV_RADIUS_SDS proposal standard deviations, and accept with probability
exp(-(H(z) - c)) where c is an analytic infimum of H over the bounding box of
the ball.  This is exact on the truncated domain; the truncated mass is below
1e-20 for all supported scenarios.  A separate 4096-node inverse-CDF grid law
(`backward_grid_law`) serves as the independent 1D oracle for the same kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve

from .model import (
    EmpiricalMeasure,
    GaussianMeasure,
    GridDensity,
    PotentialSpec,
)

__all__ = [
    "KernelSpec",
    "step_sample",
    "sample_batch",
    "gaussian_pushforward",
    "grid_pushforward",
    "GridOperator",
    "run_chain",
    "backward_grid_law",
    "BackwardGridLaw",
    "stationary_gaussian",
]

KINDS = ("grad_step", "gaussian", "lmc", "ps_forward", "ps_backward", "ps", "ou_exact")
NEEDS_POTENTIAL = ("grad_step", "lmc", "ps_backward", "ps", "ou_exact")

ENV_RADIUS_SDS = 10.0      # rejection envelope radius, in proposal sd units
MAX_REJECTION_ROUNDS = 10 ** 6
BACKWARD_GRID_NODES = 4096
BACKWARD_GRID_SPAN = 12.0  # +- sds of the V-only Gaussian
CONV_TAIL_SDS = 16.0       # convolution kernels truncated beyond this


@dataclass(frozen=True)
class KernelSpec:
    """Immutable one-step kernel description; `h` is the time horizon for ou_exact."""

    kind: str
    h: float
    potential: PotentialSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not (self.h > 0):
            raise ValueError("h must be > 0")
        if self.kind in NEEDS_POTENTIAL and self.potential is None:
            raise ValueError(f"{self.kind} requires a potential")
        pot = self.potential
        if self.kind in ("grad_step", "lmc") and pot is not None and pot.beta > 0:
            if self.h > 1.0 / pot.beta + 1e-12:
                raise ValueError("h > 1/beta")
        if self.kind == "ou_exact":
            if pot.h_kind != "zero":
                raise ValueError("ou_exact requires a quadratic potential with H = 0")

    @property
    def dim(self) -> int:
        return self.potential.dim if self.potential is not None else 0


def stationary_gaussian(pot: PotentialSpec) -> GaussianMeasure:
    """N(center, 1/curvature) per coordinate; stationary for ou_exact."""
    a = np.asarray(pot.curvatures)
    if pot.h_kind != "zero" or np.any(a <= 0):
        raise ValueError("closed-form stationary law needs quadratic U with positive curvature")
    return GaussianMeasure(mean=pot.center, var=tuple(1.0 / a))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _h_inf_box_batch(pot: PotentialSpec, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Vectorized analytic infimum of H over row-wise boxes [lo_i, hi_i]."""
    n = lo.shape[0]
    if pot.h_kind == "zero":
        return np.zeros(n)
    if pot.h_kind == "sinusoid":
        w = pot.h_freq
        if w == 0.0:
            return np.zeros(n)
        if w * float(hi[0, 0] - lo[0, 0]) >= 2.0 * math.pi:
            per_coord = -np.ones_like(lo)
        else:
            per_coord = np.minimum(np.sin(w * lo), np.sin(w * hi))
            k0 = np.ceil((w * lo - 1.5 * math.pi) / (2.0 * math.pi))
            hits_min = 1.5 * math.pi + 2.0 * math.pi * k0 <= w * hi
            per_coord = np.where(hits_min, -1.0, per_coord)
        return pot.h_amp * per_coord.sum(axis=1) / math.sqrt(pot.dim)
    nearest = np.clip(0.0, lo, hi)
    return pot.h_scale * np.sqrt(1.0 + (nearest * nearest).sum(axis=1))


def _backward_reject_batch(pot: PotentialSpec, h: float, ys: np.ndarray,
                           rng: np.random.Generator) -> np.ndarray:
    """Exact draws from z ~ exp(-U(z) - |z-y|^2/(2h)), one per row of ys."""
    a = np.asarray(pot.curvatures)
    c = np.asarray(pot.center)
    prec = a + 1.0 / h
    sd = 1.0 / np.sqrt(prec)
    mu = (a * c + ys / h) / prec
    r_env = ENV_RADIUS_SDS * math.sqrt(h / (1.0 + pot.alpha * h))
    c_box = _h_inf_box_batch(pot, mu - r_env, mu + r_env)

    out = np.empty_like(ys)
    active = np.arange(ys.shape[0])
    for _ in range(MAX_REJECTION_ROUNDS):
        z = mu[active] + sd[None, :] * rng.standard_normal((active.size, ys.shape[1]))
        d2 = ((z - mu[active]) ** 2).sum(axis=1)
        acc = np.exp(-(pot.h_value_batch(z) - c_box[active]))
        take = (d2 <= r_env * r_env) & (rng.random(active.size) <= acc)
        out[active[take]] = z[take]
        active = active[~take]
        if active.size == 0:
            return out
    raise RuntimeError("rejection sampler failed after max_tries; envelope misconfigured")


def sample_batch(kernel: KernelSpec, xs: np.ndarray, rng) -> np.ndarray:
    """One kernel step applied to every row of xs (same law as step_sample)."""
    rng = _as_rng(rng)
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    if not np.all(np.isfinite(xs)):
        raise ValueError("non-finite input point")
    pot, h, kind = kernel.potential, kernel.h, kernel.kind
    if kind == "grad_step":
        return xs - h * pot.grad_batch(xs)
    if kind in ("gaussian", "ps_forward"):
        return xs + math.sqrt(h) * rng.standard_normal(xs.shape)
    if kind == "lmc":
        mid = xs - h * pot.grad_batch(xs)
        return mid + math.sqrt(2.0 * h) * rng.standard_normal(xs.shape)
    if kind == "ps_backward":
        return _backward_reject_batch(pot, h, xs, rng)
    if kind == "ps":
        mid = xs + math.sqrt(h) * rng.standard_normal(xs.shape)
        return _backward_reject_batch(pot, h, mid, rng)
    # ou_exact
    a = np.asarray(pot.curvatures)
    c = np.asarray(pot.center)
    decay = np.exp(-a * h)
    var = np.where(a > 0, (1.0 - np.exp(-2.0 * a * h)) / np.where(a > 0, a, 1.0), 2.0 * h)
    return c + (xs - c) * decay + np.sqrt(var) * rng.standard_normal(xs.shape)


def step_sample(kernel: KernelSpec, x, rng) -> np.ndarray:
    """One draw from delta_x applied to the kernel."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return sample_batch(kernel, x[None, :], rng)[0]


def run_chain(kernel: KernelSpec, init, n_steps: int, rng,
              n_particles: int | None = None) -> EmpiricalMeasure:
    """Evolve a particle cloud n_steps kernel steps.

    The stream is consumed in a fixed order (init draws, then one batch per
    step), so the output is a deterministic function of (config, seed).
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    rng = _as_rng(rng)
    if isinstance(init, EmpiricalMeasure):
        pts = init.points.copy()
    elif isinstance(init, GaussianMeasure):
        if n_particles is None:
            raise ValueError("n_particles required for a Gaussian initialization")
        pts = init.mean_arr[None, :] + init.std_arr[None, :] * rng.standard_normal(
            (n_particles, init.dim))
    else:
        raise TypeError("init must be EmpiricalMeasure or GaussianMeasure")
    for _ in range(n_steps):
        pts = sample_batch(kernel, pts, rng)
    return EmpiricalMeasure(points=pts)


# ---------------------------------------------------------------------------
# exact Gaussian pushforwards (affine-Gaussian kernels only)
# ---------------------------------------------------------------------------

def gaussian_pushforward(kernel: KernelSpec, g: GaussianMeasure) -> GaussianMeasure:
    """Exact image of a diagonal Gaussian; requires quadratic V with H = 0 for
    any kernel involving the potential."""
    kind, h, pot = kernel.kind, kernel.h, kernel.potential
    m, v = g.mean_arr, g.var_arr
    if kind in ("gaussian", "ps_forward"):
        return GaussianMeasure(mean=tuple(m), var=tuple(v + h))
    if pot is None or pot.h_kind != "zero":
        raise ValueError(f"no exact Gaussian pushforward for {kind} with a perturbed potential")
    if g.dim != pot.dim:
        raise ValueError("dimension mismatch")
    a = np.asarray(pot.curvatures)
    c = np.asarray(pot.center)
    if kind == "grad_step":
        k = 1.0 - a * h
        return GaussianMeasure(mean=tuple(c + k * (m - c)), var=tuple(k * k * v))
    if kind == "lmc":
        k = 1.0 - a * h
        return GaussianMeasure(mean=tuple(c + k * (m - c)), var=tuple(k * k * v + 2.0 * h))
    if kind == "ps_backward":
        k = 1.0 / (1.0 + a * h)
        s2 = h / (1.0 + a * h)
        return GaussianMeasure(mean=tuple(c + k * (m - c)), var=tuple(k * k * v + s2))
    if kind == "ps":
        k = 1.0 / (1.0 + a * h)
        s2 = h / (1.0 + a * h)
        return GaussianMeasure(mean=tuple(c + k * (m - c)), var=tuple(k * k * (v + h) + s2))
    if kind == "ou_exact":
        decay = np.exp(-a * h)
        vinf = np.where(a > 0, (1.0 - decay ** 2) / np.where(a > 0, a, 1.0), 2.0 * h)
        return GaussianMeasure(mean=tuple(c + decay * (m - c)), var=tuple(decay ** 2 * v + vinf))
    raise ValueError(f"unsupported kernel {kind}")


# ---------------------------------------------------------------------------
# 1D grid-density pushforwards
# ---------------------------------------------------------------------------

def _u_second_1d(pot: PotentialSpec, x: np.ndarray) -> np.ndarray:
    a = pot.curvatures[0]
    if pot.h_kind == "sinusoid":
        return a - pot.h_amp * pot.h_freq ** 2 * np.sin(pot.h_freq * x)
    if pot.h_kind == "smoothed_norm":
        return a + pot.h_scale / (1.0 + x * x) ** 1.5
    return np.full_like(x, a)


def _u_value_1d(pot: PotentialSpec, x: np.ndarray) -> np.ndarray:
    a = pot.curvatures[0]
    c = pot.center[0]
    u = 0.5 * a * (x - c) ** 2
    if pot.h_kind == "sinusoid":
        u = u + pot.h_amp * np.sin(pot.h_freq * x)
    elif pot.h_kind == "smoothed_norm":
        u = u + pot.h_scale * np.sqrt(1.0 + x * x)
    return u


class GridOperator:
    """One-step evolution of 1D grid densities under a fixed kernel and grid.

    Strategy per kernel: translation-invariant Gaussian noise becomes a
    truncated discrete convolution (identical to the trapezoid quadrature of
    the transition density, since the tails beyond the truncation are below
    1e-50); deterministic monotone maps push the density through the change
    of variables and re-interpolate monotonically onto the grid; the backward
    kernel is a genuine column-normalized quadrature matrix, applied in blocks.
    """

    def __init__(self, kernel: KernelSpec, lo: float, hi: float, n_points: int):
        if kernel.potential is not None and kernel.potential.dim != 1:
            raise ValueError("grid pushforward is 1D only")
        self.kernel = kernel
        self.lo, self.hi, self.n = float(lo), float(hi), int(n_points)
        self.x = np.linspace(lo, hi, n_points)
        self.dx = (hi - lo) / (n_points - 1)
        self._stages = []
        kind, h, pot = kernel.kind, kernel.h, kernel.potential
        if kind in ("gaussian", "ps_forward"):
            self._stages.append(("conv", self._conv_kernel(h)))
        elif kind == "grad_step":
            self._stages.append(("map", *self._grad_map(pot, h)))
        elif kind == "lmc":
            self._stages.append(("map", *self._grad_map(pot, h)))
            self._stages.append(("conv", self._conv_kernel(2.0 * h)))
        elif kind == "ou_exact":
            a = pot.curvatures[0]
            decay = math.exp(-a * h)
            var = (1.0 - decay ** 2) / a if a > 0 else 2.0 * h
            cen = pot.center[0]
            t_nodes = cen + decay * (self.x - cen)
            self._stages.append(("map", t_nodes, np.full(self.n, decay)))
            self._stages.append(("conv", self._conv_kernel(var)))
        elif kind == "ps_backward":
            self._stages.append(("backward", pot, h))
        elif kind == "ps":
            self._stages.append(("conv", self._conv_kernel(h)))
            self._stages.append(("backward", pot, h))
        else:
            raise ValueError(f"unsupported kernel for grid pushforward: {kind}")

    def _conv_kernel(self, var: float) -> np.ndarray:
        sd = math.sqrt(var)
        halfwidth = min(self.n - 1, int(math.ceil(CONV_TAIL_SDS * sd / self.dx)))
        offs = np.arange(-halfwidth, halfwidth + 1) * self.dx
        kern = np.exp(-0.5 * offs ** 2 / var) / math.sqrt(2.0 * math.pi * var)
        return kern * self.dx

    def _grad_map(self, pot: PotentialSpec, h: float):
        t_nodes = self.x - h * (pot.curvatures[0] * (self.x - pot.center[0]))
        if pot.h_kind == "sinusoid":
            t_nodes = t_nodes - h * pot.h_amp * pot.h_freq * np.cos(pot.h_freq * self.x)
        elif pot.h_kind == "smoothed_norm":
            t_nodes = t_nodes - h * pot.h_scale * self.x / np.sqrt(1.0 + self.x ** 2)
        tprime = 1.0 - h * _u_second_1d(pot, self.x)
        if np.any(tprime <= 0):
            raise ValueError("gradient-step map is not monotone on this grid; reduce h")
        return t_nodes, tprime

    def _apply_backward(self, pot: PotentialSpec, h: float, vals: np.ndarray) -> np.ndarray:
        z = self.x
        log_uz = -_u_value_1d(pot, z)
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        out = np.zeros(self.n)
        block = 512
        for start in range(0, self.n, block):
            y = z[start:start + block]
            logq = log_uz[:, None] - (z[:, None] - y[None, :]) ** 2 / (2.0 * h)
            logq -= logq.max(axis=0, keepdims=True)
            q = np.exp(logq)
            norms = np.trapezoid(q, dx=self.dx, axis=0)
            out += q @ (w[start:start + block] * vals[start:start + block] / norms)
        return out

    def apply_values(self, vals: np.ndarray) -> np.ndarray:
        """Push raw density values one step; checks mass conservation."""
        for stage in self._stages:
            if stage[0] == "conv":
                vals = fftconvolve(vals * self.dx, stage[1] / self.dx, mode="same")
                vals = np.clip(vals, 0.0, None)
            elif stage[0] == "map":
                _, t_nodes, tprime = stage
                pushed = vals / tprime
                # Interpolate the log-density (exactly quadratic for Gaussian
                # data, so the change of variables is exact to roundoff).  The
                # spline only sees the contiguous region above a relative
                # floor: clipped-to-zero convolution tails would put violent
                # kinks into the log and make a cubic spline ring.
                floor = float(pushed.max()) * 1e-13
                above = np.nonzero(pushed > floor)[0]
                i0, i1 = int(above[0]), int(above[-1])
                logp = np.log(np.maximum(pushed[i0:i1 + 1], floor))
                spline = CubicSpline(t_nodes[i0:i1 + 1], logp, extrapolate=False)
                with np.errstate(invalid="ignore"):
                    vals = np.exp(np.nan_to_num(spline(self.x), nan=-math.inf))
                vals[(self.x < t_nodes[i0]) | (self.x > t_nodes[i1])] = 0.0
            else:
                _, pot, h = stage
                vals = self._apply_backward(pot, h, vals)
        mass = float(np.trapezoid(vals, dx=self.dx))
        if abs(mass - 1.0) > 1e-6:
            raise ValueError(f"grid too small: mass leak {abs(mass - 1.0):.3e} before renormalization")
        return vals

    def apply(self, rho: GridDensity) -> GridDensity:
        if rho.n_points != self.n or abs(rho.lo - self.lo) > 1e-12 or abs(rho.hi - self.hi) > 1e-12:
            raise ValueError("density grid does not match operator grid")
        return GridDensity(lo=self.lo, hi=self.hi, values=self.apply_values(rho.values))


def grid_pushforward(kernel: KernelSpec, rho: GridDensity) -> GridDensity:
    """One kernel step applied to a 1D grid density (see GridOperator)."""
    return GridOperator(kernel, rho.lo, rho.hi, rho.n_points).apply(rho)


# ---------------------------------------------------------------------------
# 1D backward-step grid law (independent oracle for the rejection sampler)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BackwardGridLaw:
    """Backward-step law at a fixed source point, tabulated on a 1D grid.

    The CDF is the cumulative trapezoid of the tabulated density; sampling
    inverts the piecewise-linear CDF, so draws match this CDF by construction.
    """

    x: np.ndarray
    pdf: np.ndarray
    cdf_vals: np.ndarray

    def sample(self, rng, n: int) -> np.ndarray:
        rng = _as_rng(rng)
        return self.quantile(rng.random(n))

    def quantile(self, u: np.ndarray) -> np.ndarray:
        keep = np.concatenate([[True], np.diff(self.cdf_vals) > 0])
        return np.interp(u, self.cdf_vals[keep], self.x[keep])

    def cdf(self, pts: np.ndarray) -> np.ndarray:
        return np.interp(pts, self.x, self.cdf_vals)

    def mean(self) -> float:
        return float(np.trapezoid(self.x * self.pdf, x=self.x))

    def var(self) -> float:
        m = self.mean()
        return float(np.trapezoid((self.x - m) ** 2 * self.pdf, x=self.x))


def backward_grid_law(pot: PotentialSpec, h: float, y: float,
                      n_nodes: int = BACKWARD_GRID_NODES,
                      span: float = BACKWARD_GRID_SPAN) -> BackwardGridLaw:
    """Tabulate z ~ exp(-U(z) - (z-y)^2/(2h)) on `span` sds of the V-only Gaussian."""
    if pot.dim != 1:
        raise ValueError("backward grid law is 1D only")
    a = pot.curvatures[0]
    c = pot.center[0]
    prec = a + 1.0 / h
    mu = (a * c + y / h) / prec
    sd = 1.0 / math.sqrt(prec)
    x = np.linspace(mu - span * sd, mu + span * sd, n_nodes)
    logw = -_u_value_1d(pot, x) - (x - y) ** 2 / (2.0 * h)
    logw -= logw.max()
    w = np.exp(logw)
    dx = x[1] - x[0]
    mass = np.trapezoid(w, dx=dx)
    pdf = w / mass
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * dx)])
    cdf /= cdf[-1]
    return BackwardGridLaw(x=x, pdf=pdf, cdf_vals=cdf)
