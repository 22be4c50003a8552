"""End-to-end verification experiments: sampled or exactly-evolved laws on one
side, certificate bounds on the other.

Every experiment produces a VerificationReport whose cases record lhs, rhs,
margin = rhs - lhs, and a pass flag.  Inequality slack policy: Monte-Carlo
cases pass when lhs <= rhs + 3*std_error (std_error from 20-fold subsampling);
exact closed-form paths use absolute tolerance 1e-9; grid-quadrature paths use
1e-4.  Reports are deterministic functions of (config, master seed): case k
draws from a stream seeded by (master seed, k), and aggregation is in case
order regardless of worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .divergences import kl_gaussian, kl_grid, tv_grid
from .kernels import (
    GridOperator,
    KernelSpec,
    backward_grid_law,
    gaussian_pushforward,
    run_chain,
)
from .model import (
    EmpiricalMeasure,
    GaussianMeasure,
    GridDensity,
    PotentialSpec,
    dirac,
    grid_from_gaussian,
)
from .transport import w2_assignment, w2_gaussian, wp_empirical_1d, wp_grid_1d
from ._parallel import parallel_map

__all__ = [
    "CaseRecord",
    "VerificationReport",
    "MixingCurve",
    "verify_curvature",
    "verify_backward_winfty",
    "verify_def_t2",
    "verify_rte",
    "mixing_curve",
    "stationarity_check",
    "grid_fixed_point",
]

EXACT_TOL = 1e-9
GRID_TOL = 1e-4
MC_SIGMA = 3.0


@dataclass(frozen=True)
class CaseRecord:
    case: str
    inputs: dict
    lhs: float
    rhs: float
    std_error: float | None
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _make_case(case, inputs, lhs, rhs, std_error=None, tol=0.0) -> CaseRecord:
    slack = MC_SIGMA * std_error if std_error is not None else tol
    return CaseRecord(case=case, inputs=inputs, lhs=lhs, rhs=rhs,
                      std_error=std_error, passed=bool(lhs <= rhs + slack))


@dataclass(frozen=True)
class VerificationReport:
    experiment: str
    cases: tuple
    seed: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def n_pass(self) -> int:
        return sum(c.passed for c in self.cases)

    @property
    def n_fail(self) -> int:
        return len(self.cases) - self.n_pass

    @property
    def all_passed(self) -> bool:
        return self.n_fail == 0


def _case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


# ---------------------------------------------------------------------------
# curvature of one-step kernels
# ---------------------------------------------------------------------------

def _curvature_cert(kind: str, pot: PotentialSpec, h: float, p: float) -> bounds.CurvatureCert:
    if kind == "lmc":
        return bounds.curvature_lmc(pot.alpha, pot.beta, pot.lip_h, h, p)
    if kind == "ps":
        return bounds.curvature_ps(pot.alpha, pot.lip_h, h, p)
    raise ValueError("curvature certificates cover the lmc and ps kernels")


def _affine_gaussian(kernel: KernelSpec) -> bool:
    pot = kernel.potential
    return pot is not None and pot.h_kind == "zero"


def _curvature_case(args) -> CaseRecord:
    (idx, kind, pot, h, p, x, y, n_samples, seed, K, M) = args
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dist = float(np.linalg.norm(x - y))
    rhs = K * dist + M
    kernel = KernelSpec(kind=kind, h=h, potential=pot)
    inputs = {"kernel": kind, "h": h, "p": p, "dist": dist}
    if _affine_gaussian(kernel):
        gx = gaussian_pushforward(kernel, dirac(x))
        gy = gaussian_pushforward(kernel, dirac(y))
        # equal covariances: W_p between translates equals the mean gap for all p
        lhs = float(np.linalg.norm(gx.mean_arr - gy.mean_arr))
        return _make_case(f"pair{idx}", inputs, lhs, rhs, tol=EXACT_TOL)
    rng = _case_rng(seed, idx)
    cx = run_chain(kernel, EmpiricalMeasure(np.repeat(x[None, :], n_samples, axis=0)), 1, rng)
    cy = run_chain(kernel, EmpiricalMeasure(np.repeat(y[None, :], n_samples, axis=0)), 1, rng)
    if x.shape[0] == 1:
        res = wp_empirical_1d(cx, cy, p=p)
    else:
        keep = min(n_samples, 1024)
        res = w2_assignment(EmpiricalMeasure(cx.points[:keep]), EmpiricalMeasure(cy.points[:keep]))
    return _make_case(f"pair{idx}", inputs, res.value, rhs, std_error=res.std_error or 0.0)


def verify_curvature(kind: str, pot: PotentialSpec, h: float, pairs,
                     n_samples: int = 200_000, p: float = 2.0,
                     seed: int = 0) -> VerificationReport:
    """Check W_p(delta_x P, delta_y P) <= K|x-y| + M on explicit pairs.

    Exact Gaussian path for quadratic potentials with H = 0, Monte-Carlo
    clouds otherwise (one cloud per endpoint; quantile coupling in 1D).
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    cert = _curvature_cert(kind, pot, h, p)
    args = [(i, kind, pot, h, p, x, y, n_samples, seed, cert.K, cert.M)
            for i, (x, y) in enumerate(pairs)]
    cases = parallel_map(_curvature_case, args)
    return VerificationReport(experiment=f"curvature-{kind}", cases=tuple(cases), seed=seed,
                              notes={"K": cert.K, "M": cert.M, "n_samples": n_samples})


# ---------------------------------------------------------------------------
# backward-step W_infinity contraction
# ---------------------------------------------------------------------------

def _winfty_case(args) -> CaseRecord:
    idx, pot, h, y1, y2, n_samples, seed = args
    rng = _case_rng(seed, idx)
    law1 = backward_grid_law(pot, h, y1)
    law2 = backward_grid_law(pot, h, y2)
    # common random numbers: the shared-quantile coupling is the optimal
    # W_inf coupling in 1D, so the sorted max-gap estimator is exact at
    # identical laws instead of inflated by extreme-order-statistic noise
    u = rng.random(n_samples)
    s1 = EmpiricalMeasure(law1.quantile(u))
    s2 = EmpiricalMeasure(law2.quantile(u))
    res = wp_empirical_1d(s1, s2, p=math.inf)
    rhs = (2.0 * pot.lip_h + abs(y1 - y2) / h) / (pot.alpha + 1.0 / h)
    inputs = {"h": h, "y1": y1, "y2": y2}
    return _make_case(f"pair{idx}", inputs, res.value, rhs, std_error=res.std_error or 0.0)


def verify_backward_winfty(pot: PotentialSpec, h: float, pairs,
                           n_samples: int = 100_000, seed: int = 0) -> VerificationReport:
    """Check the backward-step bound
    W_inf(delta_{y1} R_h, delta_{y2} R_h) <= (2L + |y1-y2|/h) / (alpha + 1/h)
    on 1D grid-sampled backward laws."""
    if pot.dim != 1:
        raise ValueError("backward W_infinity check is 1D only")
    args = [(i, pot, h, float(y1), float(y2), n_samples, seed)
            for i, (y1, y2) in enumerate(pairs)]
    cases = parallel_map(_winfty_case, args)
    return VerificationReport(experiment="backward-winfty", cases=tuple(cases), seed=seed)


# ---------------------------------------------------------------------------
# defective transport-entropy of evolved laws
# ---------------------------------------------------------------------------

def _random_gaussians(rng, base: GaussianMeasure, n: int, mean_scale=2.0,
                      logsd_scale=0.7) -> list:
    out = []
    m0 = base.mean_arr
    s0 = base.std_arr
    for _ in range(n):
        m = m0 + mean_scale * s0 * rng.standard_normal(base.dim)
        s = s0 * np.exp(logsd_scale * rng.standard_normal(base.dim))
        out.append(GaussianMeasure(mean=tuple(m), var=tuple(s * s)))
    return out


def verify_def_t2_ou(alpha: float, T: float, x0, n_test: int = 100,
                     seed: int = 0, dim: int = 1) -> VerificationReport:
    """Exact path: time-T Ornstein-Uhlenbeck law from a point mass satisfies
    W2 <= sqrt(2 A KL) + B with (A, B) from the continuous-time certificate."""
    from .model import quadratic_potential

    pot = quadratic_potential(alpha, dim=dim)
    kernel = KernelSpec(kind="ou_exact", h=T, potential=pot)
    mu_t = gaussian_pushforward(kernel, dirac(np.full(dim, float(x0))))
    cert = bounds.def_t2_ld(alpha, 0.0, T, J=0.0, S=0.0)
    rng = _case_rng(seed, 0)
    cases = []
    for j, nu in enumerate(_random_gaussians(rng, mu_t, n_test)):
        lhs = w2_gaussian(nu, mu_t).value
        rhs = math.sqrt(2.0 * cert.A * kl_gaussian(nu, mu_t).value) + cert.B
        cases.append(_make_case(f"test{j}", {"T": T, "alpha": alpha}, lhs, rhs, tol=EXACT_TOL))
    return VerificationReport(experiment="def-t2-ou", cases=tuple(cases), seed=seed,
                              notes={"A": cert.A, "B": cert.B})


def verify_def_t2_ps_grid(pot: PotentialSpec, h: float, n_steps: int,
                          init: GaussianMeasure, n_test: int = 50, seed: int = 0,
                          n_grid: int = 8192, span: float = 12.0) -> VerificationReport:
    """Grid path: evolve a Gaussian start (variance v gives the certificate
    (J, S) = (v, 0)) through N Proximal Sampler steps and test random grid
    measures against the N-step certificate."""
    if pot.dim != 1:
        raise ValueError("grid path is 1D only")
    j_init = float(max(init.var))
    cert = bounds.def_t2_ps(pot.alpha, pot.lip_h, h, n_steps, J=j_init, S=0.0)
    target_sd = math.sqrt(1.0 / max(pot.alpha, 0.25) + h)
    lo = min(init.mean[0], pot.center[0]) - span * max(init.std_arr[0], target_sd)
    hi = max(init.mean[0], pot.center[0]) + span * max(init.std_arr[0], target_sd)
    rho = grid_from_gaussian(init, lo, hi, n_grid)
    op = GridOperator(KernelSpec(kind="ps", h=h, potential=pot), lo, hi, n_grid)
    for _ in range(n_steps):
        rho = op.apply(rho)
    rng = _case_rng(seed, 0)
    ref = GaussianMeasure(mean=(rho.mean(),), var=(rho.var(),))
    cases = []
    for j, nu in enumerate(_random_gaussians(rng, ref, n_test, mean_scale=1.5, logsd_scale=0.5)):
        nu_grid = grid_from_gaussian(nu, lo, hi, n_grid)
        kl = kl_grid(nu_grid, rho).value
        lhs = wp_grid_1d(nu_grid, rho, p=2.0).value
        rhs = math.sqrt(2.0 * cert.A * kl) + cert.B
        cases.append(_make_case(f"test{j}", {"h": h, "N": n_steps}, lhs, rhs, tol=GRID_TOL))
    return VerificationReport(experiment="def-t2-ps-grid", cases=tuple(cases), seed=seed,
                              notes={"A": cert.A, "B": cert.B, "J": j_init})


def verify_def_t2(scenario: str, **kwargs) -> VerificationReport:
    """Dispatch between the exact Ornstein-Uhlenbeck path ('ou') and the
    Proximal Sampler grid path ('ps-grid')."""
    if scenario == "ou":
        return verify_def_t2_ou(**kwargs)
    if scenario == "ps-grid":
        return verify_def_t2_ps_grid(**kwargs)
    raise ValueError(f"unknown def-t2 scenario {scenario!r}")


# ---------------------------------------------------------------------------
# reverse transport-entropy of evolved pairs
# ---------------------------------------------------------------------------

def verify_rte_ou(alpha: float, T: float, pairs=None, n_pairs: int = 20,
                  seed: int = 0, dim: int = 1) -> VerificationReport:
    """Exact path: KL between time-T OU evolutions of Gaussian pairs against
    the continuous-time smoothing bound (alpha = 0 is the heat flow)."""
    from .model import quadratic_potential

    pot = quadratic_potential(alpha, dim=dim)
    kernel = KernelSpec(kind="ou_exact", h=T, potential=pot)
    rng = _case_rng(seed, 0)
    if pairs is None:
        base = GaussianMeasure(mean=(0.0,) * dim, var=(1.0,) * dim)
        gs = _random_gaussians(rng, base, 2 * n_pairs, mean_scale=2.0, logsd_scale=0.5)
        pairs = list(zip(gs[::2], gs[1::2]))
    cases = []
    for j, (mu, nu) in enumerate(pairs):
        w2 = w2_gaussian(mu, nu).value
        lhs = kl_gaussian(gaussian_pushforward(kernel, mu), gaussian_pushforward(kernel, nu)).value
        rhs = bounds.rte_ld(alpha, 0.0, T, w2)
        cases.append(_make_case(f"pair{j}", {"T": T, "alpha": alpha, "w2": w2},
                                lhs, rhs, tol=EXACT_TOL))
    return VerificationReport(experiment="rte-ou", cases=tuple(cases), seed=seed)


def verify_rte_ps_grid(pot: PotentialSpec, h: float, n_steps: int, pairs,
                       n_grid: int = 8192, span: float = 12.0,
                       seed: int = 0) -> VerificationReport:
    """Grid path: KL between N-step Proximal Sampler evolutions of Gaussian
    pairs against the discrete smoothing bound."""
    if pot.dim != 1:
        raise ValueError("grid path is 1D only")
    sds = [math.sqrt(max(g.var)) for pair in pairs for g in pair]
    means = [g.mean[0] for pair in pairs for g in pair]
    smax = max(max(sds), math.sqrt(1.0 / max(pot.alpha, 0.25) + h))
    lo, hi = min(means) - span * smax, max(means) + span * smax
    op = GridOperator(KernelSpec(kind="ps", h=h, potential=pot), lo, hi, n_grid)
    cases = []
    for j, (mu, nu) in enumerate(pairs):
        w2 = w2_gaussian(mu, nu).value
        r1 = grid_from_gaussian(mu, lo, hi, n_grid)
        r2 = grid_from_gaussian(nu, lo, hi, n_grid)
        for _ in range(n_steps):
            r1 = op.apply(r1)
            r2 = op.apply(r2)
        lhs = kl_grid(r1, r2).value
        rhs = bounds.rte_ps(pot.alpha, pot.lip_h, h, n_steps, w2)
        cases.append(_make_case(f"pair{j}", {"h": h, "N": n_steps, "w2": w2},
                                lhs, rhs, tol=GRID_TOL))
    return VerificationReport(experiment="rte-ps-grid", cases=tuple(cases), seed=seed)


def verify_rte(scenario: str, **kwargs) -> VerificationReport:
    if scenario == "ou":
        return verify_rte_ou(**kwargs)
    if scenario == "ps-grid":
        return verify_rte_ps_grid(**kwargs)
    raise ValueError(f"unknown rte scenario {scenario!r}")


# ---------------------------------------------------------------------------
# mixing curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixingCurve:
    """Total-variation trajectory with first-crossing mixing times.

    For continuous-time kernels t_mix interpolates tv linearly between steps
    (a reporting convention); discrete chains use the integer first crossing.
    """

    times: np.ndarray
    tv: np.ndarray
    t_mix: dict
    w_mix: dict
    reached: bool
    continuous_time: bool


def _first_crossing(times: np.ndarray, tv: np.ndarray, eps: float,
                    continuous: bool) -> float | None:
    below = np.nonzero(tv <= eps)[0]
    if below.size == 0:
        return None
    k = int(below[0])
    if not continuous or k == 0:
        return float(times[k])
    t0, t1 = times[k - 1], times[k]
    v0, v1 = tv[k - 1], tv[k]
    if v0 == v1:
        return float(t1)
    return float(t0 + (t1 - t0) * (v0 - eps) / (v0 - v1))


def stationarity_check(kernel: KernelSpec, candidate: GridDensity) -> float:
    """TV moved by one kernel application; 0 for an exact stationary law."""
    op = GridOperator(kernel, candidate.lo, candidate.hi, candidate.n_points)
    return tv_grid(candidate, op.apply(candidate)).value


def grid_fixed_point(kernel: KernelSpec, start: GridDensity, tol: float = 1e-10,
                     max_iter: int = 20_000) -> GridDensity:
    """Iterate the grid pushforward until successive laws differ by tv <= tol."""
    op = GridOperator(kernel, start.lo, start.hi, start.n_points)
    rho = start
    for _ in range(max_iter):
        nxt = op.apply(rho)
        if tv_grid(rho, nxt).value <= tol:
            return nxt
        rho = nxt
    raise RuntimeError(f"no grid fixed point within {max_iter} iterations")


def mixing_curve(kernel: KernelSpec, init, target, max_steps: int,
                 eps_list, check_stationarity: bool = True,
                 stop_factor: float = 0.2) -> MixingCurve:
    """Evolve init and record tv to the stationary target each step.

    Grid path: init and target are GridDensity on a common grid (the target is
    required to be stationary within tv 1e-3).  Exact path: init and target
    Gaussian with an affine-Gaussian kernel; tv is evaluated by quadrature of
    the exact densities on the target's 12-sigma window.
    """
    eps_list = sorted(float(e) for e in eps_list)
    if not eps_list:
        raise ValueError("need at least one epsilon")
    continuous = kernel.kind == "ou_exact"
    dt = kernel.h if continuous else 1.0
    tvs = []
    if isinstance(init, GridDensity):
        if not isinstance(target, GridDensity) or not init.same_grid(target):
            raise ValueError("grid mixing needs init and target on a common grid")
        if check_stationarity:
            drift = stationarity_check(kernel, target)
            if drift > 1e-3:
                raise ValueError(f"target moves by tv {drift:.2e} in one step; not stationary")
        op = GridOperator(kernel, init.lo, init.hi, init.n_points)
        rho = init
        tvs.append(tv_grid(rho, target).value)
        for _ in range(max_steps):
            rho = op.apply(rho)
            tvs.append(tv_grid(rho, target).value)
            if tvs[-1] <= stop_factor * eps_list[0]:
                break
    elif isinstance(init, GaussianMeasure) and isinstance(target, GaussianMeasure):
        from .model import grid_window

        lo, hi = grid_window(init, target)
        tgt_grid = grid_from_gaussian(target, lo, hi, 8192)
        g = init
        tvs.append(tv_grid(grid_from_gaussian(g, lo, hi, 8192), tgt_grid).value)
        for _ in range(max_steps):
            g = gaussian_pushforward(kernel, g)
            tvs.append(tv_grid(grid_from_gaussian(g, lo, hi, 8192), tgt_grid).value)
            if tvs[-1] <= stop_factor * eps_list[0]:
                break
    else:
        raise TypeError("init/target must both be GridDensity or both GaussianMeasure")
    tv = np.asarray(tvs)
    times = dt * np.arange(tv.size)
    t_mix, w_mix = {}, {}
    reached = True
    for eps in eps_list:
        hi_c = _first_crossing(times, tv, eps, continuous)
        lo_c = _first_crossing(times, tv, 1.0 - eps, continuous)
        if hi_c is None:
            reached = False
            continue
        t_mix[eps] = hi_c
        if lo_c is not None:
            w_mix[eps] = hi_c - lo_c
    return MixingCurve(times=times, tv=tv, t_mix=t_mix, w_mix=w_mix,
                       reached=reached, continuous_time=continuous)
