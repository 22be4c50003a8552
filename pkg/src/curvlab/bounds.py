"""Certificate calculus for weakly contracting Markov kernels.

A curvature certificate (p, K, M) asserts W_p(delta_x P, delta_y P) <=
K|x-y| + M.  A defective transport-entropy certificate (p, A, B) asserts
W_p(nu, mu) <= sqrt(2 A KL(nu||mu)) + B.  A reverse-transport certificate C
asserts KL(delta_x P || delta_y P) <= C|x-y|^2.  The functions below transform
these certificates: one-step and N-step propagation, continuous-time and
Proximal-Sampler specializations, the shifted-composition optimization with
its closed form and an independent dynamic-programming oracle, and the
mixing-window expressions (which hold up to a constant depending only on the
accuracy level and are flagged accordingly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CurvatureCert",
    "DefTpCert",
    "RteCert",
    "ShiftSchedule",
    "RteDiscreteBound",
    "WmixBound",
    "curvature_lmc",
    "curvature_ps",
    "curvature_iterate",
    "def_tp_one_step",
    "def_tp_iterate",
    "def_tp_winfty_shift",
    "def_t2_ld",
    "def_t2_ps",
    "shift_objective",
    "shift_opt_closed",
    "shift_opt_dp",
    "shift_opt_dp_sweep",
    "rte_discrete",
    "rte_ld",
    "rte_ps",
    "wtv_bound",
    "poincare_bound",
    "wmix_bound_ld",
    "wmix_bound_ps",
]


@dataclass(frozen=True)
class CurvatureCert:
    """W_p(delta_x P, delta_y P) <= K d(x,y) + M."""

    p: float
    K: float
    M: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("order p must be >= 1")
        if not (0.0 <= self.K <= 1.0):
            raise ValueError("K must lie in [0, 1]")
        if self.M < 0:
            raise ValueError("M must be >= 0")


@dataclass(frozen=True)
class DefTpCert:
    """W_p(nu, mu) <= sqrt(2 A KL(nu||mu)) + B for all nu."""

    p: float
    A: float
    B: float

    def __post_init__(self):
        if not (1.0 <= self.p <= 2.0):
            raise ValueError("order p must lie in [1, 2]")
        if self.A < 0 or self.B < 0:
            raise ValueError("A and B must be >= 0")


@dataclass(frozen=True)
class RteCert:
    """KL(delta_x P || delta_y P) <= C |x-y|^2."""

    C: float

    def __post_init__(self):
        if self.C < 0:
            raise ValueError("C must be >= 0")


@dataclass(frozen=True)
class ShiftSchedule:
    """Shift parameters eta_0..eta_{N-1} (last one = 1) and the achieved value."""

    etas: tuple
    value: float

    def __post_init__(self):
        if not self.etas or abs(self.etas[-1] - 1.0) > 1e-15:
            raise ValueError("schedule must end with eta = 1")
        if any(e < -1e-15 or e > 1.0 + 1e-15 for e in self.etas):
            raise ValueError("every eta must lie in [0, 1]")
        if self.value < 0:
            raise ValueError("value must be >= 0")


@dataclass(frozen=True)
class RteDiscreteBound:
    """Exact two-regime reverse-transport bound and its doubled single-formula majorant."""

    value: float
    majorant: float


@dataclass(frozen=True)
class WmixBound:
    """Mixing-window expression, valid up to a constant depending only on the
    accuracy level; never assert it as a hard inequality."""

    value: float
    poincare_free: float | None = None
    up_to_constant: bool = True


# ---------------------------------------------------------------------------
# curvature certificates
# ---------------------------------------------------------------------------

def curvature_lmc(alpha: float, beta: float, L: float, h: float, p: float = 2.0) -> CurvatureCert:
    """One Langevin Monte Carlo step contracts W_p by 1 - alpha*h with defect 2*L*h,
    for step sizes h <= 1/beta."""
    if not (alpha <= beta):
        raise ValueError("need alpha <= beta")
    if L < 0 or h <= 0:
        raise ValueError("need L >= 0 and h > 0")
    if beta > 0 and h > 1.0 / beta + 1e-12:
        raise ValueError("h > 1/beta")
    return CurvatureCert(p=p, K=1.0 - alpha * h, M=2.0 * L * h)


def curvature_ps(alpha: float, L: float, h: float, p: float = 2.0) -> CurvatureCert:
    """One Proximal Sampler step contracts W_p by 1/(alpha*h + 1) with defect
    2*L*h/(alpha*h + 1)."""
    if alpha < 0 or L < 0 or h <= 0:
        raise ValueError("need alpha, L >= 0 and h > 0")
    r = alpha * h + 1.0
    return CurvatureCert(p=p, K=1.0 / r, M=2.0 * L * h / r)


def _geometric_sum(K: float, N: int) -> float:
    """(1 - K^N) / (1 - K), read as N when K = 1."""
    if K == 1.0:
        return float(N)
    return (1.0 - K ** N) / (1.0 - K)


def curvature_iterate(cert: CurvatureCert, N: int) -> CurvatureCert:
    """N-step certificate (K^N, M (1-K^N)/(1-K))."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return CurvatureCert(p=cert.p, K=cert.K ** N, M=cert.M * _geometric_sum(cert.K, N))


# ---------------------------------------------------------------------------
# defective transport-entropy propagation
# ---------------------------------------------------------------------------

def def_tp_one_step(init: DefTpCert, step: DefTpCert, curv: CurvatureCert) -> DefTpCert:
    """Propagate (J, S) one kernel step: (A + K^2 J, K S + B + M)."""
    if not (init.p == step.p == curv.p):
        raise ValueError("certificates must share the same order p")
    K, M = curv.K, curv.M
    return DefTpCert(p=init.p, A=step.A + K * K * init.A, B=K * init.B + step.B + M)


def def_tp_iterate(init: DefTpCert, step: DefTpCert, curv: CurvatureCert, N: int) -> DefTpCert:
    """N-step propagation:
    (K^{2N} J + A (1-K^{2N})/(1-K^2), K^N S + (B+M) (1-K^N)/(1-K))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not (init.p == step.p == curv.p):
        raise ValueError("certificates must share the same order p")
    K, M = curv.K, curv.M
    a_part = curv.K ** (2 * N) * init.A + step.A * _geometric_sum(K * K, N)
    b_part = K ** N * init.B + (step.B + M) * _geometric_sum(K, N)
    return DefTpCert(p=init.p, A=a_part, B=b_part)


def def_tp_winfty_shift(cert: DefTpCert, w_inf: float) -> DefTpCert:
    """A W_infinity-close measure inherits the certificate with defect + 2*w_inf."""
    if w_inf < 0:
        raise ValueError("w_inf must be >= 0")
    return DefTpCert(p=cert.p, A=cert.A, B=cert.B + 2.0 * w_inf)


def def_t2_ld(alpha: float, L: float, T: float, J: float, S: float) -> DefTpCert:
    """Defective T2 certificate of the time-T Langevin law started from a
    (J, S)-certified measure."""
    if T <= 0:
        raise ValueError("T must be > 0")
    if min(alpha, L, J, S) < 0:
        raise ValueError("alpha, L, J, S must be >= 0")
    if alpha == 0:
        return DefTpCert(p=2.0, A=J + 2.0 * T, B=S + 2.0 * L * T)
    e1 = math.exp(-alpha * T)
    e2 = e1 * e1
    return DefTpCert(p=2.0, A=e2 * J + (1.0 - e2) / alpha,
                     B=e1 * S + 2.0 * L * (1.0 - e1) / alpha)


def def_t2_ps(alpha: float, L: float, h: float, N: int, J: float, S: float) -> DefTpCert:
    """Defective T2 certificate after N Proximal Sampler steps."""
    if h <= 0 or N < 1:
        raise ValueError("need h > 0 and N >= 1")
    if min(alpha, L, J, S) < 0:
        raise ValueError("alpha, L, J, S must be >= 0")
    if alpha == 0:
        return DefTpCert(p=2.0, A=J + 2.0 * N * h, B=S + 6.0 * N * L * h)
    r = 1.0 + alpha * h
    inv_rn = math.exp(-N * math.log(r))     # r^{-N} without overflow at large N
    inv_r2n = inv_rn * inv_rn
    return DefTpCert(p=2.0, A=J * inv_r2n + (1.0 - inv_r2n) / alpha,
                     B=S * inv_rn + 6.0 * L * (1.0 - inv_rn) / alpha)


# ---------------------------------------------------------------------------
# shifted-composition optimization
# ---------------------------------------------------------------------------
#
# The N-step smoothing bound minimizes  sum_n eta_n^2 A_n^2  over shifts
# 0 <= eta_n <= 1 with eta_{N-1} = 1, where A_0 = A and
# A_{n+1} = K (1 - eta_n) A_n + M.

def shift_objective(etas, K: float, M: float, A: float) -> float:
    """Evaluate the explicit shift objective at a given schedule."""
    etas = list(etas)
    if not etas or abs(etas[-1] - 1.0) > 1e-12:
        raise ValueError("schedule must end with eta = 1")
    total = 0.0
    a = A
    for eta in etas:
        if eta < -1e-12 or eta > 1.0 + 1e-12:
            raise ValueError("every eta must lie in [0, 1]")
        total += eta * eta * a * a
        a = K * (1.0 - eta) * a + M
    return total


def _closed_value(n: int, K: float, M: float, A: float) -> float:
    if n == 1:
        return A * A
    if K == 1.0:
        if A >= M:
            return (A + (n - 1) * M) ** 2 / n
        return A * A + (n - 1) * M * M
    kn1 = K ** (n - 1)
    threshold = M * kn1 * (1.0 + K) / (1.0 + kn1)
    if A >= threshold:
        m = M * (1.0 - kn1) / (1.0 - K)
        return (1.0 - K * K) / (1.0 - K ** (2 * n)) * (kn1 * A + m) ** 2
    return A * A + M * M * (1.0 - kn1) ** 2 * (1.0 - K * K) / (
        (1.0 - K ** (2 * n - 2)) * (1.0 - K) ** 2)


def _opt_first_eta(n: int, K: float, M: float, A: float) -> float:
    """Optimal first shift of the n-step problem at amplitude A.

    The interior optimizer comes from minimizing
    eta^2 A^2 + S(n-1, K(1-eta)A + M) with the remaining steps already in
    their first regime; outside the feasibility threshold the boundary
    eta = 1 is optimal.  For A = 0 the first term vanishes and any shift is
    optimal; eta = 1 is used for definiteness.
    """
    if n == 1:
        return 1.0
    if A <= 0:
        return 1.0
    if K == 1.0:
        if A >= M:
            return (A + (n - 1) * M) / (n * A)
        return 1.0
    kn1 = K ** (n - 1)
    threshold = M * kn1 * (1.0 + K) / (1.0 + kn1)
    if A >= threshold:
        m = M * (1.0 - kn1) / (1.0 - K)
        return (1.0 - K * K) * kn1 / (A * (1.0 - K ** (2 * n))) * (kn1 * A + m)
    return 1.0


def shift_opt_closed(N: int, K: float, M: float, A: float) -> ShiftSchedule:
    """Closed-form minimum of the shift objective plus the optimizing schedule.

    Two regimes: for amplitudes above the threshold M K^{N-1}(1+K)/(1+K^{N-1})
    (read as A >= M when K = 1) the minimum is
        (1-K^2)/(1-K^{2N}) * (K^{N-1} A + M (1-K^{N-1})/(1-K))^2,
    otherwise it is A^2 plus a pure-defect term.  The schedule is rebuilt by
    applying the per-step optimizer recursively; it is a reconstruction whose
    only guarantee is that the objective evaluated at it reproduces the
    closed-form value.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not (0.0 < K <= 1.0):
        raise ValueError("closed form covers 0 < K <= 1 only")
    if M < 0 or A < 0:
        raise ValueError("M and A must be >= 0")
    etas = []
    a = A
    for i in range(N):
        eta = _opt_first_eta(N - i, K, M, a)
        etas.append(eta)
        a = K * (1.0 - eta) * a + M
    return ShiftSchedule(etas=tuple(etas), value=_closed_value(N, K, M, A))


def _eta_grid(size: int) -> np.ndarray:
    """Shift grid containing 0 and 1: log-spaced below 0.05 (interior optima can
    be geometrically small), uniform above."""
    n_geo = max(3, (3 * size) // 10)
    n_lin = size - n_geo - 1
    return np.concatenate([
        [0.0],
        np.geomspace(1e-10, 0.05, n_geo),
        np.linspace(0.05, 1.0, n_lin + 1)[1:],
    ])


def _a_grid(a_max: float, size: int) -> np.ndarray:
    """Amplitude grid on [0, a_max], log-spaced so that interpolation error is
    relative (values scale like the square of the amplitude)."""
    return np.concatenate([[0.0], np.geomspace(a_max * 1e-9, a_max, size - 1)])


def shift_opt_dp(N: int, K: float, M: float, A: float,
                 a_grid_size: int = 2001, eta_grid_size: int = 1001) -> float:
    """Value iteration for the shift objective; independent oracle for
    shift_opt_closed.

    Tables hold S(n, .) on an amplitude grid over [0, A + N*M/K] (reachable
    amplitudes never exceed A + N*M); queries interpolate linearly between
    nodes and each node minimizes exhaustively over the shift grid.  Also
    covers K = 0, which the closed form rejects.
    """
    if a_grid_size < 101 or eta_grid_size < 101:
        raise ValueError("grid sizes must be >= 101")
    value = None
    for n, val in _dp_profile(N, K, M, A, a_grid_size, eta_grid_size):
        value = val
    return value


def shift_opt_dp_sweep(cases, a_grid_size: int = 2001, eta_grid_size: int = 1001) -> list:
    """shift_opt_dp over many (N, K, M, A) cells.

    Cells that differ only in N share value-iteration tables (one pass of the
    iteration yields every level), with the amplitude window padded for the
    largest N of the group; the log-spaced grid keeps the interpolation error
    relative, so the shared window does not cost accuracy.
    """
    if a_grid_size < 101 or eta_grid_size < 101:
        raise ValueError("grid sizes must be >= 101")
    cases = [tuple(c) for c in cases]
    groups: dict = {}
    for idx, (n, k, m, a) in enumerate(cases):
        groups.setdefault((k, m, a), []).append((n, idx))
    out = [0.0] * len(cases)
    for (k, m, a), members in groups.items():
        n_max = max(n for n, _ in members)
        by_n: dict = {}
        for n, idx in members:
            by_n.setdefault(n, []).append(idx)
        for value_n, value in _dp_profile(n_max, k, m, a, a_grid_size, eta_grid_size):
            for idx in by_n.get(value_n, ()):
                out[idx] = value
    return out


def _dp_profile(n_max: int, K: float, M: float, A: float,
                a_grid_size: int, eta_grid_size: int):
    """Yield (n, S(n, A)) for n = 1..n_max from one value-iteration pass."""
    if n_max < 1:
        raise ValueError("N must be >= 1")
    if not (0.0 <= K <= 1.0) or M < 0 or A < 0:
        raise ValueError("need K in [0, 1] and M, A >= 0")
    yield 1, A * A
    if n_max == 1:
        return
    a_max = A + n_max * M / K if K > 0 else max(A, M)
    if a_max == 0.0:
        for n in range(2, n_max + 1):
            yield n, 0.0
        return
    nodes = _a_grid(a_max, a_grid_size)
    etas = _eta_grid(eta_grid_size)
    shrink = K * (1.0 - etas)
    eta_sq = etas * etas

    def level(table, amps):
        queries = np.clip(shrink[None, :] * amps[:, None] + M, 0.0, a_max)
        cont = np.interp(queries.ravel(), nodes, table).reshape(queries.shape)
        return (eta_sq[None, :] * (amps * amps)[:, None] + cont).min(axis=1)

    table = nodes * nodes
    point = np.array([A])
    for n in range(2, n_max + 1):
        yield n, float(level(table, point)[0])
        if n < n_max:
            table = level(table, nodes)


# ---------------------------------------------------------------------------
# reverse transport-entropy bounds
# ---------------------------------------------------------------------------

def rte_discrete(rte: RteCert, curv: CurvatureCert, N: int, w2: float) -> RteDiscreteBound:
    """N-step smoothing bound KL(mu P^N || nu P^N) <= C * S(N, W2(mu, nu)).

    Returns the exact two-regime value together with the doubled one-formula
    majorant.  K = 0 falls outside the closed form and routes through the
    dynamic program (N = 1 reduces to the direct bound C * w2^2).
    """
    if curv.p != 2.0:
        raise ValueError("reverse-transport propagation needs a p = 2 certificate")
    if N < 1 or w2 < 0:
        raise ValueError("need N >= 1 and w2 >= 0")
    K, M, C = curv.K, curv.M, rte.C
    if K > 0:
        value = C * shift_opt_closed(N, K, M, w2).value
    elif N == 1:
        value = C * w2 * w2
    else:
        value = C * shift_opt_dp(N, 0.0, M, w2)
    if K == 1.0:
        majorant = 2.0 * C * (w2 + (N - 1) * M) ** 2 / N
    else:
        kn1 = K ** (N - 1)
        gsum = (1.0 - kn1) / (1.0 - K)
        majorant = 2.0 * C * (1.0 - K * K) / (1.0 - K ** (2 * N)) * (kn1 * w2 + M * gsum) ** 2
    return RteDiscreteBound(value=value, majorant=majorant)


def rte_ld(alpha: float, L: float, T: float, w2: float) -> float:
    """Langevin smoothing bound on KL at time T from an initial W2 distance."""
    if T <= 0 or w2 < 0 or alpha < 0 or L < 0:
        raise ValueError("need T > 0 and alpha, L, w2 >= 0")
    if alpha == 0:
        return (w2 + 2.0 * L * T) ** 2 / (4.0 * T)
    e1 = math.exp(-alpha * T)
    return alpha / (2.0 * (1.0 - e1 * e1)) * (e1 * w2 + 2.0 * L * (1.0 - e1) / alpha) ** 2


def rte_ps(alpha: float, L: float, h: float, N: int, w2: float) -> float:
    """Proximal Sampler smoothing bound on KL after N steps."""
    if h <= 0 or N < 1 or w2 < 0 or alpha < 0 or L < 0:
        raise ValueError("need h > 0, N >= 1 and alpha, L, w2 >= 0")
    if alpha == 0:
        return (w2 + 2.0 * L * N * h) ** 2 / (2.0 * N * h)
    r = 1.0 + alpha * h
    # divide through by r^{2(N-1)} so large N underflows instead of overflowing
    d = math.exp(-(N - 1) * math.log(r))    # r^{-(N-1)}
    return (alpha * (2.0 + alpha * h) / (r * r - d * d)
            * (w2 * d + 2.0 * L / alpha * (1.0 - d)) ** 2)


# ---------------------------------------------------------------------------
# mixing-window ingredients
# ---------------------------------------------------------------------------

def wtv_bound(c1: DefTpCert, c2: DefTpCert, tv: float) -> float:
    """W_p bound from two defective certificates and the total variation:
    (sqrt(A1) + sqrt(A2)) sqrt(2 log(1/(1-tv))) + B1 + B2."""
    if c1.p != c2.p:
        raise ValueError("certificates must share the same order p")
    if not (0.0 <= tv <= 1.0):
        raise ValueError("tv must lie in [0, 1]")
    if tv >= 1.0:
        return float("inf")
    return ((math.sqrt(c1.A) + math.sqrt(c2.A)) * math.sqrt(2.0 * math.log(1.0 / (1.0 - tv)))
            + c1.B + c2.B)


def poincare_bound(alpha: float, L: float) -> float:
    """Poincare constant bound (1/alpha) exp(L^2/alpha + 4L/sqrt(alpha))."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if L < 0:
        raise ValueError("L must be >= 0")
    return math.exp(L * L / alpha + 4.0 * L / math.sqrt(alpha)) / alpha


def wmix_bound_ld(alpha: float, L: float, cp: float, t0: float,
                  J: float = 0.0, S: float = 0.0) -> WmixBound:
    """Langevin mixing-window expression (up to a constant depending only on
    the accuracy level):

        cp (L^2/alpha + 1) + sqrt(cp) (e^{-alpha t0}(sqrt(J)+S) + 1/sqrt(alpha) + L/alpha)

    plus the Poincare-free variant obtained from poincare_bound.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if min(L, cp, t0, J, S) < 0:
        raise ValueError("L, cp, t0, J, S must be >= 0")
    tail = math.exp(-alpha * t0) * (math.sqrt(J) + S)
    value = (cp * (L * L / alpha + 1.0)
             + math.sqrt(cp) * (tail + 1.0 / math.sqrt(alpha) + L / alpha))
    pfree = (math.exp(L * L / alpha + 4.0 * L / math.sqrt(alpha)) / alpha
             * (1.0 + L * L / alpha + L / math.sqrt(alpha) + tail * math.sqrt(alpha)))
    return WmixBound(value=value, poincare_free=pfree, up_to_constant=True)


def wmix_bound_ps(alpha: float, L: float, h: float, cp: float) -> WmixBound:
    """Proximal Sampler mixing-window expression with c_hat = 1 + cp/h:

        c_hat (1 + L^2 (1+alpha h)/alpha)
          + sqrt( c_hat (1+alpha h)/h * (1/alpha + L^2/alpha^2) )
    """
    if alpha <= 0 or h <= 0:
        raise ValueError("need alpha > 0 and h > 0")
    if L < 0 or cp < 0:
        raise ValueError("L and cp must be >= 0")
    chat = 1.0 + cp / h
    r = 1.0 + alpha * h
    value = (chat * (1.0 + L * L * r / alpha)
             + math.sqrt(chat * r / h * (1.0 / alpha + L * L / (alpha * alpha))))
    return WmixBound(value=value, poincare_free=None, up_to_constant=True)
