"""curvlab: curvature certificates and transport-entropy bounds for weakly
contracting Markov kernels, verified against exact Gaussian and quadrature
oracles and Monte-Carlo simulation of Langevin Monte Carlo and the Proximal
Sampler."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    EmpiricalMeasure,
    GaussianMeasure,
    GridDensity,
    PotentialSpec,
    dirac,
    grad_h_sup_norm,
    potential_gradient,
    potential_value,
    quadratic_potential,
)
from .kernels import (  # noqa: F401
    KernelSpec,
    backward_grid_law,
    gaussian_pushforward,
    grid_pushforward,
    run_chain,
    step_sample,
)
from .bounds import (  # noqa: F401
    CurvatureCert,
    DefTpCert,
    RteCert,
    ShiftSchedule,
    curvature_iterate,
    curvature_lmc,
    curvature_ps,
    def_t2_ld,
    def_t2_ps,
    def_tp_iterate,
    def_tp_one_step,
    def_tp_winfty_shift,
    poincare_bound,
    rte_discrete,
    rte_ld,
    rte_ps,
    shift_objective,
    shift_opt_closed,
    shift_opt_dp,
    wmix_bound_ld,
    wmix_bound_ps,
    wtv_bound,
)
