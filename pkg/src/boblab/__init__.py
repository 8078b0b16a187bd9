"""Pseudospectral laboratory for a dispersive-dissipative model equation.

The package solves u_t - eps u_xx + H u_xx + u u_x = 0 on a periodic
interval (H the Hilbert transform), evaluates the refined Sobolev and
Bourgain-type norms adapted to that equation, and runs ratio studies
probing whether the linear and bilinear estimates behind its well-posedness
theory hold uniformly in the dissipation parameter eps in [0, 1].
"""

from .dyadic import (
    DyadicRegion,
    DyadicSymbol,
    chi,
    chi_range,
    eta,
    eta0,
    eta_leq,
    eta_range,
    eval_symbol,
    homogeneous_blocks,
    lowest_block,
    omega,
    project,
)
from .errors import (
    BoblabError,
    ConfigurationError,
    GridMismatchError,
    ResolutionError,
    SolverDivergenceError,
    SupportViolationError,
    ThresholdError,
)
from .estimates import (
    RatioSample,
    RatioStudy,
    bilinear_dyadic_study,
    block_forcing_field,
    dissipative_envelope_study,
    dissipative_kernel,
    duhamel_field,
    free_estimate_study,
    free_solution_field,
    full_bilinear_study,
    gaussian_data_family,
    inhomogeneous_estimate_study,
    j1_trend,
    kernel0_value,
    kernel_value,
    lowpass_data,
    multiplier_kernel_study,
    random_forcing_family,
    spectral_convolution,
)
from .evolution import (
    DispersionParams,
    Trajectory,
    apply_semigroup,
    dissipation_residuals,
    energy_series,
    integrate,
    nonlinear_term,
    picard_solve,
    solution_map,
)
from .experiments import (
    SweepRecord,
    SweepResult,
    default_gaussian,
    energy_report,
    inviscid_sweep,
    lipschitz_probe,
    picard_report,
    scaling_check,
)
from .grid import (
    Grid,
    PhysicalField,
    SpectralField,
    derivative,
    hilbert,
    l2_norm_physical,
    l2_norm_spectral,
    make_grid,
    to_physical,
    to_spectral,
)
from .norms import (
    BetaWeight,
    NormBreakdown,
    SpaceTimeField,
    SpaceTimeSpectral,
    b0_norm,
    beta_weight,
    fsigma_norm,
    nsigma_norm,
    refined_sobolev_norm,
    sobolev_norm,
    st_to_physical,
    st_to_spectral,
    xk_norm,
    y0_norm,
    yk_norm,
    zbar0_norm,
    zk_norm,
)

__version__ = "0.1.0"

__all__ = [
    "BetaWeight",
    "BoblabError",
    "ConfigurationError",
    "DispersionParams",
    "DyadicRegion",
    "DyadicSymbol",
    "Grid",
    "GridMismatchError",
    "NormBreakdown",
    "PhysicalField",
    "RatioSample",
    "RatioStudy",
    "ResolutionError",
    "SolverDivergenceError",
    "SpaceTimeField",
    "SpaceTimeSpectral",
    "SpectralField",
    "SupportViolationError",
    "SweepRecord",
    "SweepResult",
    "ThresholdError",
    "Trajectory",
    "apply_semigroup",
    "b0_norm",
    "beta_weight",
    "bilinear_dyadic_study",
    "block_forcing_field",
    "chi",
    "chi_range",
    "default_gaussian",
    "derivative",
    "dissipation_residuals",
    "dissipative_envelope_study",
    "dissipative_kernel",
    "duhamel_field",
    "energy_report",
    "energy_series",
    "eta",
    "eta0",
    "eta_leq",
    "eta_range",
    "eval_symbol",
    "free_estimate_study",
    "free_solution_field",
    "fsigma_norm",
    "full_bilinear_study",
    "gaussian_data_family",
    "hilbert",
    "homogeneous_blocks",
    "inhomogeneous_estimate_study",
    "integrate",
    "inviscid_sweep",
    "j1_trend",
    "kernel0_value",
    "kernel_value",
    "l2_norm_physical",
    "l2_norm_spectral",
    "lipschitz_probe",
    "lowest_block",
    "lowpass_data",
    "make_grid",
    "multiplier_kernel_study",
    "nonlinear_term",
    "nsigma_norm",
    "omega",
    "picard_report",
    "picard_solve",
    "project",
    "random_forcing_family",
    "refined_sobolev_norm",
    "scaling_check",
    "sobolev_norm",
    "solution_map",
    "spectral_convolution",
    "st_to_physical",
    "st_to_spectral",
    "to_physical",
    "to_spectral",
    "xk_norm",
    "y0_norm",
    "yk_norm",
    "zbar0_norm",
    "zk_norm",
]
