"""Memory kernel of the generalized Langevin equation for a 1-D harmonic lattice."""

from .asymptotics import (
    DecayFit,
    EigenBranches,
    bound_constant,
    bound_linear,
    branch_amplitude_caps,
    char_poly,
    char_poly_residual,
    char_weights,
    eigen_branches,
    fit_decay_rate,
    stationary_phase_envelope,
    stationary_phase_estimate,
)
from .cg import (
    CGSymbolPair,
    ConstantBasis,
    LinearBasis,
    WeightingScheme,
    cg_symbols,
    constant_basis,
    linear_basis,
    randomized_constant_basis,
    randomized_linear_basis,
)
from .kernel import (
    KernelSeries,
    QuadratureGrid,
    midpoint_grid,
    theta00_zero_simplified,
    theta_entry,
    theta_spatial_series,
    theta_time_series,
)
from .lattice import (
    BlockPair,
    ForceConstants,
    StabilityError,
    SymbolMatrix,
    analytic_eigenpairs,
    assemble_blocks,
    dispersion,
    folded_wavenumbers,
    require_stable,
    symbol,
    validate_stability,
)
from .oracle import DenseChain, build_dense, recurrence_horizon, theta_dense

__all__ = [
    "BlockPair",
    "CGSymbolPair",
    "ConstantBasis",
    "DecayFit",
    "DenseChain",
    "EigenBranches",
    "ForceConstants",
    "KernelSeries",
    "LinearBasis",
    "QuadratureGrid",
    "StabilityError",
    "SymbolMatrix",
    "WeightingScheme",
    "analytic_eigenpairs",
    "assemble_blocks",
    "bound_constant",
    "bound_linear",
    "branch_amplitude_caps",
    "build_dense",
    "cg_symbols",
    "char_poly",
    "char_poly_residual",
    "char_weights",
    "constant_basis",
    "dispersion",
    "eigen_branches",
    "fit_decay_rate",
    "folded_wavenumbers",
    "linear_basis",
    "midpoint_grid",
    "randomized_constant_basis",
    "randomized_linear_basis",
    "recurrence_horizon",
    "require_stable",
    "stationary_phase_envelope",
    "stationary_phase_estimate",
    "symbol",
    "theta00_zero_simplified",
    "theta_dense",
    "theta_entry",
    "theta_spatial_series",
    "theta_time_series",
    "validate_stability",
]

__version__ = "0.1.0"
