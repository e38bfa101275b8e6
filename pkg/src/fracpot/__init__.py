"""Numerical toolkit for (-Delta)^s u = |grad u|^q + omega on R^n.

Riesz potentials with free-space FFT convolution, the spectral fractional
Laplacian, Riesz capacities with the admissibility ratio, the contracting
Picard iteration with its constants ledger, and norm/decay diagnostics.
"""

__version__ = "0.1.0"

from .capacity import (
    AdmissibilityReport,
    CapacityEstimate,
    DominationReport,
    ball_capacity_upper,
    ball_mask,
    check_capacity_domination,
    estimate_ball_capacity,
    estimate_capacity,
    paper_ball_candidate,
    scale_measure_admissible,
    wolff_ratio,
)
from .core import (
    Grid,
    GridField,
    Measure,
    Parameters,
    VectorGridField,
    measure_ball_mass,
    total_mass,
    validate_parameters,
)
from .diagnostics import (
    DecayFit,
    decay_fit,
    diagnostics_report,
    distribution_function,
    distribution_slope,
    lebesgue_norm,
    marcinkiewicz_quasinorm,
    positivity_check,
)
from .errors import FracpotError
from .fraclap import (
    TestFunction,
    default_test_functions,
    fractional_laplacian_spectral,
    weak_residual,
)
from .riesz import (
    fraclap_constant,
    gradient_comparison_constant,
    riesz_constant,
    riesz_gradient_field,
    riesz_gradient_measure,
    riesz_kernel,
    riesz_potential_field,
    riesz_potential_measure,
    weighted_ls_norm,
)
from .solver import (
    ConstantsLedger,
    SolveReport,
    constants_ledger,
    gradient_bound_check,
    picard_solve,
    representation_residual,
    sandwich_check,
)
from .special import ball_volume, gamma, sphere_surface

__all__ = [
    "AdmissibilityReport",
    "CapacityEstimate",
    "ConstantsLedger",
    "DecayFit",
    "DominationReport",
    "FracpotError",
    "Grid",
    "GridField",
    "Measure",
    "Parameters",
    "SolveReport",
    "TestFunction",
    "VectorGridField",
    "ball_capacity_upper",
    "ball_mask",
    "ball_volume",
    "check_capacity_domination",
    "constants_ledger",
    "decay_fit",
    "default_test_functions",
    "diagnostics_report",
    "distribution_function",
    "distribution_slope",
    "estimate_ball_capacity",
    "estimate_capacity",
    "fraclap_constant",
    "fractional_laplacian_spectral",
    "gamma",
    "gradient_bound_check",
    "gradient_comparison_constant",
    "lebesgue_norm",
    "marcinkiewicz_quasinorm",
    "measure_ball_mass",
    "paper_ball_candidate",
    "picard_solve",
    "positivity_check",
    "representation_residual",
    "riesz_constant",
    "riesz_gradient_field",
    "riesz_gradient_measure",
    "riesz_kernel",
    "riesz_potential_field",
    "riesz_potential_measure",
    "sandwich_check",
    "scale_measure_admissible",
    "sphere_surface",
    "total_mass",
    "validate_parameters",
    "weak_residual",
    "weighted_ls_norm",
    "wolff_ratio",
]
