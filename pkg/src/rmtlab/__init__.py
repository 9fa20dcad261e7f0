"""Finite-n correlation kernels of unitary-invariant ensembles near a
nucleating spectral band, with finite-size GUE reference kernels."""

from .critical import (
    ScalingParams,
    curvature_c,
    detect_singular,
    find_xstar_nt,
    make_scaling,
    phix_growth_check,
    s_to_t,
    scaling_J,
    t_to_s,
    unit_equilibrium,
)
from .equilibrium import (
    EquilibriumData,
    density,
    g_function,
    lagrange_ell,
    log_potential,
    phi,
    q_eval,
    q_eval_resolvent,
    solve,
    variational_residual,
)
from .errors import (
    BranchCutError,
    InvalidParameterError,
    NoConvergenceError,
    NoSingularPointError,
    NotOneCutRegularError,
    NumericalBreakdownError,
    OffAxisRequiredError,
    PrecisionLimitError,
    RmtlabError,
    WrongOrderError,
)
from .experiments import (
    ComparisonReport,
    GridSpec,
    LambdaFit,
    compare_to_gue,
    convergence_sweep,
    expected_count,
    lambda_fit,
    rescaled_kernel,
)
from .gue import (
    PsiMatrix,
    gue_kernel,
    gue_kernel_grid,
    gue_kernel_sum,
    hermite,
    hermite_cauchy,
    psi_matrix,
)
from .orthopoly import (
    RecurrenceTable,
    WeightedValue,
    build_recurrence,
    eval_weighted,
    kernel,
    kernel_matrix,
    quadrature_support,
)
from .potential import Potential, from_config, make_eynard, rescale_t

__all__ = [
    "BranchCutError",
    "ComparisonReport",
    "EquilibriumData",
    "GridSpec",
    "InvalidParameterError",
    "LambdaFit",
    "NoConvergenceError",
    "NoSingularPointError",
    "NotOneCutRegularError",
    "NumericalBreakdownError",
    "OffAxisRequiredError",
    "Potential",
    "PrecisionLimitError",
    "PsiMatrix",
    "RecurrenceTable",
    "RmtlabError",
    "ScalingParams",
    "WeightedValue",
    "WrongOrderError",
    "build_recurrence",
    "compare_to_gue",
    "convergence_sweep",
    "curvature_c",
    "density",
    "detect_singular",
    "eval_weighted",
    "expected_count",
    "find_xstar_nt",
    "from_config",
    "g_function",
    "gue_kernel",
    "gue_kernel_grid",
    "gue_kernel_sum",
    "hermite",
    "hermite_cauchy",
    "kernel",
    "kernel_matrix",
    "lagrange_ell",
    "lambda_fit",
    "log_potential",
    "make_eynard",
    "make_scaling",
    "phi",
    "phix_growth_check",
    "psi_matrix",
    "q_eval",
    "q_eval_resolvent",
    "quadrature_support",
    "rescale_t",
    "rescaled_kernel",
    "s_to_t",
    "scaling_J",
    "solve",
    "t_to_s",
    "unit_equilibrium",
    "variational_residual",
]
