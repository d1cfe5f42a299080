"""Rate experiments over coupled compound Poisson levels."""

from _levybsde.rates.bounds import (
    AppendixReport,
    BoundaryReport,
    DivergenceReport,
    LowerBoundReport,
    appendix_random_walk_gap,
    check_bg_boundary_examples,
    check_optimality_divergence,
    first_jump_probability_root,
    poisson_walk_sup,
    wasserstein_bounds,
)
from _levybsde.rates.bsde import (
    BSDERateResult,
    apriori_profile,
    default_beta,
    run_bsde_rate,
    run_generator_gap_rate,
)
from _levybsde.rates.fit import SlopeFit, finest_slope, fit_loglog_slope
from _levybsde.rates.process import (
    check_reference,
    process_profile,
    reference_bias_bound,
    removed_second_moment,
    required_eps_ref,
    run_process_rate,
    sandwich_check,
)
from _levybsde.rates.reports import (
    ExperimentPreconditionError,
    RateReport,
    rms_with_se,
    slope_check,
)

__all__ = [
    "AppendixReport",
    "BSDERateResult",
    "BoundaryReport",
    "DivergenceReport",
    "ExperimentPreconditionError",
    "LowerBoundReport",
    "RateReport",
    "SlopeFit",
    "appendix_random_walk_gap",
    "apriori_profile",
    "check_bg_boundary_examples",
    "check_optimality_divergence",
    "check_reference",
    "default_beta",
    "finest_slope",
    "first_jump_probability_root",
    "fit_loglog_slope",
    "poisson_walk_sup",
    "process_profile",
    "reference_bias_bound",
    "removed_second_moment",
    "required_eps_ref",
    "rms_with_se",
    "run_bsde_rate",
    "run_generator_gap_rate",
    "run_process_rate",
    "sandwich_check",
    "slope_check",
    "wasserstein_bounds",
]
