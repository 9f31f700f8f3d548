"""Smallest-eigenvalue distribution of complex Wishart (Laguerre) matrices."""

from ._core import (
    ConditioningError,
    ConvergenceError,
    DegenerateRecursionError,
    DomainError,
    GridError,
    PIIISolution,
    PIISolution,
    PrecisionError,
    airy_ai,
    bessel_det_f,
    bessel_i,
    compute_cdf,
    compute_H,
    corrected_cdf,
    hankel_oracle_cdf,
    log_gamma,
    mp_density,
    pdf_smallest,
    rng_id,
    sample_min_eig,
    soft_edge_params,
    solve_p2_hastings_mcleod,
    solve_p3,
    upper_incomplete_gamma,
    validate_identities,
)

__version__ = "0.1.0"
