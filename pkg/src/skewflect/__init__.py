"""Skew-reflected non-reversible Langevin sampling on convex bodies."""

from .geometry import Ball, Box, ConvexBody, body_from_config, cube, unit_ball
from .skewfield import (
    ResolventSummary,
    SkewField,
    build_tridiagonal_skew,
    resolvent_symmetric_part,
    skew_normal,
    skew_project,
    skew_reflect,
)
from .targets import (
    GaussianStandard,
    LinearRegression,
    LogisticRegression,
    Potential,
    Quadratic,
    draw_minibatch,
)
from .samplers import (
    ChainTrace,
    SamplerConfig,
    coupled_pair_run,
    plmc_step,
    psgld_step,
    rejection_sample_truncated_gaussian,
    run_chains,
    srnlmc_step,
    srnsgld_step,
)
from .metrics import W1Report, accuracy, fit_exp_rate, mse_trace, w1_1d, w1_per_dim

__version__ = "0.1.0"
