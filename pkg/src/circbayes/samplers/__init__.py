"""MCMC samplers for the group means and common concentration."""

from .base import (
    KAPPA_FLOOR,
    METHODS,
    ChainState,
    SamplerConfig,
    Trace,
    sample_mu_conditional,
    sample_truncated_exp,
)
from .chain import run_chain, run_posterior
from .gibbs import gibbs_iteration
from .mh import chi2_logpdf, log_kappa_conditional, mh_iteration, mh_log_ratio
from .rejection import beta_t, rejection_kappa

__all__ = [
    "KAPPA_FLOOR",
    "METHODS",
    "ChainState",
    "SamplerConfig",
    "Trace",
    "beta_t",
    "chi2_logpdf",
    "gibbs_iteration",
    "log_kappa_conditional",
    "mh_iteration",
    "mh_log_ratio",
    "rejection_kappa",
    "run_chain",
    "run_posterior",
    "sample_mu_conditional",
    "sample_truncated_exp",
]
