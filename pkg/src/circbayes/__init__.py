"""Bayesian inference for grouped circular data under the von Mises model.

The group means have independent conjugate priors and the groups share one
concentration ``kappa``. Three exact samplers are provided for the joint
posterior: a latent-variable Gibbs sampler, a Metropolis-Hastings sampler
and a rejection sampler for ``kappa``.
"""

__version__ = "0.1.0"

from .circular import (
    FLAT_PRIOR,
    ConjugatePrior,
    GroupedAngles,
    PosteriorParams,
    SufficientStats,
    bessel_ratio,
    circular_distance,
    circular_mean,
    log_bessel_i0,
    posterior_params,
    sample_von_mises,
    sufficient_stats,
    vm_log_density,
    wrap_angle,
)
from .errors import (
    CircBayesError,
    ConfigurationError,
    DatasetError,
    DomainError,
    EnvelopeError,
    InfeasibleDesignError,
    ReplicationError,
    UndefinedDirectionError,
)
from .inference import (
    CircularInterval,
    IntervalSummary,
    PosteriorSummary,
    circular_cci,
    hdi,
    mode_from_hdi,
    summarize,
)
from .samplers import METHODS, SamplerConfig, Trace, run_chain

__all__ = [
    "FLAT_PRIOR",
    "METHODS",
    "CircBayesError",
    "CircularInterval",
    "ConfigurationError",
    "ConjugatePrior",
    "DatasetError",
    "DomainError",
    "EnvelopeError",
    "GroupedAngles",
    "InfeasibleDesignError",
    "IntervalSummary",
    "PosteriorParams",
    "PosteriorSummary",
    "ReplicationError",
    "SamplerConfig",
    "SufficientStats",
    "Trace",
    "UndefinedDirectionError",
    "bessel_ratio",
    "circular_cci",
    "circular_distance",
    "circular_mean",
    "hdi",
    "log_bessel_i0",
    "mode_from_hdi",
    "posterior_params",
    "run_chain",
    "sample_von_mises",
    "sufficient_stats",
    "summarize",
    "vm_log_density",
    "wrap_angle",
]
