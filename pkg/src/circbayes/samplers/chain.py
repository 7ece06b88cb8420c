"""Chain driver: burn-in, thinning and trace collection for all three samplers."""

from __future__ import annotations

import logging
import time

import numpy as np

from ..circular import ConjugatePrior, FLAT_PRIOR, GroupedAngles, PosteriorParams, posterior_params
from ..errors import ConfigurationError, DomainError, EnvelopeError
from . import gibbs, mh, rejection
from .base import METHODS, SamplerConfig, Trace

logger = logging.getLogger(__name__)


def run_posterior(method: str, post: PosteriorParams, config: SamplerConfig, rng,
                  literal: bool = False) -> Trace:
    """Run one chain on precomputed posterior parameters."""
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; choose from {METHODS}")
    if literal and method != "gibbs":
        raise ConfigurationError("literal only applies to the Gibbs sampler")
    if not post.m_t > 0:
        raise DomainError("posterior has no observations (m_t = 0)")
    degenerate = post.degenerate_groups
    if degenerate:
        logger.warning("groups %s have zero posterior resultant; their means are drawn uniformly",
                       [j + 1 for j in degenerate])

    J = post.J
    Q = config.iterations
    mu_out = np.empty((Q, J))
    kappa_out = np.empty(Q)
    mu = config.mu_start_array(J)
    mu_n = post.kernel_mu_n()
    R_n = np.ascontiguousarray(post.R_n)
    n_iter = Q * config.lag
    trace = Trace(method, mu_out, kappa_out, n_iter, uniform_mu_groups=degenerate)

    start = time.perf_counter()
    if method == "gibbs":
        if not post.R_t > 0:
            raise DomainError("Gibbs sampling needs a positive total resultant R_t")
        gibbs._check_Z(config.Z)
        trace.max_selected_k = int(gibbs.gibbs_run(
            rng, mu, config.kappa_start, config.w_start, mu_n, R_n, post.R_t, post.m_t,
            config.Z, gibbs._LOG_FACT_SQ, literal,
            config.burn_in, Q, config.lag, mu_out, kappa_out,
        ))
    elif method == "mh":
        trace.accepted_count = int(mh.mh_run(
            rng, mu, config.kappa_start, mu_n, R_n, post.m_t,
            config.burn_in, Q, config.lag, mu_out, kappa_out,
        ))
    else:
        diag = np.zeros(2)
        cand = rejection.rejection_run(
            rng, mu, config.kappa_start, mu_n, R_n, post.m_t,
            config.burn_in, Q, config.lag, mu_out, kappa_out, diag,
        )
        if cand < 0:
            raise EnvelopeError(post.m_t, diag[1], rejection._REASONS[int(diag[0])])
        trace.candidate_count = int(cand)
    trace.wall_time = time.perf_counter() - start
    return trace


def run_chain(method: str, data: GroupedAngles,
              prior: ConjugatePrior | list = FLAT_PRIOR,
              config: SamplerConfig | None = None, rng=None,
              literal: bool = False) -> Trace:
    """Sample the joint posterior of the group means and the common kappa.

    Parameters
    ----------
    method : {"gibbs", "mh", "rejection"}
    data : GroupedAngles
    prior : ConjugatePrior or list of them, one per group
    config : SamplerConfig, defaults to ``SamplerConfig()``
    rng : numpy.random.Generator or int seed
    literal : bool
        Gibbs only; see :mod:`circbayes.samplers.gibbs`.

    Returns
    -------
    Trace
        ``config.iterations`` retained draws taken every ``config.lag``
        iterations after ``config.burn_in`` discarded ones. The same seed and
        configuration give identical draws.
    """
    config = config or SamplerConfig()
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    post = posterior_params(data, prior)
    return run_posterior(method, post, config, rng, literal=literal)
