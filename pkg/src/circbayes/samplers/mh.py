"""Metropolis-Hastings within Gibbs: exact von Mises draws for the group
means, then a chi-square proposal for kappa whose degrees of freedom equal
the current kappa."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .. import _numerics
from ..circular import PosteriorParams
from ..errors import DomainError
from .base import ChainState, mu_conditional_draws, weighted_cos_sum

_LOG2 = math.log(2.0)


@njit(cache=True)
def _chi2_logpdf(x, df):
    h = 0.5 * df
    return (h - 1.0) * math.log(x) - 0.5 * x - h * _LOG2 - math.lgamma(h)


@njit(cache=True)
def _log_kappa_target(kappa, m_t, cos_sum):
    return -m_t * _numerics.log_i0(kappa) + kappa * cos_sum


@njit(cache=True)
def _log_ratio(kappa_cur, kappa_can, m_t, cos_sum):
    if kappa_can == kappa_cur:
        return 0.0  # exact, rather than up to cancellation
    return (
        _log_kappa_target(kappa_can, m_t, cos_sum)
        + _chi2_logpdf(kappa_cur, kappa_can)
        - _log_kappa_target(kappa_cur, m_t, cos_sum)
        - _chi2_logpdf(kappa_can, kappa_cur)
    )


@njit(cache=True)
def mh_kappa_step(rng, kappa, m_t, cos_sum):
    """Propose, evaluate and accept/reject. Returns ``(kappa, accepted)``."""
    cand = 2.0 * rng.standard_gamma(0.5 * kappa)
    u = rng.random()
    if not (cand > 0.0 and cand < math.inf):
        return kappa, False
    a = _log_ratio(kappa, cand, m_t, cos_sum)
    if u == 0.0 or a > math.log(u):
        return cand, True
    return kappa, False


@njit(cache=True)
def mh_run(rng, mu, kappa, mu_n, R_n, m_t, burn_in, iterations, lag, mu_out, kappa_out):
    accepted = 0
    total = burn_in + iterations * lag
    q = 0
    for it in range(total):
        mu_conditional_draws(rng, mu, mu_n, R_n, kappa)
        kappa, acc = mh_kappa_step(rng, kappa, m_t, weighted_cos_sum(mu, mu_n, R_n))
        if it >= burn_in:
            if acc:
                accepted += 1
            if (it - burn_in) % lag == lag - 1:
                mu_out[q, :] = mu
                kappa_out[q] = kappa
                q += 1
    return accepted


def chi2_logpdf(x, df):
    """Chi-square log density with real-valued degrees of freedom."""
    x = float(x)
    df = float(df)
    if not (x > 0 and df > 0 and math.isfinite(x) and math.isfinite(df)):
        raise DomainError(f"chi2_logpdf needs x > 0 and df > 0, got x={x}, df={df}")
    return _chi2_logpdf(x, df)


def log_kappa_conditional(kappa: float, mu, post: PosteriorParams) -> float:
    """Unnormalised log f(kappa | mu, data)."""
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    mu = np.asarray(mu, float)
    s = weighted_cos_sum(mu, post.kernel_mu_n(), post.R_n)
    return _log_kappa_target(float(kappa), post.m_t, s)


def mh_log_ratio(kappa_cur: float, kappa_can: float, mu, post: PosteriorParams) -> float:
    """Log acceptance ratio for moving from ``kappa_cur`` to ``kappa_can``."""
    for k in (kappa_cur, kappa_can):
        if not k > 0:
            raise DomainError("kappa values must be positive")
    s = weighted_cos_sum(np.asarray(mu, float), post.kernel_mu_n(), post.R_n)
    return _log_ratio(float(kappa_cur), float(kappa_can), post.m_t, s)


def mh_iteration(state: ChainState, post: PosteriorParams, rng) -> tuple:
    """One MH-within-Gibbs scan. Returns ``(new_state, accepted)``."""
    mu = state.mu.astype(float).copy()
    mu_n = post.kernel_mu_n()
    mu_conditional_draws(rng, mu, mu_n, post.R_n, float(state.kappa))
    kappa, acc = mh_kappa_step(rng, float(state.kappa), post.m_t,
                               weighted_cos_sum(mu, mu_n, post.R_n))
    return ChainState(mu, kappa, state.w), bool(acc)
