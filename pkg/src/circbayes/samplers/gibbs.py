"""Latent-variable Gibbs sampler (Damien & Walker augmentation, multi-group).

One sweep updates, in order: the slice level ``tau``, every group mean
(ascending ``j``), the bound ``M`` on ``w``, ``w`` itself, the bound ``N``
from the first ``Z`` latent ``u_k`` terms, and finally ``kappa``.

The group means are refreshed by exact coordinate-wise slice moves: the level
``ln v = ln tau + kappa * S(mu)`` is fixed once per sweep, where
``S(mu) = sum_j R_nj (1 + cos(mu_j - mu_nj))``, and group ``j`` is drawn
uniformly from the arc that keeps ``S`` above ``ln v / kappa`` with the other
groups at their current values. ``kappa``'s lower bound is ``ln v / S`` at the
new means. For ``J = 1`` this coincides with the usual single-group sweep.
``literal=True`` instead applies the single-group formulas verbatim to every
group (one shared arc half-width, ``v_n = ln tau / S + kappa``, pre-update
``w`` in the ``u_k`` rates); that variant does not leave the posterior
invariant and is kept only for comparison.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .. import _numerics
from ..circular import PosteriorParams
from ..errors import DomainError
from .base import KAPPA_FLOOR, ChainState

_LOG_FACT_SQ = np.array([2.0 * math.lgamma(k + 1.0) for k in range(0, 401)])


@njit(cache=True)
def _slice_sum(mu, mu_n, R_n):
    s = 0.0
    for j in range(mu.shape[0]):
        s += R_n[j] * (1.0 + math.cos(mu[j] - mu_n[j]))
    return s


@njit(cache=True)
def gibbs_sweep(rng, mu, kappa, w, mu_n, R_n, R_t, m_t, Z, log_fact_sq, literal):
    """One Gibbs scan. ``mu`` is updated in place.

    Returns ``(kappa, w, k_selected)`` where ``k_selected`` is the 1-based
    index of the smallest ``N_k``.
    """
    J = mu.shape[0]
    kappa = max(kappa, KAPPA_FLOOR)

    # tau and the group means
    tau = 1.0 - rng.random()
    log_tau = math.log(tau)
    S = _slice_sum(mu, mu_n, R_n)
    log_v = log_tau + kappa * S
    if literal:
        g = log_tau / (R_t * kappa) + S / R_t - 1.0
        g = min(1.0, max(-1.0, g))
        half = math.acos(g)
        for j in range(J):
            mu[j] = _numerics.wrap(mu_n[j] + half * (2.0 * rng.random() - 1.0))
    else:
        level = log_v / kappa
        for j in range(J):
            own = R_n[j] * (1.0 + math.cos(mu[j] - mu_n[j]))
            rest = S - own
            if R_n[j] > 0.0:
                g = (level - rest) / R_n[j] - 1.0
                g = min(1.0, max(-1.0, g))
                half = math.acos(g)
            else:
                half = math.pi
            mu[j] = _numerics.wrap(mu_n[j] + half * (2.0 * rng.random() - 1.0))
            S = rest + R_n[j] * (1.0 + math.cos(mu[j] - mu_n[j]))
    S_new = _slice_sum(mu, mu_n, R_n)

    # w: the exponential E is the binding u_k constraint, r comes from x
    rate_e = math.expm1(_numerics.log_i0(kappa))
    M = w + rng.standard_exponential() / rate_e
    r = 1.0 - rng.random()
    if m_t > 1.0:
        lower_w = w * r ** (1.0 / (m_t - 1.0))
    else:
        lower_w = 0.0
    w_old = w
    w = _numerics.trunc_exp(rng, 1.0, lower_w, M)

    # N = min_k kappa (1 + F_k)^(1/(2k)),  F_k ~ Exp(w (k!)^-2 (kappa/2)^(2k))
    w_rate = w_old if literal else w
    log_w = math.log(w_rate)
    log_half_kappa = math.log(0.5 * kappa)
    best = math.inf
    k_sel = 1
    for k in range(1, Z + 1):
        log_rate = log_w - log_fact_sq[k] + 2.0 * k * log_half_kappa
        log_f = math.log(rng.standard_exponential()) - log_rate
        if log_f > 0.0:
            log1p_f = log_f + math.log1p(math.exp(-log_f))
        else:
            log1p_f = math.log1p(math.exp(log_f))
        log_nk = log1p_f / (2.0 * k)
        if log_nk < best:
            best = log_nk
            k_sel = k
    N = kappa * math.exp(best)

    # kappa from exp(-R_t kappa) on (max(0, v_n), N)
    if S_new <= 0.0:
        lower_k = 0.0
    elif literal:
        lower_k = log_tau / S_new + kappa
    else:
        lower_k = log_v / S_new
    lower_k = max(0.0, lower_k)
    if not lower_k < N:
        # roundoff only: the current kappa always lies inside (lower, N)
        lower_k = 0.0
    kappa = _numerics.trunc_exp(rng, R_t, lower_k, N)
    return kappa, w, k_sel


@njit(cache=True)
def gibbs_run(rng, mu, kappa, w, mu_n, R_n, R_t, m_t, Z, log_fact_sq, literal,
              burn_in, iterations, lag, mu_out, kappa_out):
    """Run burn-in then keep every ``lag``-th sweep. Returns the largest
    selected ``k`` over the retained span."""
    max_k = 0
    total = burn_in + iterations * lag
    q = 0
    for it in range(total):
        kappa, w, k_sel = gibbs_sweep(rng, mu, kappa, w, mu_n, R_n, R_t, m_t, Z,
                                      log_fact_sq, literal)
        if it >= burn_in:
            if k_sel > max_k:
                max_k = k_sel
            if (it - burn_in) % lag == lag - 1:
                mu_out[q, :] = mu
                kappa_out[q] = kappa
                q += 1
    return max_k


def _check_Z(Z):
    if not 1 <= Z < _LOG_FACT_SQ.size:
        raise DomainError(f"Z must be in [1, {_LOG_FACT_SQ.size - 1}], got {Z}")


def gibbs_iteration(state: ChainState, post: PosteriorParams, Z: int, rng,
                    literal: bool = False) -> ChainState:
    """Return the state after one full Gibbs sweep (the input is not modified)."""
    if not post.R_t > 0:
        raise DomainError("Gibbs sampling needs a positive total resultant R_t")
    _check_Z(Z)
    mu = state.mu.astype(float).copy()
    kappa, w, _ = gibbs_sweep(
        rng, mu, float(state.kappa), float(state.w), post.kernel_mu_n(), post.R_n,
        post.R_t, post.m_t, int(Z), _LOG_FACT_SQ, literal,
    )
    return ChainState(mu, kappa, w)


def selected_k(state: ChainState, post: PosteriorParams, Z: int, rng) -> tuple:
    """One sweep that also reports the index of the smallest ``N_k``."""
    _check_Z(Z)
    mu = state.mu.astype(float).copy()
    kappa, w, k = gibbs_sweep(
        rng, mu, float(state.kappa), float(state.w), post.kernel_mu_n(), post.R_n,
        post.R_t, post.m_t, int(Z), _LOG_FACT_SQ, False,
    )
    return ChainState(mu, kappa, w), int(k)
