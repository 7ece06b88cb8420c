"""Exact rejection sampler for kappa given the group means.

The conditional target is

    f(kappa) ~ I0(kappa)^(-eta) * exp(-eta * beta_t * kappa),   kappa > 0,

with ``eta = m_t`` and ``beta_t = -sum_j R_nj cos(mu_j - mu_nj) / m_t``.
Because ln I0 is convex, ``ln f`` is concave, so tangent lines of ``ln f``
bound it from above everywhere. The proposal is the piecewise-exponential
hull of a handful of tangents placed around the mode at multiples of the
Laplace scale ``1 / sqrt(-(ln f)''(mode))``. Each candidate costs one
``ln I0`` evaluation; the hull is rebuilt whenever ``beta_t`` changes.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .. import _numerics
from ..circular import PosteriorParams
from ..errors import DomainError, EnvelopeError
from .base import mu_conditional_draws, weighted_cos_sum

# Tangent abscissae in Laplace-scale units around an interior mode,
# and for a mode on the boundary kappa = 0.
INTERIOR_OFFSETS = np.array([-1.9, -0.85, 0.0, 0.85, 1.9])
BOUNDARY_OFFSETS = np.array([0.0, 0.5, 1.3, 2.6])

STATUS_OK = 0
STATUS_IMPROPER = 1
STATUS_NO_MODE = 2
STATUS_BAD_HULL = 3


@njit(cache=True)
def _log_target(kappa, eta, beta):
    return -eta * (_numerics.log_i0(kappa) + beta * kappa)


@njit(cache=True)
def _invert_ratio(rho):
    """Solve I1(k)/I0(k) = rho for k, 0 < rho < 1. Returns -1.0 on failure."""
    if rho < 0.53:
        k = 2.0 * rho + rho ** 3 + 5.0 * rho ** 5 / 6.0
    elif rho < 0.85:
        k = -0.4 + 1.39 * rho + 0.43 / (1.0 - rho)
    else:
        k = 1.0 / (rho ** 3 - 4.0 * rho ** 2 + 3.0 * rho)
    lo = 0.0
    hi = math.inf
    for _ in range(200):
        a = _numerics.log_i0_ratio(k)[1]
        if a < rho:
            lo = k
        else:
            hi = k
        d = _numerics.ratio_derivative(k, a)
        step = (a - rho) / d
        k_new = k - step
        if not (lo < k_new < hi) or not math.isfinite(k_new):
            k_new = 2.0 * lo + 1.0 if hi == math.inf else 0.5 * (lo + hi)
        if abs(k_new - k) <= 1e-13 * (1.0 + k):
            return k_new
        k = k_new
    return -1.0


@njit(cache=True)
def _log_piece_mass(h_a, d, length):
    """log of the integral of exp(h_a + d * t) over t in (0, length)."""
    if length == math.inf:
        return h_a - math.log(-d)
    dl = d * length
    if abs(dl) < 1e-12:
        return h_a + math.log(length) + 0.5 * dl
    if d > 0.0:
        return h_a + dl + math.log(-math.expm1(-dl)) - math.log(d)
    return h_a + math.log(-math.expm1(dl)) - math.log(-d)


@njit(cache=True)
def build_hull(eta, beta):
    """Tangent hull of the log target.

    Returns ``(status, xs, hs, ds, zs, cum)``: tangent points, log target and
    slope there, piece boundaries ``zs[i] .. zs[i+1]`` and the cumulative
    normalised piece masses.
    """
    empty = np.zeros(1)
    if not (eta > 0.0) or beta <= -1.0 or not math.isfinite(beta):
        return STATUS_IMPROPER, empty, empty, empty, empty, empty
    if beta >= 0.0:
        mode = 0.0
        slope0 = eta * beta
        scale = 1.0 / (slope0 + math.sqrt(0.5 * eta))
        offsets = BOUNDARY_OFFSETS
    else:
        mode = _invert_ratio(-beta)
        if mode < 0.0:
            return STATUS_NO_MODE, empty, empty, empty, empty, empty
        a = _numerics.log_i0_ratio(mode)[1]
        scale = 1.0 / math.sqrt(eta * _numerics.ratio_derivative(mode, a))
        offsets = INTERIOR_OFFSETS

    n = 0
    xs = np.empty(offsets.shape[0] + 1)
    for c in offsets:
        x = mode + c * scale
        if x > 0.0 or (x == 0.0 and mode == 0.0):
            xs[n] = x
            n += 1
    if mode > 0.0 and xs[0] > 0.0 and n < offsets.shape[0]:
        # left abscissae fell below zero: anchor a tangent at the boundary
        xs[1:n + 1] = xs[0:n].copy()
        xs[0] = 0.0
        n += 1
    xs = xs[:n]

    hs = np.empty(n)
    ds = np.empty(n)
    for i in range(n):
        lg, a = _numerics.log_i0_ratio(xs[i])
        hs[i] = -eta * (lg + beta * xs[i])
        ds[i] = -eta * (a + beta)
    if not ds[n - 1] < 0.0:
        return STATUS_BAD_HULL, empty, empty, empty, empty, empty

    zs = np.empty(n + 1)
    zs[0] = 0.0
    zs[n] = math.inf
    for i in range(n - 1):
        dd = ds[i] - ds[i + 1]
        if dd > 1e-12 * (abs(ds[i]) + abs(ds[i + 1]) + 1.0):
            z = (hs[i + 1] - hs[i] + ds[i] * xs[i] - ds[i + 1] * xs[i + 1]) / dd
        else:
            z = 0.5 * (xs[i] + xs[i + 1])
        zs[i + 1] = min(xs[i + 1], max(xs[i], z))

    logm = np.empty(n)
    top = -math.inf
    for i in range(n):
        h_a = hs[i] + ds[i] * (zs[i] - xs[i])
        logm[i] = _log_piece_mass(h_a, ds[i], zs[i + 1] - zs[i])
        if logm[i] > top:
            top = logm[i]
    if not math.isfinite(top):
        return STATUS_BAD_HULL, empty, empty, empty, empty, empty
    cum = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc += math.exp(logm[i] - top)
        cum[i] = acc
    for i in range(n):
        cum[i] /= acc
    return STATUS_OK, xs, hs, ds, zs, cum


@njit(cache=True)
def rejection_kappa_kernel(rng, eta, beta):
    """Returns ``(status, kappa, candidates)``."""
    status, xs, hs, ds, zs, cum = build_hull(eta, beta)
    if status != STATUS_OK:
        return status, math.nan, 0
    n = xs.shape[0]
    cand = 0
    while True:
        cand += 1
        u = rng.random()
        i = 0
        while i < n - 1 and cum[i] <= u:
            i += 1
        a = zs[i]
        length = zs[i + 1] - a
        d = ds[i]
        if d < 0.0:
            x = a + _numerics.trunc_exp(rng, -d, 0.0, length)
        elif d > 0.0:
            x = zs[i + 1] - _numerics.trunc_exp(rng, d, 0.0, length)
        else:
            x = a + length * rng.random()
        if not x > 0.0:
            continue
        log_gap = _log_target(x, eta, beta) - (hs[i] + d * (x - xs[i]))
        v = rng.random()
        if v == 0.0 or math.log(v) <= log_gap:
            return STATUS_OK, x, cand


@njit(cache=True)
def rejection_run(rng, mu, kappa, mu_n, R_n, m_t, burn_in, iterations, lag,
                  mu_out, kappa_out, diag):
    """``diag`` receives ``(status, beta_t)`` of a failed envelope.

    Returns the number of candidates drawn after burn-in (-1 on failure).
    """
    candidates = 0
    total = burn_in + iterations * lag
    q = 0
    for it in range(total):
        mu_conditional_draws(rng, mu, mu_n, R_n, kappa)
        beta = -weighted_cos_sum(mu, mu_n, R_n) / m_t
        status, new_kappa, c = rejection_kappa_kernel(rng, m_t, beta)
        if status != STATUS_OK:
            diag[0] = status
            diag[1] = beta
            return -1
        kappa = new_kappa
        if it >= burn_in:
            candidates += c
            if (it - burn_in) % lag == lag - 1:
                mu_out[q, :] = mu
                kappa_out[q] = kappa
                q += 1
    return candidates


_REASONS = {
    STATUS_IMPROPER: "conditional is improper (need eta > 0 and beta_t > -1)",
    STATUS_NO_MODE: "mode search did not converge",
    STATUS_BAD_HULL: "tangent hull is not integrable",
}


def beta_t(mu, post: PosteriorParams) -> float:
    """``-sum_j R_nj cos(mu_j - mu_nj) / m_t`` for the current group means."""
    return -weighted_cos_sum(np.asarray(mu, float), post.kernel_mu_n(), post.R_n) / post.m_t


def envelope(eta: float, beta: float) -> dict:
    """The tangent hull for ``(eta, beta)`` as plain arrays (for inspection)."""
    status, xs, hs, ds, zs, cum = build_hull(float(eta), float(beta))
    if status != STATUS_OK:
        raise EnvelopeError(eta, beta, _REASONS[status])
    return {"x": xs, "log_target": hs, "slope": ds, "breaks": zs, "cum_mass": cum}


def sample_kappa(eta: float, beta: float, rng) -> tuple:
    """Exact draw from ``I0(k)^-eta exp(-eta beta k)``. Returns ``(kappa, candidates)``."""
    status, kappa, cand = rejection_kappa_kernel(rng, float(eta), float(beta))
    if status != STATUS_OK:
        raise EnvelopeError(eta, beta, _REASONS[status])
    return kappa, int(cand)


def rejection_kappa(post: PosteriorParams, mu, rng) -> tuple:
    """Draw kappa from its full conditional given the current group means.

    Returns ``(kappa, candidates_used)``.
    """
    if not post.m_t > 0:
        raise DomainError("rejection sampling needs m_t > 0")
    return sample_kappa(post.m_t, beta_t(mu, post), rng)
