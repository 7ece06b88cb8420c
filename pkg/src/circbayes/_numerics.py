"""Compiled scalar kernels shared by the public modules.

Everything here is ``numba.njit`` and takes plain floats plus a
``numpy.random.Generator``; argument validation lives in the callers.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
LOG_TWO_PI = math.log(TWO_PI)

# Below this the power series is used, above it the large-argument expansion.
# The expansion's smallest term at the crossover is ~exp(-2 kappa) ~ 1e-26.
BESSEL_CROSSOVER = 30.0


@njit(cache=True)
def wrap(x):
    y = x - TWO_PI * math.floor(x / TWO_PI)
    if y < 0.0:
        y += TWO_PI
    if y >= TWO_PI:
        y = 0.0
    return y


@njit(cache=True)
def log_i0_ratio(kappa):
    """Return ``(ln I0(kappa), I1(kappa)/I0(kappa))`` for ``kappa >= 0``."""
    if kappa < BESSEL_CROSSOVER:
        q = 0.25 * kappa * kappa
        t = 1.0
        tail0 = 0.0  # sum of terms k >= 1, kept apart so ln I0 ~ kappa^2/4 stays exact
        s1 = 1.0
        k = 0
        while True:
            k += 1
            t *= q / (k * k)
            tail0 += t
            s1 += t / (k + 1)
            if t < 1e-17 * (1.0 + tail0):
                break
        return math.log1p(tail0), 0.5 * kappa * s1 / (1.0 + tail0)
    z8 = 8.0 * kappa
    c0 = 1.0
    c1 = 1.0
    s0 = 1.0
    s1 = 1.0
    for k in range(1, 60):
        odd = (2.0 * k - 1.0) ** 2
        c0 *= odd / (k * z8)
        c1 *= (odd - 4.0) / (k * z8)
        s0 += c0
        s1 += c1
        if c0 < 1e-17 and abs(c1) < 1e-17:
            break
    return kappa - 0.5 * math.log(TWO_PI * kappa) + math.log(s0), s1 / s0


@njit(cache=True)
def log_i0(kappa):
    return log_i0_ratio(kappa)[0]


@njit(cache=True)
def log_i0_array(kappas):
    out = np.empty(kappas.shape[0])
    for i in range(kappas.shape[0]):
        out[i] = log_i0_ratio(kappas[i])[0]
    return out


@njit(cache=True)
def ratio_derivative(kappa, ratio):
    """d/dkappa of I1/I0 given the ratio itself."""
    if kappa == 0.0:
        return 0.5
    return 1.0 - ratio / kappa - ratio * ratio


@njit(cache=True)
def vm_draw(rng, mu, kappa):
    """Best & Fisher (1979) wrapped-Cauchy rejection draw from VM(mu, kappa)."""
    if kappa <= 0.0:
        return TWO_PI * rng.random()
    # rho written without the tau - sqrt(2 tau) cancellation
    root = math.sqrt(1.0 + 4.0 * kappa * kappa)
    tau = 1.0 + root
    rho = 2.0 * kappa * tau / ((root + 1.0) * (tau + math.sqrt(2.0 * tau)))
    r = (1.0 + rho * rho) / (2.0 * rho)
    while True:
        z = math.cos(math.pi * rng.random())
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        u2 = rng.random()
        if c * (2.0 - c) > u2 or (u2 > 0.0 and math.log(c / u2) + 1.0 - c >= 0.0):
            break
    f = min(1.0, max(-1.0, f))
    if rng.random() > 0.5:
        return wrap(mu + math.acos(f))
    return wrap(mu - math.acos(f))


@njit(cache=True)
def vm_draws(rng, mu, kappa, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = vm_draw(rng, mu, kappa)
    return out


@njit(cache=True)
def trunc_exp(rng, rate, lower, upper):
    """Inverse-CDF draw from density proportional to exp(-rate x) on (lower, upper).

    ``rate == 0`` gives a uniform draw (upper must then be finite).
    Endpoint hits caused by rounding are redrawn.
    """
    width = upper - lower
    for _ in range(10000):
        u = rng.random()
        if rate == 0.0:
            x = lower + u * width
        else:
            x = lower - math.log1p(u * math.expm1(-rate * width)) / rate
        if lower < x < upper:
            return x
    raise ValueError("truncated exponential interval has no interior")


@njit(cache=True)
def trunc_exp_array(rng, rate, lower, upper, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = trunc_exp(rng, rate, lower, upper)
    return out
