"""Types and kernels shared by the three kappa samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .. import _numerics
from ..circular import PosteriorParams, wrap_angle
from ..errors import ConfigurationError, DomainError

METHODS = ("gibbs", "mh", "rejection")

# Gibbs rates I0(kappa) - 1 and (kappa/2)^(2k) vanish at kappa = 0.
KAPPA_FLOOR = 1e-8


@dataclass(frozen=True)
class SamplerConfig:
    """Chain length, thinning and starting values.

    ``burn_in`` defaults to ``500 * lag``. The Gibbs-only fields
    (``mu_start``, ``w_start``, ``Z``) are ignored by the other samplers.
    """

    iterations: int = 10_000
    lag: int = 1
    burn_in: int | None = None
    kappa_start: float = 2.0
    mu_start: tuple | float = 0.0
    w_start: float = 4.0
    Z: int = 25

    def __post_init__(self):
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", 500 * self.lag)
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.lag < 1:
            raise ConfigurationError("lag must be >= 1")
        if self.burn_in < 0:
            raise ConfigurationError("burn_in must be >= 0")
        if not (self.kappa_start > 0 and math.isfinite(self.kappa_start)):
            raise ConfigurationError("kappa_start must be a positive finite number")
        if not (self.w_start > 0 and math.isfinite(self.w_start)):
            raise ConfigurationError("w_start must be a positive finite number")
        if self.Z < 1:
            raise ConfigurationError("Z must be >= 1")

    def mu_start_array(self, J: int) -> np.ndarray:
        mu = np.atleast_1d(np.asarray(self.mu_start, float))
        if mu.size == 1:
            mu = np.repeat(mu, J)
        if mu.size != J:
            raise ConfigurationError(f"mu_start has {mu.size} entries for {J} groups")
        return wrap_angle(mu).astype(float)

    @property
    def total_iterations(self) -> int:
        return self.burn_in + self.iterations * self.lag


@dataclass
class ChainState:
    """Current position of a chain. ``w`` is only meaningful for Gibbs."""

    mu: np.ndarray
    kappa: float
    w: float = 4.0

    def __post_init__(self):
        self.mu = np.array(self.mu, dtype=float, ndmin=1)
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")

    def copy(self) -> "ChainState":
        return ChainState(self.mu.copy(), self.kappa, self.w)


@dataclass
class Trace:
    """Retained draws of a chain plus acceptance bookkeeping.

    Counters cover every post-burn-in kernel call (``n_iterations`` of them,
    i.e. ``iterations * lag``); with ``lag == 1`` they are the usual
    Q, Q_acc and Q_can.
    """

    method: str
    mu_draws: np.ndarray
    kappa_draws: np.ndarray
    n_iterations: int
    accepted_count: int = 0
    candidate_count: int = 0
    wall_time: float = 0.0
    max_selected_k: int = 0
    uniform_mu_groups: tuple = field(default_factory=tuple)

    @property
    def Q(self) -> int:
        return self.kappa_draws.size

    @property
    def acceptance_rate(self) -> float:
        if self.method == "mh":
            return self.accepted_count / self.n_iterations
        if self.method == "rejection":
            return self.n_iterations / self.candidate_count
        return 1.0


@njit(cache=True)
def mu_conditional_draws(rng, mu, mu_n, R_n, kappa):
    for j in range(mu.shape[0]):
        mu[j] = _numerics.vm_draw(rng, mu_n[j], R_n[j] * kappa)


@njit(cache=True)
def weighted_cos_sum(mu, mu_n, R_n):
    s = 0.0
    for j in range(mu.shape[0]):
        s += R_n[j] * math.cos(mu[j] - mu_n[j])
    return s


def sample_mu_conditional(post: PosteriorParams, j: int, kappa: float, rng) -> float:
    """Draw group ``j``'s mean from its full conditional VM(mu_nj, R_nj * kappa).

    A group with zero posterior resultant gets a circular-uniform draw.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    conc = float(post.R_n[j]) * kappa
    centre = float(post.kernel_mu_n()[j])
    return _numerics.vm_draw(rng, centre, conc)


def sample_truncated_exp(rate: float, lower: float, upper: float, rng, size=None):
    """Inverse-CDF draw from density proportional to exp(-rate * x) on (lower, upper).

    ``upper`` may be ``inf``. Results lie strictly inside the interval.
    """
    if not rate > 0 or not math.isfinite(rate):
        raise DomainError(f"rate must be positive and finite, got {rate!r}")
    if not math.isfinite(lower) or math.isnan(upper):
        raise DomainError("lower must be finite and upper a number")
    if not lower < upper or not np.nextafter(lower, math.inf) < upper:
        raise DomainError(f"degenerate interval ({lower!r}, {upper!r})")
    if size is None:
        return _numerics.trunc_exp(rng, float(rate), float(lower), float(upper))
    return _numerics.trunc_exp_array(rng, float(rate), float(lower), float(upper), int(size))
