"""Posterior summaries: HDI, HDI-midpoint mode, circular credible intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circular import TWO_PI, sufficient_stats, wrap_angle
from .errors import DomainError, UndefinedDirectionError
from .samplers.base import Trace

_ANGLE_EPS = 1e-12


@dataclass(frozen=True)
class IntervalSummary:
    lower: float
    upper: float
    mass: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class CircularInterval:
    """Arc running counter-clockwise from ``lower`` over ``width`` radians."""

    lower: float
    width: float
    mass: float

    @property
    def upper(self) -> float:
        return wrap_angle(self.lower + self.width)

    def contains(self, angle: float) -> bool:
        d = (angle - self.lower) % TWO_PI
        return d <= self.width + _ANGLE_EPS or d >= TWO_PI - _ANGLE_EPS

    def rotated(self, delta: float) -> "CircularInterval":
        return CircularInterval(wrap_angle(self.lower + delta), self.width, self.mass)


def hdi(draws, mass: float = 0.95) -> IntervalSummary:
    """Shortest interval holding ``ceil(mass * Q)`` of the sorted draws.

    Ties go to the window with the lowest lower end.
    """
    x = np.sort(np.asarray(draws, float).ravel())
    if x.size == 0:
        raise DomainError("hdi of an empty sample")
    if not 0 < mass < 1:
        raise DomainError(f"mass must be in (0, 1), got {mass}")
    k = max(1, math.ceil(mass * x.size - 1e-9))
    widths = x[k - 1:] - x[: x.size - k + 1]
    i = int(np.argmin(widths))
    return IntervalSummary(float(x[i]), float(x[i + k - 1]), mass)


def mode_from_hdi(draws) -> float:
    """Midpoint of the 10% HDI, used as the posterior mode of kappa."""
    h = hdi(draws, 0.10)
    return 0.5 * (h.lower + h.upper)


def circular_cci(draws, mass: float = 0.95) -> CircularInterval:
    """Equal-tailed credible arc for an angle.

    The draws are rotated so their mean direction sits at pi, linear
    quantiles are taken, and the result is rotated back.
    """
    theta = np.asarray(draws, float).ravel()
    if theta.size == 0:
        raise DomainError("credible interval of an empty sample")
    if not 0 < mass < 1:
        raise DomainError(f"mass must be in (0, 1), got {mass}")
    st = sufficient_stats(theta)
    if st.theta_bar is None or st.R_bar < 1e-12:
        raise UndefinedDirectionError("draws have no mean direction")
    shift = math.pi - st.theta_bar
    centred = np.mod(theta + shift, TWO_PI)
    tail = 0.5 * (1 - mass)
    lo, hi = np.quantile(centred, [tail, 1 - tail])
    return CircularInterval(wrap_angle(lo - shift), float(hi - lo), mass)


def relative_bias(estimate: float, truth: float) -> float:
    if truth == 0:
        raise DomainError("relative bias is undefined for a zero true value")
    return (estimate - truth) / truth


def coverage(hits: Sequence[bool]) -> float:
    """Fraction of replications whose interval contained the truth."""
    hits = list(hits)
    if not hits:
        raise DomainError("coverage of zero replications")
    return sum(bool(h) for h in hits) / len(hits)


@dataclass(frozen=True)
class PosteriorSummary:
    mu_mean: tuple
    mu_cci: tuple
    kappa_mode: float
    kappa_hdi95: IntervalSummary
    acceptance: float
    wall_time: float

    def mu_covered(self, true_means) -> list:
        return [ci is not None and ci.contains(float(t)) for ci, t in zip(self.mu_cci, true_means)]

    def kappa_covered(self, true_kappa: float) -> bool:
        return self.kappa_hdi95.contains(true_kappa)


def summarize(trace: Trace, mass: float = 0.95) -> PosteriorSummary:
    """Per-group circular mean and CCI of the mean draws; kappa mode and HDI.

    A group whose mean draws have no mean direction (possible only for a
    circular-uniform posterior) gets NaN and ``None``.
    """
    if trace.Q == 0:
        raise DomainError("cannot summarise an empty trace")
    mu_mean, mu_cci = [], []
    for j in range(trace.mu_draws.shape[1]):
        col = trace.mu_draws[:, j]
        st = sufficient_stats(col)
        if st.theta_bar is None or st.R_bar < 1e-12:
            mu_mean.append(math.nan)
            mu_cci.append(None)
        else:
            mu_mean.append(st.theta_bar)
            mu_cci.append(circular_cci(col, mass))
    return PosteriorSummary(
        mu_mean=tuple(mu_mean),
        mu_cci=tuple(mu_cci),
        kappa_mode=mode_from_hdi(trace.kappa_draws),
        kappa_hdi95=hdi(trace.kappa_draws, mass),
        acceptance=trace.acceptance_rate,
        wall_time=trace.wall_time,
    )
