import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circbayes import (
    CircularInterval,
    DomainError,
    Trace,
    UndefinedDirectionError,
    circular_cci,
    hdi,
    mode_from_hdi,
    sample_von_mises,
    summarize,
)
from circbayes.inference import coverage, relative_bias

TWO_PI = 2 * math.pi


def test_hdi_constant():
    h = hdi(np.full(500, 3.5))
    assert h.lower == h.upper == 3.5


def test_hdi_uniform_and_normal():
    assert hdi(np.random.default_rng(0).random(1_000_000)).width == pytest.approx(0.95, abs=0.01)
    # the empirical HDI's endpoints scatter with sd ~0.008 at this size
    h = hdi(np.random.default_rng(1).standard_normal(1_000_000))
    assert h.lower == pytest.approx(-1.96, abs=0.02) and h.upper == pytest.approx(1.96, abs=0.02)


def test_hdi_window_and_ties():
    h = hdi([0.0, 1.0, 2.0, 3.0], mass=0.5)
    assert (h.lower, h.upper) == (0.0, 1.0)
    h = hdi([5.0, 0.0, 0.1, 9.0, 9.05, 9.1], mass=0.5)
    assert (h.lower, h.upper) == (9.0, 9.1)


def test_hdi_errors():
    with pytest.raises(DomainError):
        hdi([])
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            hdi([1.0, 2.0], mass=bad)


samples = st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300)


@given(samples, st.floats(0.01, 0.99))
def test_hdi_holds_mass(xs, mass):
    x = np.array(xs)
    h = hdi(x, mass)
    assert h.lower <= h.upper
    inside = np.mean((x >= h.lower) & (x <= h.upper))
    assert inside >= mass - 1 / x.size


@given(samples, st.floats(0.02, 0.99), st.floats(0.01, 0.99))
def test_hdi_width_monotone_in_mass(xs, m1, m2):
    lo, hi = sorted((m1, m2))
    assert hdi(xs, lo).width <= hdi(xs, hi).width + 1e-12


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=200), st.floats(0.01, 0.99))
def test_hdi_matches_brute_force(xs, mass):
    x = np.sort(np.array(xs))
    k = max(1, math.ceil(mass * x.size - 1e-9))
    best = min((x[i + k - 1] - x[i], x[i]) for i in range(x.size - k + 1))
    h = hdi(x, mass)
    assert (h.width, h.lower) == pytest.approx(best)


# integer data keeps a * x + b exact, so ties between windows survive the map
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=300), st.integers(1, 64),
       st.integers(-1000, 1000))
def test_mode_affine_equivariance(xs, a, b):
    x = np.array(xs, float)
    assert mode_from_hdi(a * x + b) == a * mode_from_hdi(x) + b


def test_mode_examples():
    assert mode_from_hdi(np.full(10, 2.5)) == 2.5
    rng = np.random.default_rng(1)
    assert mode_from_hdi(rng.gamma(3.0, 1.0, 1_000_000)) == pytest.approx(2.0, abs=0.05)
    x = rng.normal(1.0, 1.0, 1_000_000)
    assert mode_from_hdi(x) == pytest.approx(x.mean(), abs=0.05)


def test_cci_wraps_through_zero():
    rng = np.random.default_rng(2)
    x = np.deg2rad(359.0 + rng.uniform(-2.5, 2.5, 5000)) % TWO_PI
    ci = circular_cci(x)
    assert ci.contains(math.radians(359.0)) and ci.contains(math.radians(1.0))
    assert ci.contains(0.0)
    assert not ci.contains(math.radians(180.0))
    assert ci.width < math.radians(5)


def test_cci_von_mises_half_width():
    x = sample_von_mises(math.radians(20), 120.0, np.random.default_rng(3), size=100_000)
    ci = circular_cci(x)
    assert ci.width / 2 == pytest.approx(1.96 / math.sqrt(120), rel=0.1)
    assert ci.contains(math.radians(20))


def test_cci_identical_draws():
    ci = circular_cci(np.full(100, 1.0))
    assert ci.width == pytest.approx(0.0, abs=1e-12)
    assert ci.lower == pytest.approx(1.0) and ci.contains(1.0)


def test_cci_undefined_direction():
    with pytest.raises(UndefinedDirectionError):
        circular_cci([0.0, math.pi / 2, math.pi, 1.5 * math.pi])
    with pytest.raises(DomainError):
        circular_cci([])


@given(st.floats(-10, 10))
@settings(max_examples=30)
def test_cci_rotation_equivariance(delta):
    x = sample_von_mises(1.0, 3.0, np.random.default_rng(4), size=2000)
    a = circular_cci(x)
    b = circular_cci((x + delta) % TWO_PI)
    d = (b.lower - a.lower - delta) % TWO_PI
    assert min(d, TWO_PI - d) < 1e-9
    assert b.width == pytest.approx(a.width, abs=1e-9)


def test_circular_interval_contains():
    ci = CircularInterval(math.radians(350), math.radians(20), 0.95)
    assert ci.contains(math.radians(5)) and ci.contains(math.radians(355))
    assert not ci.contains(math.radians(15)) and not ci.contains(math.radians(340))
    assert math.degrees(ci.upper) == pytest.approx(10.0)


def test_relative_bias():
    assert relative_bias(4.0, 4.0) == 0
    assert relative_bias(0.34, 0.1) == pytest.approx(2.4)
    assert relative_bias(41.42, 32) == pytest.approx(0.294375)
    with pytest.raises(DomainError):
        relative_bias(1.0, 0.0)


@given(st.lists(st.booleans(), min_size=1, max_size=100))
def test_coverage_is_exact_fraction(hits):
    assert coverage(hits) == sum(hits) / len(hits)


def _trace(method, mu, kappa, **kw):
    return Trace(method, np.asarray(mu, float), np.asarray(kappa, float), len(kappa), **kw)


def test_summarize_conventions():
    rng = np.random.default_rng(5)
    kappa = rng.gamma(5, 1, 1000)
    mu = np.column_stack([np.full(1000, 0.7), sample_von_mises(2.0, 50, rng, size=1000)])
    s = summarize(_trace("gibbs", mu, kappa, wall_time=0.5))
    assert s.acceptance == 1.0 and s.wall_time == 0.5
    assert s.mu_mean[0] == pytest.approx(0.7) and s.mu_cci[0].width == pytest.approx(0, abs=1e-12)
    assert s.kappa_mode == pytest.approx(mode_from_hdi(kappa))
    assert s.kappa_hdi95 == hdi(kappa, 0.95)
    assert s.kappa_hdi95.contains(s.kappa_mode)
    assert summarize(_trace("mh", mu, kappa, accepted_count=250)).acceptance == 0.25
    assert summarize(_trace("rejection", mu, kappa, candidate_count=1250)).acceptance == 0.8
    assert s.mu_covered([0.7, 2.0]) == [True, True]
    assert s.mu_covered([3.0, 5.0]) == [False, False]
