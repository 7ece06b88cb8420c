import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from circbayes import (
    ConfigurationError,
    ConjugatePrior,
    DomainError,
    GroupedAngles,
    UndefinedDirectionError,
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

from oracle import bessel_ratio_series, log_i0_series

TWO_PI = 2 * math.pi
finite_angles = st.floats(-1e4, 1e4, allow_nan=False)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (-math.pi / 2, 1.5 * math.pi), (7 * math.pi, math.pi),
                                         (TWO_PI, 0.0)])
def test_wrap_examples(x, expected):
    assert wrap_angle(x) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_wrap_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        wrap_angle(bad)
    with pytest.raises(DomainError):
        wrap_angle(np.array([0.0, bad]))


@given(finite_angles)
def test_wrap_range_and_congruence(x):
    w = wrap_angle(x)
    assert 0.0 <= w < TWO_PI
    assert math.cos(w - x) == pytest.approx(1.0, abs=1e-9)


@given(finite_angles, finite_angles)
def test_distance_symmetric_and_bounded(a, b):
    d = circular_distance(a, b)
    assert d == pytest.approx(circular_distance(b, a), abs=1e-12)
    assert 0.0 <= d <= math.pi + 1e-12


def test_stats_examples():
    s = sufficient_stats(np.deg2rad([10.0, 350.0]))
    assert math.degrees(s.theta_bar) % 360 == pytest.approx(0.0, abs=1e-9) or \
        math.degrees(s.theta_bar) == pytest.approx(360.0, abs=1e-9)
    th = np.deg2rad([56.0, 77.0, 344.0])
    s = sufficient_stats(th)
    C, S = np.cos(th).sum(), np.sin(th).sum()
    assert s.C == pytest.approx(C) and s.S == pytest.approx(S)
    assert s.R == pytest.approx(math.hypot(C, S))
    assert s.theta_bar == pytest.approx(math.atan2(S, C) % TWO_PI)
    one = sufficient_stats([1.234])
    assert one.theta_bar == pytest.approx(1.234) and one.R == pytest.approx(1.0)


def test_stats_empty_and_zero_resultant():
    s = sufficient_stats([])
    assert s.n == 0 and s.R == 0 and s.theta_bar is None and math.isnan(s.R_bar)
    assert sufficient_stats([1e-300, -1e-300]).C == 2.0
    with pytest.raises(UndefinedDirectionError):
        circular_mean([])


@given(st.lists(finite_angles, min_size=1, max_size=40))
def test_stats_invariants(xs):
    s = sufficient_stats(np.array(xs))
    assert s.R == pytest.approx(math.hypot(s.C, s.S), abs=1e-9)
    assert 0.0 <= s.R <= s.n + 1e-9
    assert 0.0 <= s.R_bar <= 1.0 + 1e-12


@given(finite_angles, st.integers(1, 500))
def test_copies_give_full_resultant(x, n):
    s = sufficient_stats(np.full(n, x))
    assert abs(s.R - n) <= 1e-12 * n + 1e-12


@given(st.lists(st.floats(0, 6.28), min_size=2, max_size=30), st.floats(-10, 10))
def test_rotation_equivariance(xs, delta):
    th = np.array(xs)
    a, b = sufficient_stats(th), sufficient_stats(th + delta)
    assert b.R == pytest.approx(a.R, abs=1e-9)
    if a.R > 1e-6:
        assert circular_distance(b.theta_bar, a.theta_bar + delta) < 1e-6
    data = GroupedAngles((th, th[::-1] * 0.5))
    p, q = posterior_params(data), posterior_params(data.rotated(delta))
    np.testing.assert_allclose(q.R_n, p.R_n, atol=1e-9)
    assert q.R_t == pytest.approx(p.R_t, abs=1e-9)
    for j in range(2):
        if p.R_n[j] > 1e-6:
            assert circular_distance(q.mu_n[j], p.mu_n[j] + delta) < 1e-6


def test_log_i0_examples():
    assert log_bessel_i0(0.0) == 0.0
    assert log_bessel_i0(1.0) == pytest.approx(math.log(1.26606587775201), rel=1e-12)
    k = 500.0
    asym = k - 0.5 * math.log(TWO_PI * k) + math.log(1 + 1 / (8 * k) + 9 / (2 * (8 * k) ** 2)
                                                      + 225 / (6 * (8 * k) ** 3))
    assert log_bessel_i0(k) == pytest.approx(asym, rel=1e-8)


def test_log_i0_matches_series_below_20():
    for k in np.linspace(0, 20, 201):
        ref = log_i0_series(k, terms=80)
        assert log_bessel_i0(k) == pytest.approx(ref, rel=1e-10, abs=1e-300)


def test_log_i0_matches_mpmath_to_2000():
    ks = np.concatenate([np.linspace(0.01, 60, 300), np.geomspace(60, 2000, 100)])
    got = log_bessel_i0(ks)
    for k, g in zip(ks, got):
        ref = float(mpmath.log(mpmath.besseli(0, mpmath.mpf(float(k)))))
        assert g == pytest.approx(ref, rel=1e-12)


def test_log_i0_monotone_convex():
    ks = np.linspace(0, 200, 4001)
    v = log_bessel_i0(ks)
    assert np.all(np.diff(v) > 0)
    assert np.all(np.diff(v, 2) > -1e-12)


@pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
def test_log_i0_domain(bad):
    with pytest.raises(DomainError):
        log_bessel_i0(bad)


@pytest.mark.parametrize("k", [0.0, 0.3, 1.0, 4.0, 17.0, 29.99, 30.0, 45.0, 300.0])
def test_bessel_ratio(k):
    if k <= 30:
        ref = bessel_ratio_series(k, terms=120)
    else:
        ref = float(mpmath.besseli(1, k) / mpmath.besseli(0, k))
    assert bessel_ratio(k) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("kappa", [0.0, 0.1, 4.0, 32.0])
def test_vm_density_normalised(kappa):
    val, _ = integrate.quad(lambda t: math.exp(vm_log_density(t, 1.0, kappa)), 0, TWO_PI,
                            points=[1.0], epsabs=1e-13, epsrel=1e-13, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_vm_density_examples():
    assert vm_log_density(2.5, 0.3, 0.0) == pytest.approx(-math.log(TWO_PI))
    assert vm_log_density(0.7 + 0.4, 0.7, 3.0) == pytest.approx(vm_log_density(0.7 - 0.4, 0.7, 3.0))
    assert vm_log_density(0.0, 0.0, 2.0) == pytest.approx(2 - math.log(TWO_PI) - log_i0_series(2.0))


def test_vm_sampler_uniform_at_zero():
    x = sample_von_mises(1.0, 0.0, np.random.default_rng(1), size=100_000)
    assert stats.kstest(x / TWO_PI, "uniform").pvalue > 0.01


def test_vm_sampler_moments():
    rng = np.random.default_rng(2)
    x = sample_von_mises(math.radians(20), 4.0, rng, size=100_000)
    s = sufficient_stats(x)
    assert abs(math.degrees(s.theta_bar) - 20) < 1.0
    assert s.R_bar == pytest.approx(bessel_ratio_series(4.0), abs=0.01)
    assert np.all((x >= 0) & (x < TWO_PI))


def test_vm_sampler_matches_scipy():
    x = sample_von_mises(0.5, 2.5, np.random.default_rng(3), size=50_000)
    cdf = stats.vonmises(2.5, loc=0.5).cdf
    centred = (x - 0.5 + math.pi) % TWO_PI - math.pi + 0.5
    assert stats.kstest(centred, cdf).pvalue > 0.01


def test_vm_sampler_scalar_and_errors():
    assert isinstance(sample_von_mises(0.0, 1.0, np.random.default_rng(0)), float)
    with pytest.raises(DomainError):
        sample_von_mises(0.0, -1.0, np.random.default_rng(0))


def test_prior_validation():
    ConjugatePrior(1.0, 0.0, 0.0)
    ConjugatePrior(1.0, 2.0, 3.0)
    with pytest.raises(DomainError):
        ConjugatePrior(0.0, 3.0, 2.0)
    with pytest.raises(DomainError):
        ConjugatePrior(0.0, -1.0, 2.0)


def test_posterior_params_examples():
    data = GroupedAngles.from_degrees([[0, 90], [0, 90]])
    p = posterior_params(data)
    np.testing.assert_allclose(np.rad2deg(p.mu_n), [45, 45])
    np.testing.assert_allclose(p.R_n, [math.sqrt(2)] * 2)
    assert p.R_t == pytest.approx(2 * math.sqrt(2)) and p.m_t == 4

    prior = ConjugatePrior(1.1, 2.0, 5.0)
    q = posterior_params(GroupedAngles(([],)), [prior])
    assert q.mu_n[0] == pytest.approx(1.1) and q.R_n[0] == pytest.approx(2.0) and q.m[0] == 5

    th = np.array([0.3, 0.5, 6.1])
    s = sufficient_stats(th)
    f = posterior_params(GroupedAngles((th,)))
    assert f.mu_n[0] == pytest.approx(s.theta_bar) and f.R_n[0] == pytest.approx(s.R) and f.m[0] == 3

    with pytest.raises(ConfigurationError):
        posterior_params(data, [prior])


def test_posterior_totals_and_readonly():
    p = posterior_params(GroupedAngles.from_degrees([[1, 2, 3], [100], [200, 210]]),
                         [ConjugatePrior(0.1, 0.5, 1.0)] * 3)
    assert p.R_t == p.R_n.sum() and p.m_t == p.m.sum()
    assert np.all(p.R_n <= p.m)
    with pytest.raises(ValueError):
        p.R_n[0] = 3.0


@given(st.lists(st.lists(st.floats(0, 6.28), min_size=1, max_size=10), min_size=1, max_size=4))
@settings(max_examples=50)
def test_flat_prior_commutes_with_pooling(groups):
    data = GroupedAngles(tuple(np.array(g) for g in groups))
    p = posterior_params(data)
    C = sum(r * math.cos(m) for r, m in zip(p.R_n, p.mu_n) if r > 0)
    S = sum(r * math.sin(m) for r, m in zip(p.R_n, p.mu_n) if r > 0)
    pooled = sufficient_stats(data.pooled())
    assert C == pytest.approx(pooled.C, abs=1e-9)
    assert S == pytest.approx(pooled.S, abs=1e-9)
    assert p.m_t == pooled.n


def test_zero_resultant_group_is_flagged():
    p = posterior_params(GroupedAngles(([], [1.0])))
    assert p.degenerate_groups == (0,)
    assert math.isnan(p.mu_n[0])
