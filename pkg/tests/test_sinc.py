import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.special import sici

from mixminimax.family_hellinger import hellinger_schedule
from mixminimax.family_l2 import l2_schedule
from mixminimax.integrate import QuadratureSpec, integrate_real
from mixminimax.sinc import (
    KERNEL_L2_SQ,
    GaussianTarget,
    analytic_growth_check,
    bias_sq_bound,
    default_bandwidth,
    ell_n,
    empirical_characteristic,
    ise,
    ise_fourier,
    kernel_fourier,
    mise_half_width,
    mise_mc,
    sample_mixture,
    sinc_estimate,
    sinc_estimate_spectral,
    sinc_kernel,
    variance_bound,
)
from mixminimax.special import GaussianDensity

PHI2 = GaussianDensity(0.0, 2.0)


def test_kernel_values():
    assert sinc_kernel(0.0) == pytest.approx(1 / math.pi)
    assert sinc_kernel(math.pi) == pytest.approx(0.0, abs=1e-16)
    u = np.array([0.3, -2.0, 7.5])
    np.testing.assert_allclose(sinc_kernel(u), np.sin(u) / (math.pi * u))


def test_kernel_l2_norm_with_tail_bound():
    L = 400.0
    value = integrate_real(lambda u: sinc_kernel(u) ** 2, QuadratureSpec(L=L, panels=1600))
    tail = 2 / (math.pi**2 * L)
    assert value <= KERNEL_L2_SQ <= value + tail
    assert KERNEL_L2_SQ == pytest.approx(0.31831, abs=1e-5)


def test_estimator_examples():
    h = 0.4
    assert sinc_estimate([1.3], 1.3, h) == pytest.approx(1 / (math.pi * h))
    assert sinc_estimate([0.0, h * math.pi], 0.0, h) == pytest.approx(1 / (2 * h) / math.pi)
    with pytest.raises(ValueError):
        sinc_estimate([0.0], 0.0, 0.0)
    with pytest.raises(ValueError):
        sinc_estimate_spectral([0.0], 0.0, -1.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 400), h=st.floats(0.2, 2.0))
def test_spectral_path_matches_direct(seed, n, h):
    data = np.random.default_rng(seed).normal(0, 2, n)
    x = np.linspace(-12, 12, 97)
    np.testing.assert_allclose(sinc_estimate_spectral(data, x, h), sinc_estimate(data, x, h), atol=1e-11)


def test_empirical_characteristic():
    np.testing.assert_allclose(empirical_characteristic([0.5, -1.0], [0.0, 2.0]),
                               [1.0, 0.5 * (np.exp(1j) + np.exp(-2j))])


def test_kernel_fourier_against_sine_integral():
    L = 400.0
    t = np.array([0.0, 0.4, 0.95, 1.05, 2.0])
    si = (sici((1 + t) * L)[0] + sici((1 - t) * L)[0]) / math.pi
    np.testing.assert_allclose(kernel_fourier(t) * math.sqrt(2 * math.pi), si, atol=1e-10)


def test_kernel_fourier_is_band_limited_indicator():
    t = np.linspace(-3, 3, 121)
    t = t[np.abs(np.abs(t) - 1) >= 0.1]
    expected = (np.abs(t) <= 1) / math.sqrt(2 * math.pi)
    assert np.max(np.abs(kernel_fourier(t) - expected)) <= 0.01


def test_sampling_determinism_and_shape():
    a = sample_mixture(PHI2, 1000, seed=4)
    b = sample_mixture(PHI2, 1000, seed=4)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.n == 1000 and a.values.shape == (1000,) and a.acceptance_rate == 1.0
    assert not a.values.flags.writeable
    with pytest.raises(ValueError):
        sample_mixture(l2_schedule(10**4), 10, seed=0)
    with pytest.raises(TypeError):
        sample_mixture("phi", 10, seed=0)


@pytest.mark.parametrize("family", [l2_schedule(10**4), hellinger_schedule(10**4)])
def test_zero_vertex_sample_is_null_gaussian(family):
    s = sample_mixture(family, 10**5, seed=8, alpha=[0] * family.m)
    null = family.null_density
    stat = stats.kstest(s.values, stats.norm(0, null.std).cdf).statistic
    assert stat < 1.628 / math.sqrt(10**5)  # 1% critical value


@pytest.mark.parametrize("family", [l2_schedule(10**3), l2_schedule(10**6), hellinger_schedule(10**6)])
def test_acceptance_rate(family):
    n = 50_000
    s = sample_mixture(family, n, seed=2, alpha=[1] * family.m)
    rate = s.acceptance_rate
    proposals = n / rate
    se = math.sqrt(rate * (1 - rate) / proposals)
    assert rate >= 2 / 3 - 3 * se


def test_estimate_at_zero_is_consistent():
    values = [sinc_estimate(sample_mixture(PHI2, 10**5, seed=s), 0.0, default_bandwidth(10**5))
              for s in range(20)]
    se = np.std(values, ddof=1) / math.sqrt(len(values))
    assert abs(np.mean(values) - PHI2.pdf(0.0)) <= 3 * se
    assert PHI2.pdf(0.0) == pytest.approx(0.2821, abs=1e-4)


def test_estimate_integrates_to_about_one():
    s = sample_mixture(PHI2, 4096, seed=6)
    h = default_bandwidth(4096)
    half = mise_half_width(GaussianTarget(PHI2))
    mass = integrate_real(lambda x: sinc_estimate_spectral(s, x, h), QuadratureSpec(L=half, panels=250))
    assert abs(mass - 1) <= 0.05


def test_grid_ise_matches_plancherel_ise():
    target = GaussianTarget(PHI2)
    for n, seed in ((1024, 1), (8192, 2)):
        s = sample_mixture(PHI2, n, seed)
        h = default_bandwidth(n)
        value, tail = ise(s, PHI2.pdf, h, mise_half_width(target))
        exact = ise_fourier(s, target.characteristic, h)
        assert abs(value - exact) <= tail


def test_analytic_bounds():
    n = 4096
    h = default_bandwidth(n)
    assert variance_bound(n, h) == pytest.approx(1 / (math.pi * n * h))
    assert bias_sq_bound(h) == pytest.approx(2 / math.sqrt(2 * math.pi) / math.sqrt(n))
    assert ell_n(n) == pytest.approx(math.sqrt(math.log(n)) / n)
    with pytest.raises(ValueError):
        default_bandwidth(1)


def test_mise_report():
    rep = mise_mc(PHI2, 1024, reps=12, seed=5)
    assert rep.reps == 12 and rep.h == default_bandwidth(1024)
    assert rep.mise_mean >= 0 and rep.mise_stderr >= 0
    assert rep.mise_mean <= rep.variance_bound + rep.bias_sq_bound + 5 * rep.mise_stderr
    assert rep.truncation < 0.05 * rep.mise_mean
    assert rep.to_dict()["ratio"] == pytest.approx(rep.mise_mean / rep.ell_n)
    assert mise_mc(PHI2, 1024, reps=12, seed=5, workers=3) == rep
    with pytest.raises(ValueError):
        mise_mc(PHI2, 1024, reps=5)


def test_mise_on_a_family_target():
    fam = l2_schedule(10**4)
    rep = mise_mc(fam, 2048, reps=10, seed=1, alpha=[1] * fam.m)
    assert 0 < rep.mise_mean <= rep.variance_bound + rep.bias_sq_bound + 5 * rep.mise_stderr


@pytest.mark.parametrize("family", [l2_schedule(10**4), hellinger_schedule(10**4)])
def test_growth_condition(family):
    x = np.linspace(-20, 20, 201)
    zero = [0] * family.m
    m0 = analytic_growth_check(family, zero, 0.0, x)
    sup_f = float(np.max(family.f(zero, x)))
    assert m0 == pytest.approx(1 / math.sqrt(2 * math.pi) - sup_f, abs=1e-12)
    for alpha in (zero, [1] * family.m):
        assert analytic_growth_check(family, alpha, 2.0, x) >= -1e-9
    with pytest.raises(ValueError):
        analytic_growth_check(family, zero, 6.5, x)
