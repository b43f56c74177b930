import math

import numpy as np
import pytest
from scipy import stats

from mixminimax.family_hellinger import make_hellinger_family
from mixminimax.family_l2 import l2_perturbation, make_l2_family, positivity_epsilon_bound
from mixminimax.integrate import convolve_numeric, integrate_real
from mixminimax.mixture import (
    EXHAUSTIVE_MAX_M,
    RANDOM_VERTICES,
    MixtureFamily,
    PerturbationSpec,
    adjacent_pairs,
    as_bits,
    hamming,
    random_vertex_pairs,
    v_k_eval,
    vertex_set,
)
from mixminimax.special import phi


@pytest.mark.parametrize("kwargs", [
    dict(order=2, amplitude=1.0),
    dict(order=0, amplitude=1.0),
    dict(order=3, amplitude=1.0, gaussian_scale=0.0),
    dict(order=3, amplitude=1.0, hermite_scale=-1.0),
    dict(order=3, amplitude=math.nan),
])
def test_perturbation_validation(kwargs):
    with pytest.raises(ValueError):
        PerturbationSpec(**kwargs)


def test_perturbation_integrates_to_zero_and_is_odd():
    p = PerturbationSpec(5, 2.0, 1.0, 1.3)
    assert integrate_real(p) == pytest.approx(0.0, abs=1e-14)
    u = np.linspace(0, 4, 9)
    np.testing.assert_allclose(p(-u), -p(u))
    assert isinstance(v_k_eval(p, 0.3), float)


def test_perturbation_smoothed_matches_convolution():
    p = l2_perturbation(7)
    x = np.linspace(-12, 12, 49)
    np.testing.assert_allclose(p.smoothed()(x), convolve_numeric(phi, p, x), atol=1e-15)


def test_bits_and_hamming():
    np.testing.assert_array_equal(as_bits([1, 0, 1], 3), [1, 0, 1])
    with pytest.raises(ValueError):
        as_bits([1, 0], 3)
    with pytest.raises(ValueError):
        as_bits([1, 2, 0], 3)
    assert hamming([1, 0, 1, 1], [0, 0, 1, 0]) == 2


def test_vertex_sets():
    assert vertex_set(3).shape == (8, 3)
    assert len({tuple(v) for v in vertex_set(EXHAUSTIVE_MAX_M)}) == 2**EXHAUSTIVE_MAX_M
    big = vertex_set(9, seed=4)
    assert big.shape == (RANDOM_VERTICES + 2, 9)
    assert not big[0].any() and big[-1].all()
    np.testing.assert_array_equal(big, vertex_set(9, seed=4))
    assert vertex_set(0).shape == (1, 0)


def test_pairs():
    for a, b in adjacent_pairs(4):
        assert hamming(a, b) == 1 and a.all()
    pairs = random_vertex_pairs(5, 6, seed=1)
    assert len(pairs) == 6
    np.testing.assert_array_equal(pairs[2][0], random_vertex_pairs(5, 6, seed=1)[2][0])


def test_family_validation():
    perts = (l2_perturbation(1), l2_perturbation(3))
    with pytest.raises(ValueError):
        MixtureFamily(m=3, epsilon=0.1, base_variance=1.0, perturbations=perts)
    with pytest.raises(ValueError):
        MixtureFamily(m=2, epsilon=0.1, base_variance=1.0, perturbations=(perts[0], perts[0]))
    with pytest.raises(ValueError):
        MixtureFamily(m=2, epsilon=0.0, base_variance=1.0, perturbations=perts)
    with pytest.raises(ValueError):
        MixtureFamily(m=2, epsilon=0.1, base_variance=-1.0, perturbations=perts)
    with pytest.raises(NotImplementedError):
        MixtureFamily(m=2, epsilon=0.1, base_variance=2.0, perturbations=perts).envelope_constant([1, 1])


@pytest.fixture(params=["l2", "hellinger"])
def family(request):
    if request.param == "l2":
        return make_l2_family(3, 0.9 * positivity_epsilon_bound(3))
    return make_hellinger_family(2, 1e-3)


def test_densities_integrate_to_one(family):
    for alpha in vertex_set(family.m):
        assert integrate_real(lambda u: family.pi(alpha, u)) == pytest.approx(1.0, abs=1e-12)
        assert integrate_real(lambda x: family.f(alpha, x)) == pytest.approx(1.0, abs=1e-12)


def test_closed_and_quadrature_smoothing_agree(family):
    x = np.linspace(-15, 15, 31)
    alpha = [1] * family.m
    np.testing.assert_allclose(family.f(alpha, x), family.f(alpha, x, method="quadrature"), atol=1e-15)
    with pytest.raises(ValueError):
        family.smoothed_values(x, method="spline")


def test_difference_and_log_ratio(family):
    x = np.linspace(-10, 10, 41)
    a = [1] * family.m
    b = [0] + [1] * (family.m - 1)
    np.testing.assert_allclose(family.f_diff(a, b, x), family.f(a, x) - family.f(b, x), atol=1e-16)
    np.testing.assert_allclose(family.log_ratio(a, b, x), np.log(family.f(b, x) / family.f(a, x)), atol=1e-12)
    assert not family.f_diff(a, a, x).any()


def test_mixing_sampler_matches_density(family):
    alpha = [1] * family.m
    rng = np.random.default_rng(11)
    u, rate = family.sample_mixing(alpha, rng, 50_000)
    c = family.envelope_constant(alpha)
    # expected acceptance is 1/c; binomial standard error on the proposal count
    assert rate == pytest.approx(1 / c, abs=4 * math.sqrt(rate * (1 - rate) / (50_000 * c)) + 1e-3)
    grid = np.linspace(-12, 12, 4001)
    cdf = np.cumsum(family.pi(alpha, grid)) * (grid[1] - grid[0])
    res = stats.kstest(u, lambda q: np.interp(q, grid, cdf))
    assert res.pvalue > 1e-3


def test_zero_vertex_sampling_is_plain_gaussian(family):
    u, rate = family.sample_mixing([0] * family.m, np.random.default_rng(1), 10)
    assert rate == 1.0 and u.shape == (10,)


def test_sampling_is_seeded(family):
    alpha = [1] * family.m
    a = family.sample(alpha, np.random.default_rng(3), 500)
    b = family.sample(alpha, np.random.default_rng(3), 500)
    np.testing.assert_array_equal(a, b)


def test_broken_envelope_is_detected():
    fam = make_l2_family(1, 200 * positivity_epsilon_bound(1), unchecked=True)
    with pytest.raises(RuntimeError):
        fam.sample_mixing([1], np.random.default_rng(0), 10_000)


def test_to_dict_round_trips_fields(family):
    d = family.to_dict()
    assert d["m"] == family.m and d["regime"] == family.regime
    assert d["orders"] == [2 * j + 1 for j in range(family.m)]
