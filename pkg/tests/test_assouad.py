import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixminimax.assouad import (
    C0,
    ZETA,
    assouad_bound,
    certify,
    rate_table,
    ratio_spread,
    scheduled_family,
    target_rate,
)
from mixminimax.family_hellinger import HELLINGER_C1, hellinger_schedule
from mixminimax.family_l2 import l2_schedule, make_l2_family, positivity_epsilon_bound

# Regression band for bound / (sqrt(log n) / n) under the L2 schedule with c1 = 1/4,
# recorded over n in [1e3, 1e7]; an artifact constant, not a theoretical one.
L2_RATIO_BAND = (1.0e-7, 1.4e-7)


def test_example_arithmetic():
    cert = assouad_bound("l2", 3, 1e-5, 0.25)
    assert cert.bound == pytest.approx(math.pi / 4 * 0.5 * 3e-5, rel=1e-15)
    assert cert.bound == pytest.approx(1.178e-5, rel=1e-3)
    assert cert.zeta == 0.5 and cert.c0 == 2 * math.pi


def test_unverified_certificate_keeps_value_but_certifies_nothing():
    cert = assouad_bound("hellinger", 2, 1e-6, 0.5)
    assert cert.bound > 0 and not cert.verified and cert.certified_bound == 0.0
    ok = assouad_bound("hellinger", 2, 1e-6, 0.5, separation_verified=True,
                       chi2_verified=True, positivity_verified=True)
    assert ok.certified_bound == ok.bound


def test_degenerate_and_limits():
    cert = assouad_bound("l2", 0, 1e-5, 0.25, separation_verified=True,
                         chi2_verified=True, positivity_verified=True)
    assert cert.bound == 0.0 and cert.degenerate and not cert.verified
    assert assouad_bound("l2", 3, 1e-5, 1 - 1e-12).bound < 1e-16


@pytest.mark.parametrize("kwargs", [dict(c1=0.0), dict(c1=1.0), dict(m=-1), dict(epsilon2=0.0), dict(regime="tv")])
def test_input_validation(kwargs):
    args = dict(regime="l2", m=2, epsilon2=1e-4, c1=0.3) | kwargs
    with pytest.raises(ValueError):
        assouad_bound(args.pop("regime"), **args)


@settings(max_examples=100, deadline=None)
@given(m=st.integers(1, 50), eps2=st.floats(1e-12, 1.0), c1=st.floats(0.001, 0.999),
       regime=st.sampled_from(["l2", "hellinger"]))
def test_bound_formula_and_monotone_in_c1(m, eps2, c1, regime):
    cert = assouad_bound(regime, m, eps2, c1)
    exact = float(Fraction(C0[regime]) * Fraction(ZETA[regime]) / 4
                  * (1 - Fraction(math.sqrt(c1))) * m * Fraction(eps2))
    assert cert.bound == pytest.approx(exact, rel=1e-14)
    assert assouad_bound(regime, m, eps2, min(0.999, c1 + 0.01)).bound <= cert.bound


def test_hellinger_example_at_1e4():
    rows = rate_table("hellinger", [10**4])
    row = rows[0]
    assert row.m == 2 and row.epsilon2 == pytest.approx(6.25e-6)
    assert row.bound == pytest.approx(math.pi / 3 / 4 * (1 - math.sqrt(HELLINGER_C1)) * 2 * 6.25e-6)
    assert row.verified


def test_target_rates():
    assert target_rate("l2", 1000) == pytest.approx(math.sqrt(math.log(1000)) / 1000)
    assert target_rate("hellinger", 1000) == pytest.approx(math.log(1000) / 1000)


@pytest.mark.parametrize("regime,n", [("l2", 10**3), ("l2", 10**5), ("hellinger", 10**3), ("hellinger", 10**6)])
def test_certify_scheduled(regime, n):
    cert = certify(scheduled_family(regime, n), n)
    assert cert.verified, cert.details
    sep = cert.details["separation"]
    assert all(v >= r * (1 - 1e-8) for v, r in zip(sep["values"], sep["required"]))


def test_certify_flags_failures():
    bad = make_l2_family(2, 10 * positivity_epsilon_bound(2), unchecked=True)
    cert = certify(bad, 10**4, 0.25)
    assert not cert.positivity_verified and not cert.verified
    assert cert.separation_verified


def test_certify_degenerate():
    cert = certify(hellinger_schedule(16), 16)
    assert cert.degenerate and cert.bound == 0


def test_rate_table_contract():
    assert rate_table("l2", []) == []
    with pytest.raises(ValueError):
        rate_table("l2", [10**4, 10**3])
    with pytest.raises(ValueError):
        rate_table("l2", [50])
    rows = rate_table("l2", [10**3, 10**4, 10**5, 10**6, 10**7])
    assert all(r.verified for r in rows)
    assert all(L2_RATIO_BAND[0] <= r.ratio <= L2_RATIO_BAND[1] for r in rows)
    assert ratio_spread(rows) <= 10
    assert rate_table("l2", [10**3, 10**4], workers=2) == rows[:2]


def test_schedule_choice():
    assert scheduled_family("l2", 10**4) == l2_schedule(10**4)
    assert scheduled_family("hellinger", 10**4) == hellinger_schedule(10**4)
