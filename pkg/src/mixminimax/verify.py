"""Identity and invariant suites behind the ``verify`` command.

Each check yields a :class:`Check` with a signed margin (nonnegative means
pass) and the tolerance it was judged against.  A check that raises is
recorded as failed with the exception text.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .family_hellinger import (
    absorb_identity_check,
    envelope_margin,
    family_absorb_params,
    hellinger_schedule,
    hellinger_sep_and_test_check,
    make_hellinger_family,
    sandwich_check,
)
from .family_hellinger import psi_numeric as psi_hellinger
from .family_l2 import (
    chi2_adjacent_check,
    envelope_chain_margins,
    l2_schedule,
    l2_separation_check,
    make_l2_family,
    positivity_check,
    psi_gram,
)
from .family_l2 import psi_numeric as psi_l2
from .hermite_fourier import lemma22_inverse
from .integrate import DEFAULT_SPEC, QuadratureSpec, fourier_numeric
from .mixture import MixtureFamily, adjacent_pairs, hamming, random_vertex_pairs
from .sinc import analytic_growth_check, kernel_fourier
from .special import SQRT_2PI, cramer_margin, hermite, phi

LEMMA_ORDERS = (1, 3, 5, 7, 9)
GRAM_ORDERS = (1, 3, 5, 7, 9, 11, 13, 15)
GROWTH_Y = (0.0, 1.0, 2.0)

TOL_LEMMA22 = 1e-6
TOL_ABSORB = 1e-6
TOL_GRAM = 1e-8
TOL_SEPARATION = 1e-7
TOL_KERNEL = 0.01
TOL_GROWTH = 1e-9
GIBBS_ZONE = 0.1


@dataclass
class Check:
    name: str
    regime: str | None
    margin: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _error_check(name, regime, error, tol, **detail) -> Check:
    return Check(name, regime, tol - error, tol, bool(error <= tol), dict(detail, error=error))


def _margin_check(name, regime, margin, tol=0.0, **detail) -> Check:
    return Check(name, regime, margin + tol, tol, bool(margin >= -tol), detail)


def _guard(name, regime, fn) -> Check:
    try:
        return fn()
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        return Check(name, regime, -math.inf, 0.0, False, {"error": str(exc)})


# -- family-free suites -------------------------------------------------------


def check_lemma22(pairs, orders=LEMMA_ORDERS, spec: QuadratureSpec = DEFAULT_SPEC) -> Check:
    """Numeric inverse transform of ``phi(a t) H_k(b t)`` against the closed form on [-8, 8]."""
    x = np.linspace(-8.0, 8.0, 161)
    worst = 0.0
    cases = []
    for a, b in pairs:
        for k in orders:
            closed = lemma22_inverse(a, b, k)(x)
            numeric = fourier_numeric(lambda t, a=a, b=b, k=k: phi(a * t) * hermite(k, b * t),
                                      x, spec, inverse=True)
            err = float(np.max(np.abs(numeric - closed)))
            cases.append({"a": a, "b": b, "k": k, "error": err})
            worst = max(worst, err)
    return _error_check("lemma22", None, worst, TOL_LEMMA22, cases=cases)


def check_kernel_fourier(spec: QuadratureSpec | None = None) -> Check:
    t = np.linspace(-3.0, 3.0, 241)
    t = t[np.abs(np.abs(t) - 1.0) >= GIBBS_ZONE]
    expected = (np.abs(t) <= 1.0) / SQRT_2PI
    err = float(np.max(np.abs(kernel_fourier(t, spec) - expected)))
    return _error_check("kernel_fourier", None, err, TOL_KERNEL, gibbs_zone=GIBBS_ZONE)


def check_cramer(orders=GRAM_ORDERS) -> Check:
    u = np.linspace(-30.0, 30.0, 2001)
    margin = min(float(np.min(cramer_margin(k, u))) for k in orders)
    return _margin_check("cramer_envelope", None, margin)


# -- per-family suites --------------------------------------------------------


def check_orthonormality(regime: str) -> Check:
    psi = psi_l2 if regime == "l2" else psi_hellinger
    gram = psi_gram(GRAM_ORDERS, psi=psi)
    err = float(np.max(np.abs(gram - np.eye(len(GRAM_ORDERS)))))
    return _error_check("orthonormality", regime, err, TOL_GRAM, orders=list(GRAM_ORDERS))


def check_absorb(orders=LEMMA_ORDERS) -> Check:
    grid = np.linspace(-6.0, 6.0, 121)
    errs = {k: absorb_identity_check(family_absorb_params(k), k, grid) for k in orders}
    return _error_check("absorb_identity", "hellinger", max(errs.values()), TOL_ABSORB,
                        per_order={str(k): v for k, v in errs.items()})


def check_envelope(config: MixtureFamily) -> Check:
    grid = np.linspace(-40.0, 40.0, 4001)
    if config.regime == "l2":
        m = envelope_chain_margins(config, grid)
        margins = list(m["bound1"]) + list(m["bound2"] or [])
        return _margin_check("envelope", "l2", min(margins, default=math.inf), **m)
    return _margin_check("envelope", "hellinger", envelope_margin(config, grid))


def check_validity(config: MixtureFamily, seed: int = 0) -> Check:
    if config.regime == "l2":
        rep = positivity_check(config, seed=seed)
        return Check("positivity", "l2", min(rep.min_margin, rep.min_relative_margin), 0.0,
                     rep.passed, rep.to_dict())
    rep = sandwich_check(config, seed=seed)
    margin = min(rep.lower_margin, rep.upper_margin, rep.lower_relative, rep.upper_relative)
    return Check("positivity", "hellinger", margin, 0.0, rep.passed, rep.to_dict())


def check_separation(config: MixtureFamily, seed: int = 0,
                     spec: QuadratureSpec = DEFAULT_SPEC) -> Check:
    """Plancherel separation identity ``2 pi eps^2 hamming`` (weighted by ``1/f_0`` for Hellinger)."""
    pairs = adjacent_pairs(config.m) + random_vertex_pairs(config.m, 8, seed)
    pairs = [(a, b) for a, b in pairs if hamming(a, b) > 0]
    eps2 = config.epsilon ** 2
    if config.regime == "l2":
        errs = [abs(l2_separation_check(config, a, b, spec) / (2 * math.pi * eps2 * hamming(a, b)) - 1)
                for a, b in pairs]
        return _error_check("separation", "l2", max(errs, default=0.0), TOL_SEPARATION,
                            pairs=len(pairs))
    rep = hellinger_sep_and_test_check(config, pairs=pairs, spec=spec, rel_tol=TOL_SEPARATION)
    err = max((p.relative_error for p in rep.pairs), default=0.0)
    sep_failures = [f for f in rep.failures if "4 pi" not in f]
    return Check("separation", "hellinger", TOL_SEPARATION - err, TOL_SEPARATION,
                 not sep_failures, {"error": err, "failures": sep_failures})


def check_chi2(config: MixtureFamily, n: int, c1: float | None = None,
               spec: QuadratureSpec = DEFAULT_SPEC) -> Check:
    if config.regime == "l2":
        rep = chi2_adjacent_check(config, n, c1, spec)
        return _margin_check("chi2", "l2", rep.threshold - rep.max_value, **rep.to_dict())
    rep = hellinger_sep_and_test_check(config, n, spec=spec)
    worst = max((p.chi_sq for p in rep.pairs), default=0.0)
    return Check("chi2", "hellinger", rep.chi_threshold - worst, 0.0, rep.passed, rep.to_dict())


def check_growth(config: MixtureFamily) -> Check:
    x = np.linspace(-20.0, 20.0, 401)
    verts = {"zeros": [0] * config.m, "ones": [1] * config.m}
    margins = {f"{name}@y={y:g}": analytic_growth_check(config, a, y, x)
               for name, a in verts.items() for y in GROWTH_Y}
    return _margin_check("growth", config.regime, min(margins.values()), TOL_GROWTH,
                         margins=margins)


def build_family(regime: str, n: int, m: int | None = None, epsilon: float | None = None,
                 unchecked: bool = False, c1: float | None = None) -> MixtureFamily:
    """Scheduled family for ``n``, or a manual one when ``m`` and ``epsilon`` are given."""
    if m is not None:
        make = make_l2_family if regime == "l2" else make_hellinger_family
        return make(m, epsilon, unchecked=unchecked)
    if regime == "l2":
        return l2_schedule(n) if c1 is None else l2_schedule(n, c1)
    return hellinger_schedule(n)


def run_suites(regimes, n: int, *, pairs, m=None, epsilon=None, unchecked=False,
               c1=None, seed: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> list[Check]:
    """All suites in a fixed order: shared identities, then each family."""
    checks = [
        _guard("lemma22", None, lambda: check_lemma22(pairs, spec=spec)),
        _guard("kernel_fourier", None, check_kernel_fourier),
        _guard("cramer_envelope", None, check_cramer),
    ]
    for regime in regimes:
        try:
            config = build_family(regime, n, m, epsilon, unchecked, c1)
        except ValueError as exc:
            checks.append(Check("construct", regime, -math.inf, 0.0, False, {"error": str(exc)}))
            continue
        checks.append(_guard("orthonormality", regime, lambda: check_orthonormality(regime)))
        if regime == "hellinger":
            checks.append(_guard("absorb_identity", regime, check_absorb))
        if config.degenerate:
            continue
        checks.append(_guard("envelope", regime, lambda: check_envelope(config)))
        checks.append(_guard("positivity", regime, lambda: check_validity(config, seed)))
        checks.append(_guard("separation", regime, lambda: check_separation(config, seed, spec)))
        checks.append(_guard("chi2", regime, lambda: check_chi2(config, n, c1, spec)))
        checks.append(_guard("growth", regime, lambda: check_growth(config)))
    return checks
