"""Hypercube lower bound and the resulting rate tables.

For a family ``{f_alpha}`` with separation ``W(f_a, f_b) >= c0 eps^2 hamming``,
adjacent chi-square at most ``c1 / n`` and a loss with pseudo-triangle
constant ``zeta``, every estimator has worst-case risk at least
``(c0 zeta / 4) (1 - sqrt(c1)) m eps^2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import divergences
from .family_hellinger import (
    HELLINGER_C0,
    HELLINGER_C1,
    hellinger_schedule,
    hellinger_sep_and_test_check,
    sandwich_check,
)
from .family_l2 import (
    DEFAULT_C1,
    chi2_adjacent_check,
    l2_schedule,
    l2_separation_check,
    positivity_check,
)
from .integrate import DEFAULT_SPEC, QuadratureSpec
from .mixture import MixtureFamily, adjacent_pairs, hamming, random_vertex_pairs

REGIMES = ("l2", "hellinger")
ZETA = {"l2": 0.5, "hellinger": 1.0}
C0 = {"l2": 2.0 * math.pi, "hellinger": HELLINGER_C0}
DEFAULT_C1_BY_REGIME = {"l2": DEFAULT_C1, "hellinger": HELLINGER_C1}

# Random vertex pairs added to the adjacent ones in separation checks.
SEPARATION_PAIRS = 8
SEPARATION_RTOL = 1e-8


def check_regime(regime: str) -> str:
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    return regime


def target_rate(regime: str, n: int) -> float:
    """``sqrt(log n) / n`` for L2, ``log n / n`` for Hellinger."""
    check_regime(regime)
    if regime == "l2":
        return math.sqrt(math.log(n)) / n
    return math.log(n) / n


def lower_bound_value(c0: float, zeta: float, c1: float, m: int, epsilon2: float) -> float:
    return c0 * zeta / 4.0 * (1.0 - math.sqrt(c1)) * m * epsilon2


@dataclass
class AssouadCertificate:
    regime: str
    zeta: float
    c0: float
    c1: float
    m: int
    epsilon2: float
    separation_verified: bool
    chi2_verified: bool
    positivity_verified: bool
    bound: float
    n: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.m == 0

    @property
    def verified(self) -> bool:
        return (self.m >= 1 and self.separation_verified and self.chi2_verified
                and self.positivity_verified)

    @property
    def certified_bound(self) -> float:
        """``bound`` when every hypothesis was verified, else 0."""
        return self.bound if self.verified else 0.0

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out.update(verified=self.verified, degenerate=self.degenerate,
                   certified_bound=self.certified_bound)
        return out


def assouad_bound(regime: str, m: int, epsilon2: float, c1: float, *,
                  separation_verified: bool = False, chi2_verified: bool = False,
                  positivity_verified: bool = False, n: int | None = None,
                  details: dict | None = None) -> AssouadCertificate:
    """Certificate with the closed-form bound; flags are taken as given."""
    check_regime(regime)
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie in (0, 1)")
    if m < 0 or epsilon2 <= 0:
        raise ValueError("need m >= 0 and epsilon2 > 0")
    zeta, c0 = ZETA[regime], C0[regime]
    return AssouadCertificate(
        regime=regime, zeta=zeta, c0=c0, c1=c1, m=m, epsilon2=epsilon2,
        separation_verified=separation_verified, chi2_verified=chi2_verified,
        positivity_verified=positivity_verified,
        bound=lower_bound_value(c0, zeta, c1, m, epsilon2),
        n=n, details=dict(details or {}),
    )


def scheduled_family(regime: str, n: int, c1: float | None = None) -> MixtureFamily:
    check_regime(regime)
    if regime == "l2":
        return l2_schedule(n, DEFAULT_C1 if c1 is None else c1)
    return hellinger_schedule(n)


def _separation_pairs(m: int, seed: int):
    return adjacent_pairs(m) + random_vertex_pairs(m, SEPARATION_PAIRS, seed)


def certify(config: MixtureFamily, n: int, c1: float | None = None,
            spec: QuadratureSpec = DEFAULT_SPEC, seed: int = 0) -> AssouadCertificate:
    """Run the family checks and assemble the certificate."""
    regime = check_regime(config.regime)
    if c1 is None:
        c1 = DEFAULT_C1_BY_REGIME[regime]
    eps2 = config.epsilon ** 2
    if config.degenerate:
        return assouad_bound(regime, 0, eps2, c1, n=n, details={"degenerate": True})

    pairs = _separation_pairs(config.m, seed)
    details: dict = {"spec": spec.to_dict(), "family": config.to_dict()}
    c0 = C0[regime]
    if regime == "l2":
        seps = [l2_separation_check(config, a, b, spec) for a, b in pairs]
        chi = chi2_adjacent_check(config, n, c1, spec)
        pos = positivity_check(config, seed=seed)
        chi_ok = chi.passed
        details.update(chi2=chi.to_dict(), positivity=pos.to_dict())
    else:
        seps = []
        for a, b in pairs:
            seps.append(divergences.hellinger_sq(
                lambda x, a=a: config.f(a, x), lambda x, b=b: config.f(b, x), spec,
                diff=lambda x, a=a, b=b: config.f_diff(a, b, x)))
        hrep = hellinger_sep_and_test_check(config, n, adjacent_pairs(config.m), spec)
        pos = sandwich_check(config, seed=seed)
        chi_values = [p.chi_sq for p in hrep.pairs]
        chi_ok = hrep.passed and all(v <= c1 / n for v in chi_values)
        details.update(hellinger=hrep.to_dict(), sandwich=pos.to_dict(),
                       chi2={"values": chi_values, "threshold": c1 / n})
    required = [c0 * eps2 * hamming(a, b) for a, b in pairs]
    sep_margins = [s - r for s, r in zip(seps, required)]
    sep_ok = all(s >= r * (1 - SEPARATION_RTOL) for s, r in zip(seps, required))
    details["separation"] = {"values": seps, "required": required, "margins": sep_margins}
    return assouad_bound(regime, config.m, eps2, c1, separation_verified=sep_ok,
                         chi2_verified=chi_ok, positivity_verified=pos.passed,
                         n=n, details=details)


@dataclass(frozen=True)
class RateRow:
    n: int
    regime: str
    m: int
    epsilon2: float
    bound: float
    target_rate: float
    ratio: float
    verified: bool


def rate_table(regime: str, n_list, c1: float | None = None, *, verify: bool = True,
               spec: QuadratureSpec = DEFAULT_SPEC, workers: int = 1) -> list[RateRow]:
    """Lower bound against the target rate for each ``n``."""
    check_regime(regime)
    n_list = [int(n) for n in n_list]
    if any(n < 100 for n in n_list):
        raise ValueError("every n must be >= 100")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    if c1 is None:
        c1 = DEFAULT_C1_BY_REGIME[regime]

    def row(n):
        config = scheduled_family(regime, n, c1)
        if verify:
            cert = certify(config, n, c1, spec)
        else:
            cert = assouad_bound(regime, config.m, config.epsilon ** 2, c1, n=n)
        rate = target_rate(regime, n)
        return RateRow(n, regime, cert.m, cert.epsilon2, cert.bound, rate,
                       cert.bound / rate, cert.verified)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(row, n_list))
    return [row(n) for n in n_list]


def ratio_spread(rows) -> float:
    """``max ratio / min ratio`` over rows with a positive ratio."""
    ratios = [r.ratio for r in rows if r.ratio > 0]
    if not ratios:
        return math.nan
    return max(ratios) / min(ratios)
