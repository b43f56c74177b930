"""Adversarial family for squared Hellinger loss.

Here ``pi_0 = phi`` (so ``f_0 = phi_2``) and

    v_k(u) = 2^(5/4) sqrt(pi) sqrt(5^k / k!) phi(sqrt(3) u) H_k(4u / sqrt(5)).

Dividing a smoothed perturbation by ``sqrt(f_0)`` gives another Gaussian
smoothing (:func:`absorb_transform`), which is what makes the weighted L2
distance ``integral (f_alpha - f_beta)^2 / f_0`` exactly
``2 pi eps^2 * hamming(alpha, beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import divergences
from .integrate import DEFAULT_SPEC, QuadratureSpec, convolve_numeric, fourier_numeric
from .mixture import MixtureFamily, PerturbationSpec, adjacent_pairs, hamming, vertex_set
from .special import KAPPA, normal_pdf, phi

RHO = math.sqrt(3.0)
GAMMA = 4.0 / math.sqrt(5.0)
#: Weighted-L2 separation constant ``c0`` implied by the 1/6 Hellinger comparison.
HELLINGER_C0 = math.pi / 3.0
#: ``c1`` implied by ``eps = 1/(4 sqrt(n))``: ``4 pi eps^2 = (pi/4) / n``.
HELLINGER_C1 = math.pi / 4.0


def hellinger_coefficient(k: int) -> float:
    """``C_k = 2^(5/4) sqrt(pi) 5^(k/2)``."""
    return 2.0 ** 1.25 * math.sqrt(math.pi) * 5.0 ** (k / 2.0)


def sandwich_epsilon_bound(m: int) -> float:
    """``1 / (2 kappa m C_{2m-1})``."""
    return 1.0 / (2.0 * KAPPA * m * hellinger_coefficient(2 * m - 1))


def hellinger_perturbation(k: int) -> PerturbationSpec:
    amplitude = hellinger_coefficient(k) * math.exp(-0.5 * math.lgamma(k + 1))
    return PerturbationSpec(order=k, amplitude=amplitude, gaussian_scale=RHO, hermite_scale=GAMMA)


@dataclass(frozen=True)
class FamilyConfigH(MixtureFamily):
    regime = "hellinger"

    def __post_init__(self):
        super().__post_init__()
        if self.base_variance != 1.0:
            raise ValueError("the Hellinger family uses pi_0 = phi")
        if self.checked and self.m >= 1 and self.epsilon > sandwich_epsilon_bound(self.m):
            raise ValueError(
                f"epsilon={self.epsilon:.6g} exceeds the sandwich bound "
                f"{sandwich_epsilon_bound(self.m):.6g}; pass unchecked=True to build anyway"
            )

    def envelope_constant(self, alpha) -> float:
        bits = self.bits(alpha)
        # |v_k| <= kappa C_k phi
        return 1.0 + self.epsilon * KAPPA * sum(
            hellinger_coefficient(k) for k, b in zip(self.orders, bits) if b)


def make_hellinger_family(m: int, epsilon: float, *, unchecked: bool = False,
                          schedule: dict | None = None) -> FamilyConfigH:
    perturbations = tuple(hellinger_perturbation(2 * j + 1) for j in range(m))
    return FamilyConfigH(m=m, epsilon=epsilon, base_variance=1.0, perturbations=perturbations,
                         checked=not unchecked, schedule=dict(schedule or {}))


def hellinger_schedule_m(n: int) -> int:
    """Largest ``m >= 0`` with ``6 m 5^m <= 4 sqrt(n)`` (compared exactly in integers)."""
    m = 0
    while (6 * (m + 1) * 5 ** (m + 1)) ** 2 <= 16 * n:
        m += 1
    return m


def hellinger_schedule(n: int) -> FamilyConfigH:
    """``eps = 1/(4 sqrt(n))`` and the largest admissible ``m``; ``m = 0`` is flagged degenerate."""
    if int(n) != n or n < 16:
        raise ValueError("n must be an integer >= 16")
    n = int(n)
    m = hellinger_schedule_m(n)
    schedule = {"n": n, "c1": HELLINGER_C1, "degenerate": m == 0}
    return make_hellinger_family(m, 1.0 / (4.0 * math.sqrt(n)), schedule=schedule)


# -- absorbing the sqrt(f_0) denominator --------------------------------------


@dataclass(frozen=True)
class AbsorbParams:
    """Perturbation ``C_k/sqrt(k!) phi(rho u) H_k(gamma u)`` over ``pi_0 = phi_sigma2``.

    The tilde fields describe ``v~_k`` with
    ``(phi * v_k) / sqrt(phi * phi_sigma2) = phi_{sigma2~} * v~_k``.
    """

    sigma2: float
    rho: float
    gamma: float
    coefficient: float
    sigma2_tilde: float | None = None
    rho_tilde: float | None = None
    gamma_tilde: float | None = None
    coefficient_tilde: float | None = None

    def perturbation(self, k: int) -> PerturbationSpec:
        return PerturbationSpec(k, self.coefficient * math.exp(-0.5 * math.lgamma(k + 1)),
                                self.rho, self.gamma)

    def tilde_perturbation(self, k: int) -> PerturbationSpec:
        if self.sigma2_tilde is None:
            raise ValueError("tilde fields not filled; call absorb_transform first")
        return PerturbationSpec(k, self.coefficient_tilde * math.exp(-0.5 * math.lgamma(k + 1)),
                                self.rho_tilde, self.gamma_tilde)


def absorb_transform(params: AbsorbParams) -> AbsorbParams:
    """Fill the tilde fields.

    ``sigma2~ = 1 + 1/(2 sigma2 + 1)``, ``rho~ = sqrt(rho^2 + 1 - sigma2~) / sigma2~``,
    ``gamma~ = gamma / sigma2~`` and
    ``C~ = C (2 pi (1 + sigma2))^(1/4) / sigma~``; the last reduces to
    ``C (4 pi)^(1/4) / sigma~`` at ``sigma2 = 1``.

    Raises
    ------
    ValueError
        If ``rho^2 < 1/sigma2 + gamma^2/2``.
    """
    s2, rho, gamma = params.sigma2, params.rho, params.gamma
    if not (s2 > 0 and rho > 0 and gamma > 0):
        raise ValueError("sigma2, rho and gamma must be positive")
    need = 1.0 / s2 + gamma * gamma / 2.0
    if rho * rho < need * (1 - 1e-12):
        raise ValueError(f"rho^2 = {rho * rho:.6g} violates rho^2 >= 1/sigma2 + gamma^2/2 = {need:.6g}")
    st2 = 1.0 + 1.0 / (2.0 * s2 + 1.0)
    inside = rho * rho + 1.0 - st2
    if inside <= 0:
        raise ValueError("1 + rho^2 - sigma2~ must be positive")
    return replace(
        params,
        sigma2_tilde=st2,
        rho_tilde=math.sqrt(inside) / st2,
        gamma_tilde=gamma / st2,
        coefficient_tilde=params.coefficient * (2.0 * math.pi * (1.0 + s2)) ** 0.25 / math.sqrt(st2),
    )


def family_absorb_params(k: int) -> AbsorbParams:
    """Transformed parameters for the Hellinger family's ``v_k``."""
    return absorb_transform(AbsorbParams(1.0, RHO, GAMMA, hellinger_coefficient(k)))


def absorb_identity_check(params: AbsorbParams, k: int, grid,
                          spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Max abs deviation between both sides of the absorption identity on ``grid``.

    Both sides are computed by independent quadrature convolutions.
    """
    if params.sigma2_tilde is None:
        params = absorb_transform(params)
    x = np.asarray(grid, dtype=float)
    denom = normal_pdf(x, 1.0 + params.sigma2)
    if np.any(denom < 1e-300):
        raise ValueError("grid reaches where phi_{1+sigma2} underflows")
    lhs = convolve_numeric(phi, params.perturbation(k), x, spec) / np.sqrt(denom)
    st2 = params.sigma2_tilde
    rhs = convolve_numeric(lambda z: normal_pdf(z, st2), params.tilde_perturbation(k), x, spec)
    return float(np.max(np.abs(lhs - rhs)))


# -- certificates ----------------------------------------------------------


@dataclass
class SandwichReport:
    lower_margin: float
    upper_margin: float
    lower_relative: float
    upper_relative: float
    worst_alpha: list[int]
    worst_u: float
    vertices_checked: int

    @property
    def passed(self) -> bool:
        return min(self.lower_margin, self.upper_margin,
                   self.lower_relative, self.upper_relative) >= 0.0

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def sandwich_check(config: MixtureFamily, grid=None, seed: int = 0) -> SandwichReport:
    """Margins of ``pi_0/2 <= pi_alpha <= 3 pi_0/2`` over the vertex set and a grid.

    Relative margins divide by ``pi_0``; all four must be nonnegative.
    """
    if grid is None:
        half = 8.0 * math.sqrt(config.base_variance)
        grid = np.linspace(-half, half, 4001)
    u = np.asarray(grid, dtype=float)
    verts = vertex_set(config.m, seed)
    base = config.mixing_base.pdf(u)
    pert = config.perturbation_values(u) if config.m else np.zeros((0, u.size))
    excess = config.epsilon * verts @ pert
    rel = excess / base[None, :]
    lower_rel = 0.5 + rel
    upper_rel = 0.5 - rel
    worst = np.minimum(lower_rel, upper_rel)
    i, j = np.unravel_index(np.argmin(worst), worst.shape)
    return SandwichReport(
        lower_margin=float(np.min(base / 2.0 + excess)),
        upper_margin=float(np.min(base / 2.0 - excess)),
        lower_relative=float(lower_rel.min()),
        upper_relative=float(upper_rel.min()),
        worst_alpha=verts[i].tolist(),
        worst_u=float(u[j]),
        vertices_checked=len(verts),
    )


@dataclass
class PairCheck:
    hamming: int
    weighted_l2: float
    expected_weighted_l2: float
    hellinger_sq: float
    chi_sq: float

    @property
    def relative_error(self) -> float:
        if self.expected_weighted_l2 == 0:
            return abs(self.weighted_l2)
        return abs(self.weighted_l2 / self.expected_weighted_l2 - 1.0)


@dataclass
class HellingerReport:
    pairs: list[PairCheck]
    epsilon: float
    chi_threshold: float
    rel_tol: float = 1e-7
    abs_tol: float = 1e-15
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "chi_threshold": self.chi_threshold,
            "pairs": [dict(p.__dict__, relative_error=p.relative_error) for p in self.pairs],
            "failures": self.failures,
            "passed": self.passed,
        }


def hellinger_sep_and_test_check(config: MixtureFamily, n: int | None = None, pairs=None,
                                 spec: QuadratureSpec = DEFAULT_SPEC,
                                 rel_tol: float = 1e-7) -> HellingerReport:
    """Check weighted separation, the 1/6 Hellinger comparison and the chi-square bounds.

    For each pair: ``integral (f_a - f_b)^2 / f_0`` against
    ``2 pi eps^2 hamming`` (relative ``rel_tol``), squared Hellinger
    ``>= weighted / 6``, chi-square ``<= 2 weighted``; adjacent pairs must
    also satisfy chi-square ``<= 4 pi eps^2``.  ``n`` is informational.
    """
    if pairs is None:
        pairs = adjacent_pairs(config.m)
    f0 = config.null_density.pdf
    eps2 = config.epsilon ** 2
    report = HellingerReport([], config.epsilon, 4.0 * math.pi * eps2, rel_tol)
    slack = report.abs_tol
    for alpha, beta in pairs:
        def fa(x, a=alpha):
            return config.f(a, x)

        def fb(x, b=beta):
            return config.f(b, x)

        def diff(x, a=alpha, b=beta):
            return config.f_diff(a, b, x)

        h = hamming(alpha, beta)
        check = PairCheck(
            hamming=h,
            weighted_l2=divergences.chi_sq(f0, fa, spec, diff=diff),
            expected_weighted_l2=2.0 * math.pi * eps2 * h,
            hellinger_sq=divergences.hellinger_sq(fa, fb, spec, diff=diff),
            chi_sq=divergences.chi_sq(fa, fb, spec, diff=diff),
        )
        report.pairs.append(check)
        tag = f"pair {len(report.pairs) - 1}"
        if check.relative_error > rel_tol:
            report.failures.append(f"{tag}: weighted separation off by {check.relative_error:.3g}")
        if check.hellinger_sq < check.weighted_l2 / 6.0 - slack:
            report.failures.append(f"{tag}: hellinger below weighted/6")
        if check.chi_sq > 2.0 * check.weighted_l2 + slack:
            report.failures.append(f"{tag}: chi-square above 2 * weighted")
        if h == 1 and check.chi_sq > report.chi_threshold:
            report.failures.append(f"{tag}: chi-square above 4 pi eps^2")
    return report


# -- Fourier side -------------------------------------------------------------


def psi_numeric(k: int, t, spec: QuadratureSpec = DEFAULT_SPEC):
    """``F[phi_{4/3}](t) * F[v~_k](t)``, both transforms by quadrature."""
    params = family_absorb_params(k)
    st2 = params.sigma2_tilde
    smoother = fourier_numeric(lambda z: normal_pdf(z, st2), t, spec)
    return smoother * fourier_numeric(params.tilde_perturbation(k), t, spec)


def envelope_margin(config: MixtureFamily, grid) -> float:
    """``min (kappa C_k phi(u) - |v_k(u)|)`` over coordinates and grid."""
    u = np.asarray(grid, dtype=float)
    margins = [np.min(KAPPA * hellinger_coefficient(p.order) * phi(u) - np.abs(p(u)))
               for p in config.perturbations]
    return float(min(margins, default=np.inf))
