"""Adversarial family for squared L2 loss.

Perturbations are ``v_k(u) = C sqrt(3^k / k!) phi(u) H_k(2u / sqrt(3))`` for
odd ``k`` in ``{1, 3, ..., 2m-1}`` with ``C = sqrt(2) (2 pi)^(3/4)``, on top
of ``pi_0 = phi_m``.  Their smoothed Fourier transforms
``psi_k(t) = phi(t) F v_k(t)`` are orthonormal, which makes
``||f_alpha - f_beta||^2 = 2 pi eps^2 * hamming(alpha, beta)`` exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermite_fourier import lemma22_inverse  # noqa: F401  (re-exported)
from .integrate import DEFAULT_SPEC, QuadratureSpec, fourier_numeric, integrate_real
from .mixture import (
    MixtureFamily,
    PerturbationSpec,
    adjacent_pairs,
    vertex_set,
)
from .special import KAPPA, hermite_normalized, phi

#: ``C`` with ``C phi(t)^2 = sqrt(2 phi(2t))``.
C_L2 = math.sqrt(2.0) * (2.0 * math.pi) ** 0.75
#: Splitting radius constant, ``M^2 = 8 log 9``.
M_SQUARED = 8.0 * math.log(9.0)
#: ``C* = 2 sqrt(2 pi) exp(M^2 / 2)``.
C_STAR = 2.0 * math.sqrt(2.0 * math.pi) * math.exp(M_SQUARED / 2.0)
CHI2_PROOF_FACTOR = 2.0 * math.pi * C_STAR + 64.0 / 3.0

HERMITE_SCALE = 2.0 / math.sqrt(3.0)
DEFAULT_C1 = 0.25
MAX_M = 50


def envelope_coefficient(k: int) -> float:
    """``C_k = 8 * 3^(k/2)``, so that ``|v_k(u)| <= C_k phi(u / sqrt(3))``."""
    return 8.0 * 3.0 ** (k / 2.0)


def positivity_epsilon_bound(m: int) -> float:
    """Largest ``eps`` keeping ``pi_alpha >= pi_0 / 2``: ``3^(1/2 - m) m^(-3/2) / 16``."""
    return 3.0 ** (0.5 - m) * m ** -1.5 / 16.0


def l2_perturbation(k: int) -> PerturbationSpec:
    amplitude = C_L2 * math.exp(0.5 * (k * math.log(3.0) - math.lgamma(k + 1)))
    return PerturbationSpec(order=k, amplitude=amplitude, gaussian_scale=1.0,
                            hermite_scale=HERMITE_SCALE)


@dataclass(frozen=True)
class FamilyConfigL2(MixtureFamily):
    regime = "l2"

    def __post_init__(self):
        super().__post_init__()
        if self.checked and self.m >= 1 and self.epsilon > positivity_epsilon_bound(self.m) * (1 + 1e-12):
            raise ValueError(
                f"epsilon={self.epsilon:.6g} exceeds the positivity bound "
                f"{positivity_epsilon_bound(self.m):.6g}; pass unchecked=True to build anyway"
            )

    def envelope_constant(self, alpha) -> float:
        bits = self.bits(alpha)
        if self.m >= 3:
            # |v_k| <= C_k sqrt(m) pi_0 needs phi(u/sqrt(3)) <= phi(u/sqrt(m))
            return 1.0 + self.epsilon * math.sqrt(self.m) * sum(
                envelope_coefficient(k) for k, b in zip(self.orders, bits) if b)
        return 1.5


def make_l2_family(m: int, epsilon: float, *, unchecked: bool = False,
                   schedule: dict | None = None) -> FamilyConfigL2:
    """Build the L2 family with ``pi_0 = phi_m`` (``phi`` when ``m = 0``)."""
    perturbations = tuple(l2_perturbation(2 * j + 1) for j in range(m))
    return FamilyConfigL2(m=m, epsilon=epsilon, base_variance=float(max(m, 1)),
                          perturbations=perturbations, checked=not unchecked,
                          schedule=dict(schedule or {}))


def _schedule_holds(n: int, m: int) -> bool:
    # 3^(-2m) m^(-2) >= sqrt(m)/n  <=>  n^2 >= 3^(4m) m^5, exact in integers
    return n * n >= 3 ** (4 * m) * m ** 5


def l2_schedule_m(n: int) -> int:
    """Largest ``m`` in ``1..MAX_M`` with ``3^(-2m) m^(-2) >= sqrt(m)/n``, or 0."""
    m = 0
    for cand in range(1, MAX_M + 1):
        if not _schedule_holds(n, cand):
            break
        m = cand
    return m


def l2_schedule(n: int, c1: float = DEFAULT_C1) -> FamilyConfigL2:
    """Scheduled family for sample size ``n``.

    ``eps^2`` is the smaller of the positivity branch
    ``3^(1-2m) m^(-3) / 256`` and the testing branch
    ``c1 / (2 (2 pi C* + 64/3) n sqrt(m))``; both are recorded in
    ``config.schedule``.
    """
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie in (0, 1)")
    n = int(n)
    m = l2_schedule_m(n)
    m_eff = max(m, 1)
    eps2_pos = 3.0 ** (1 - 2 * m_eff) / m_eff ** 3 / 256.0
    eps2_test = c1 / (2.0 * CHI2_PROOF_FACTOR * n * math.sqrt(m_eff))
    eps2 = min(eps2_pos, eps2_test)
    schedule = {
        "n": n,
        "c1": c1,
        "eps2_positivity": eps2_pos,
        "eps2_testing": eps2_test,
        "binding": "positivity" if eps2_pos <= eps2_test else "testing",
        "M": math.sqrt(M_SQUARED),
        "C_star": C_STAR,
        "degenerate": m == 0,
    }
    return make_l2_family(m, math.sqrt(eps2), schedule=schedule)


# -- certificates ----------------------------------------------------------


def l2_separation_check(config: MixtureFamily, alpha, beta,
                        spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``||f_alpha - f_beta||_2^2`` by quadrature (expected ``2 pi eps^2 hamming``)."""
    return integrate_real(lambda x: config.f_diff(alpha, beta, x) ** 2, spec)


@dataclass
class Chi2Report:
    values: list[float]
    threshold: float
    proof_bound: float
    violations: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_value(self) -> float:
        return max(self.values, default=0.0)

    def to_dict(self) -> dict:
        return {
            "values": self.values,
            "threshold": self.threshold,
            "proof_bound": self.proof_bound,
            "violations": self.violations,
            "passed": self.passed,
        }


def chi2_value(config: MixtureFamily, alpha, beta, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``integral (f_alpha - f_beta)^2 / f_alpha``."""
    return integrate_real(
        lambda x: config.f_diff(alpha, beta, x) ** 2 / config.f(alpha, x), spec)


def chi2_adjacent_check(config: FamilyConfigL2, n: int, c1: float | None = None,
                        spec: QuadratureSpec = DEFAULT_SPEC) -> Chi2Report:
    """Quadrature chi-square for one adjacent pair per coordinate, against ``c1 / n``."""
    if c1 is None:
        c1 = config.schedule.get("c1", DEFAULT_C1)
    values = [chi2_value(config, a, b, spec) for a, b in adjacent_pairs(config.m)]
    threshold = c1 / n
    proof_bound = math.sqrt(config.m) * config.epsilon ** 2 * CHI2_PROOF_FACTOR
    violations = [i for i, v in enumerate(values) if v > threshold]
    return Chi2Report(values, threshold, proof_bound, violations)


@dataclass
class PositivityReport:
    min_margin: float
    min_relative_margin: float
    worst_alpha: list[int]
    worst_u: float
    vertices_checked: int
    grid_points: int

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0.0 and self.min_relative_margin >= 0.0

    def to_dict(self) -> dict:
        return {
            "min_margin": self.min_margin,
            "min_relative_margin": self.min_relative_margin,
            "worst_alpha": self.worst_alpha,
            "worst_u": self.worst_u,
            "vertices_checked": self.vertices_checked,
            "grid_points": self.grid_points,
            "passed": self.passed,
        }


def positivity_grid(config: MixtureFamily, points: int = 4001) -> np.ndarray:
    half = 8.0 * math.sqrt(config.base_variance)
    return np.linspace(-half, half, points)


def positivity_check(config: MixtureFamily, grid=None, seed: int = 0) -> PositivityReport:
    """Minimum of ``pi_alpha - pi_0 / 2`` over the vertex set and the grid.

    The relative margin divides by ``pi_0``, so tail points count as much as
    the centre.
    """
    u = positivity_grid(config) if grid is None else np.asarray(grid, dtype=float)
    verts = vertex_set(config.m, seed)
    base = config.mixing_base.pdf(u)
    pert = config.perturbation_values(u) if config.m else np.zeros((0, u.size))
    excess = config.epsilon * verts @ pert
    margins = base[None, :] / 2.0 + excess
    relative = 0.5 + excess / base[None, :]
    i, j = np.unravel_index(np.argmin(relative), relative.shape)
    return PositivityReport(float(margins.min()), float(relative[i, j]), verts[i].tolist(),
                            float(u[j]), len(verts), u.size)


def envelope_chain_margins(config: FamilyConfigL2, grid) -> dict:
    """Margins of ``|v_k| <= C_k phi(u/sqrt(3)) <= C_k sqrt(m) pi_0`` on a grid.

    The second link is reported as the relative margin
    ``sqrt(m) pi_0 / phi(u/sqrt(3)) - 1 = expm1(u^2 (1/3 - 1/m) / 2)``, which
    is exactly zero everywhere at ``m = 3``.  It requires ``m >= 3``; for
    smaller ``m`` it is reported as ``None``.
    """
    u = np.asarray(grid, dtype=float)
    first = []
    for p in config.perturbations:
        mid = envelope_coefficient(p.order) * phi(u / math.sqrt(3.0))
        first.append(float(np.min(mid - np.abs(p(u)))))
    second = None
    if config.m >= 3:
        rel = float(np.min(np.expm1(0.5 * u * u * (1.0 / 3.0 - 1.0 / config.m))))
        second = [rel] * config.m
    return {"bound1": first, "bound2": second, "kappa_C": KAPPA * C_L2}


# -- Fourier side -------------------------------------------------------------


def psi_closed(k: int, t):
    """``psi_k(t) = i^(-k) sqrt(2 phi(2t)) H_k(2t) / sqrt(k!)``."""
    t = np.asarray(t, dtype=float)
    return (1j) ** (-k) * np.sqrt(2.0 * phi(2.0 * t)) * hermite_normalized(k, 2.0 * t)


def psi_numeric(k: int, t, spec: QuadratureSpec = DEFAULT_SPEC):
    """``phi(t) * F v_k(t)`` with the transform computed by quadrature."""
    return phi(t) * fourier_numeric(l2_perturbation(k), t, spec)


def psi_gram(orders, t_spec: QuadratureSpec | None = None,
             u_spec: QuadratureSpec = DEFAULT_SPEC, psi=psi_numeric) -> np.ndarray:
    """Gram matrix ``integral psi_j conj(psi_k) dt`` over the given orders."""
    if t_spec is None:
        t_spec = QuadratureSpec(L=12.0, panels=48, nodes_per_panel=16)
    t, w = t_spec.nodes()
    values = np.array([psi(k, t, u_spec) for k in orders])
    return (values * w) @ values.conj().T
