"""Hypercube-indexed normal location mixtures.

A family is indexed by bit vectors ``alpha`` in ``{0,1}^m``: the mixing
density is ``pi_alpha = pi_0 + eps * sum_k alpha_k v_k`` with ``pi_0`` a
centred normal, and the observed density is ``f_alpha = phi * pi_alpha``.
The perturbations ``v_k`` are Gaussian-weighted Hermite polynomials of odd
order, so each integrates to zero.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .hermite_fourier import SmoothedHermite, gaussian_smoothing
from .integrate import DEFAULT_SPEC, QuadratureSpec, convolve_numeric
from .special import GaussianDensity, hermite_normalized, phi, sqrt_factorial

#: Vertex sets are enumerated exhaustively up to this dimension.
EXHAUSTIVE_MAX_M = 6
RANDOM_VERTICES = 64

# Proposals allowed per accepted mixing draw before the envelope is declared broken.
MAX_PROPOSALS_PER_DRAW = 10**6


@dataclass(frozen=True)
class PerturbationSpec:
    """``v(u) = amplitude * phi(gaussian_scale * u) * H_k(hermite_scale * u)``.

    ``amplitude`` carries the ``1/sqrt(k!)`` of the Hermite normalization.
    """

    order: int
    amplitude: float
    gaussian_scale: float = 1.0
    hermite_scale: float = 1.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1 or self.order % 2 == 0:
            raise ValueError(f"perturbation order must be odd and positive, got {self.order}")
        if not (self.gaussian_scale > 0 and self.hermite_scale > 0):
            raise ValueError("scales must be positive")
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")

    @property
    def weight(self) -> float:
        """``amplitude * sqrt(k!)``, the factor in front of the normalized polynomial."""
        return self.amplitude * sqrt_factorial(self.order)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        g = phi(self.gaussian_scale * u)
        h = hermite_normalized(self.order, self.hermite_scale * u)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.weight * g * h
        return np.where(g == 0.0, 0.0, out)

    def smoothed(self, variance: float = 1.0) -> SmoothedHermite:
        """Closed form of ``phi_variance * v``."""
        return gaussian_smoothing(variance, self.amplitude, self.gaussian_scale,
                                  self.hermite_scale, self.order)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "amplitude": self.amplitude,
            "gaussian_scale": self.gaussian_scale,
            "hermite_scale": self.hermite_scale,
        }


def v_k_eval(spec: PerturbationSpec, u):
    """Evaluate a perturbation; scalar in, scalar out."""
    out = spec(u)
    return float(out) if np.ndim(u) == 0 else out


def as_bits(alpha, m: int) -> np.ndarray:
    bits = np.asarray(alpha, dtype=int).reshape(-1)
    if bits.size != m:
        raise ValueError(f"bit vector has length {bits.size}, expected {m}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    return bits


def hamming(alpha, beta) -> int:
    a = np.asarray(alpha, dtype=int)
    b = np.asarray(beta, dtype=int)
    return int(np.sum(a != b))


def vertex_set(m: int, seed: int = 0) -> np.ndarray:
    """Hypercube vertices to check: all ``2^m`` for small ``m``, else a seeded sample.

    The sample holds ``RANDOM_VERTICES`` random vertices plus the all-zeros
    and all-ones vertices.
    """
    if m <= EXHAUSTIVE_MAX_M:
        return np.array(list(itertools.product((0, 1), repeat=m)), dtype=int).reshape(2**m, m)
    rng = np.random.default_rng(seed)
    sample = rng.integers(0, 2, size=(RANDOM_VERTICES, m))
    return np.vstack([np.zeros((1, m), dtype=int), sample, np.ones((1, m), dtype=int)])


def random_vertex_pairs(m: int, count: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    return [(rng.integers(0, 2, m), rng.integers(0, 2, m)) for _ in range(count)]


def adjacent_pairs(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """One pair per coordinate: all-ones against all-ones with bit ``k`` cleared."""
    pairs = []
    for k in range(m):
        alpha = np.ones(m, dtype=int)
        beta = alpha.copy()
        beta[k] = 0
        pairs.append((alpha, beta))
    return pairs


@dataclass(frozen=True)
class MixtureFamily:
    """Common evaluation machinery for both adversarial families."""

    m: int
    epsilon: float
    base_variance: float
    perturbations: tuple[PerturbationSpec, ...]
    checked: bool = True
    schedule: dict = field(default_factory=dict, compare=False)

    regime = "abstract"

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if len(self.perturbations) != self.m:
            raise ValueError("need one perturbation per coordinate")
        orders = [p.order for p in self.perturbations]
        if len(set(orders)) != len(orders):
            raise ValueError("perturbation orders must be distinct")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.base_variance > 0:
            raise ValueError("base_variance must be positive")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(p.order for p in self.perturbations)

    @property
    def degenerate(self) -> bool:
        return self.m == 0

    @property
    def mixing_base(self) -> GaussianDensity:
        """``pi_0``."""
        return GaussianDensity(0.0, self.base_variance)

    @property
    def null_density(self) -> GaussianDensity:
        """``f_0 = phi * pi_0``."""
        return GaussianDensity(0.0, 1.0 + self.base_variance)

    def bits(self, alpha) -> np.ndarray:
        return as_bits(alpha, self.m)

    # -- mixing densities -------------------------------------------------

    def perturbation_values(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.empty((self.m,) + u.shape)
        for i, p in enumerate(self.perturbations):
            out[i] = p(u)
        return out

    def pi(self, alpha, u):
        """Mixing density ``pi_alpha(u)``."""
        bits = self.bits(alpha)
        base = self.mixing_base.pdf(u)
        if not bits.any():
            return base
        return base + self.epsilon * np.tensordot(bits, self.perturbation_values(u), axes=1)

    # -- observed densities -----------------------------------------------

    @cached_property
    def smoothers(self) -> tuple[SmoothedHermite, ...]:
        return tuple(p.smoothed(1.0) for p in self.perturbations)

    def smoothed_values(self, x, method: str = "closed",
                        spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
        """``(phi * v_k)(x)`` for every coordinate, shape ``(m,) + x.shape``.

        ``method="closed"`` uses the Fourier-Hermite closed form,
        ``method="quadrature"`` integrates numerically.
        """
        x = np.asarray(x, dtype=float)
        out = np.empty((self.m,) + x.shape)
        for i in range(self.m):
            if method == "closed":
                out[i] = self.smoothers[i](x)
            elif method == "quadrature":
                out[i] = convolve_numeric(phi, self.perturbations[i], x, spec)
            else:
                raise ValueError(f"unknown method {method!r}")
        return out

    def f(self, alpha, x, method: str = "closed", spec: QuadratureSpec = DEFAULT_SPEC):
        """Observed density ``f_alpha(x)``."""
        bits = self.bits(alpha)
        base = self.null_density.pdf(x)
        if not bits.any():
            return base
        sv = self.smoothed_values(x, method, spec)
        return base + self.epsilon * np.tensordot(bits, sv, axes=1)

    def f_diff(self, alpha, beta, x, method: str = "closed",
               spec: QuadratureSpec = DEFAULT_SPEC):
        """``f_alpha(x) - f_beta(x)`` without cancellation."""
        delta = self.bits(alpha) - self.bits(beta)
        x = np.asarray(x, dtype=float)
        if not delta.any():
            return np.zeros(x.shape)
        active = np.flatnonzero(delta)
        sv = self.smoothed_values(x, method, spec)
        return self.epsilon * np.tensordot(delta[active], sv[active], axes=1)

    def log_ratio(self, alpha, beta, x):
        """``log f_beta(x) - log f_alpha(x)``, accurate for nearby vertices."""
        fa = self.f(alpha, x)
        return np.log1p(self.f_diff(beta, alpha, x) / fa)

    # -- sampling ----------------------------------------------------------

    def envelope_constant(self, alpha) -> float:
        """``c`` with ``pi_alpha <= c * pi_0``; the rejection-sampling envelope."""
        raise NotImplementedError

    def sample_mixing(self, alpha, rng: np.random.Generator, size: int):
        """Draw from ``pi_alpha`` by rejection against ``c * pi_0``.

        Returns ``(draws, acceptance_rate)``.
        """
        bits = self.bits(alpha)
        base = self.mixing_base
        if not bits.any():
            return base.sample(rng, size), 1.0
        c = self.envelope_constant(bits)
        out = np.empty(size)
        filled = proposed = accepted = 0
        since_accept = 0
        while filled < size:
            batch = max(64, int(1.25 * c * (size - filled)) + 16)
            u = base.sample(rng, batch)
            target = self.pi(bits, u)
            envelope = c * base.pdf(u)
            if np.any(target > envelope * (1 + 1e-12)):
                raise RuntimeError("rejection envelope violated: pi_alpha > c * pi_0")
            keep = u[rng.random(batch) * envelope < target]
            proposed += batch
            accepted += keep.size
            if keep.size == 0:
                since_accept += batch
                if since_accept > MAX_PROPOSALS_PER_DRAW:
                    raise RuntimeError("rejection sampler stalled; envelope is broken")
                continue
            since_accept = 0
            take = min(keep.size, size - filled)
            out[filled:filled + take] = keep[:take]
            filled += take
        return out, accepted / proposed

    def sample(self, alpha, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw from ``f_alpha``: mixing location plus standard normal noise."""
        u, _ = self.sample_mixing(alpha, rng, size)
        return u + rng.standard_normal(size)

    # -- export ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "m": self.m,
            "epsilon": self.epsilon,
            "base_variance": self.base_variance,
            "checked": self.checked,
            "orders": list(self.orders),
            "perturbations": [p.to_dict() for p in self.perturbations],
            "schedule": dict(self.schedule),
        }
