"""Closed-form Fourier inversion of Gaussian-weighted Hermite polynomials.

For ``b > a > 0``::

    F^{-1}[phi(a t) H_k(b t)](u) = Q_k phi(u / a) H_k(b' u)

with ``c = sqrt(b^2/a^2 - 1)``, ``Q_k = (i c)^k / a`` and ``b' = b / (a^2 c)``.
Applied twice, this gives a closed form for a Gaussian smoothing of any
``A phi(s u) H_k(g u)`` whose scales satisfy the strict inequalities checked
in :func:`gaussian_smoothing`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import hermite_normalized, phi, sqrt_factorial


@dataclass(frozen=True)
class HermiteInverse:
    """``u -> coefficient * phi(u / gauss_scale) * H_k(hermite_scale * u)``."""

    order: int
    coefficient: complex
    gauss_scale: float
    hermite_scale: float
    c: float

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        # coefficient * sqrt(k!) multiplies the normalized polynomial
        weight = self.coefficient * sqrt_factorial(self.order)
        g = phi(u / self.gauss_scale)
        with np.errstate(over="ignore", invalid="ignore"):
            out = weight * g * hermite_normalized(self.order, self.hermite_scale * u)
        return np.where(g == 0.0, 0.0, out)


def lemma22_inverse(a: float, b: float, k: int) -> HermiteInverse:
    """Closed-form inverse Fourier transform of ``phi(a t) H_k(b t)``.

    Raises
    ------
    ValueError
        Unless ``b > a > 0``.
    """
    if not (a > 0 and b > a):
        raise ValueError(f"need b > a > 0, got a={a}, b={b}")
    c = math.sqrt(b * b / (a * a) - 1.0)
    q = (1j * c) ** k / a
    return HermiteInverse(order=k, coefficient=q, gauss_scale=a, hermite_scale=b / (a * a * c), c=c)


@dataclass(frozen=True)
class SmoothedHermite:
    """Real function ``weight * phi(x / gauss_scale) * H_k(hermite_scale x) / sqrt(k!)``."""

    order: int
    weight: float
    gauss_scale: float
    hermite_scale: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        g = phi(x / self.gauss_scale)
        h = hermite_normalized(self.order, self.hermite_scale * x)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.weight * g * h
        return np.where(g == 0.0, 0.0, out)


def gaussian_smoothing(variance: float, amplitude: float, gauss_scale: float,
                       hermite_scale: float, k: int) -> SmoothedHermite:
    """Closed form of ``phi_variance * [amplitude phi(s u) H_k(g u)]``.

    The Fourier transform of the Hermite factor follows from
    :func:`lemma22_inverse` (``F g(t) = F^{-1} g(-t)``); multiplying by the
    transform of ``phi_variance`` merges the two Gaussians, and a second
    application of the inversion lemma returns to the data axis.

    Raises
    ------
    ValueError
        When either inversion step would leave the real-scale regime.
    """
    s, g = gauss_scale, hermite_scale
    step1 = lemma22_inverse(s, g, k)
    merged = math.sqrt(variance + 1.0 / (s * s))
    step2 = lemma22_inverse(merged, step1.hermite_scale, k)
    coef = amplitude * (-1) ** k * step1.coefficient * step2.coefficient
    if abs(coef.imag) > 1e-12 * max(1.0, abs(coef.real)):
        raise ValueError("smoothing coefficient is not real")
    weight = coef.real * sqrt_factorial(k)
    return SmoothedHermite(order=k, weight=weight, gauss_scale=step2.gauss_scale,
                           hermite_scale=step2.hermite_scale)
