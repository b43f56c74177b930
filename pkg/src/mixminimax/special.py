"""Hermite polynomials, Gaussian densities and the Cramér envelope.

Hermite polynomials here are the probabilists' ones, ``H_k``, defined by
``d^k/dt^k phi(t) = (-1)^k H_k(t) phi(t)``.  Everything is evaluated through
the normalized sequence ``H_k(t) / sqrt(k!)`` so that no factorial is formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Cramér's constant: |H_k(t)| <= KAPPA * sqrt(k!) * exp(t^2 / 4).
KAPPA = 1.086435

#: Largest Hermite order accepted by the evaluators.
MAX_ORDER = 200

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_order(k) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ValueError(f"Hermite order must be a nonnegative integer, got {k!r}")
    k = int(k)
    if k > MAX_ORDER:
        raise ValueError(f"Hermite order {k} exceeds the guard MAX_ORDER={MAX_ORDER}")
    return k


def _check_points(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("non-finite evaluation point")
    return t


def _scalar_or_array(values: np.ndarray, like):
    return float(values) if np.ndim(like) == 0 else values


def hermite_normalized_table(kmax: int, t) -> np.ndarray:
    """All normalized Hermite values ``H_j(t)/sqrt(j!)`` for ``j = 0..kmax``.

    Returns an array of shape ``(kmax + 1,) + np.shape(t)``.
    """
    kmax = _check_order(kmax)
    t = _check_points(t)
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = t
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, kmax):
            out[j + 1] = (t * out[j] - math.sqrt(j) * out[j - 1]) / math.sqrt(j + 1)
    return out


def hermite_normalized(k: int, t):
    """Normalized probabilists' Hermite polynomial ``H_k(t) / sqrt(k!)``.

    Uses the recurrence
    ``h_{j+1} = (t h_j - sqrt(j) h_{j-1}) / sqrt(j + 1)`` with ``h_0 = 1``,
    ``h_1 = t``.

    Parameters
    ----------
    k : int
        Order, ``0 <= k <= MAX_ORDER``.
    t : float or array_like
        Evaluation point(s); must be finite.

    Returns
    -------
    float or ndarray
    """
    k = _check_order(k)
    t_arr = _check_points(t)
    prev = np.ones_like(t_arr)
    if k == 0:
        return _scalar_or_array(prev, t)
    cur = t_arr.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, k):
            prev, cur = cur, (t_arr * cur - math.sqrt(j) * prev) / math.sqrt(j + 1)
    return _scalar_or_array(cur, t)


def sqrt_factorial(k: int) -> float:
    """``sqrt(k!)`` without forming ``k!``."""
    k = _check_order(k)
    return math.exp(0.5 * math.lgamma(k + 1))


def hermite(k: int, t):
    """Unnormalized probabilists' Hermite polynomial ``H_k(t)``."""
    return sqrt_factorial(k) * hermite_normalized(k, t)


def cramer_margin(k: int, t):
    """``KAPPA * exp(t^2/4) - |H_k(t)/sqrt(k!)|``; nonnegative by Cramér's inequality."""
    h = hermite_normalized(k, t)
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        margin = KAPPA * np.exp(t_arr * t_arr / 4.0) - np.abs(h)
    return _scalar_or_array(margin, t)


def phi(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / SQRT_2PI


def normal_pdf(x, variance: float, mean: float = 0.0):
    """Normal density with the given mean and variance (``phi_{sigma^2}``)."""
    x = np.asarray(x, dtype=float) - mean
    return np.exp(-0.5 * x * x / variance) / math.sqrt(2.0 * math.pi * variance)


@dataclass(frozen=True)
class GaussianDensity:
    """Normal density on the data axis."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("mean and variance must be finite")
        if self.variance <= 0:
            raise ValueError(f"variance must be positive, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def pdf(self, x):
        return normal_pdf(x, self.variance, self.mean)

    __call__ = pdf

    def logpdf(self, x):
        x = np.asarray(x, dtype=float) - self.mean
        return -0.5 * x * x / self.variance - 0.5 * math.log(2.0 * math.pi * self.variance)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.mean + self.std * rng.standard_normal(size)


def gaussian_eval(g: GaussianDensity, x):
    """Evaluate ``g`` at ``x``; scalar in, scalar out."""
    values = g.pdf(x)
    return _scalar_or_array(values, x)
