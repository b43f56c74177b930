"""Composite Gauss-Legendre quadrature over a truncated real line.

This is the reference oracle for every closed form in the package, so it is
deliberately plain: fixed panels, fixed order, no adaptivity.  Fourier
transforms use the unitary convention

    F f(t) = (2 pi)^(-1/2) * integral exp(-i x t) f(x) dx

evaluated on the same nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Max entries of any x-by-node matrix built in one go.
_CHUNK = 2_000_000


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration over ``[-L, L]`` split into equal panels."""

    L: float = 40.0
    panels: int = 160
    nodes_per_panel: int = 16
    abs_tol: float = 1e-10

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.panels < 1:
            raise ValueError("panels must be >= 1")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")

    def refined(self) -> "QuadratureSpec":
        return replace(self, panels=2 * self.panels)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and weights (read-only arrays)."""
        return panel_nodes(self.L, self.panels, self.nodes_per_panel)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "panels": self.panels,
            "nodes_per_panel": self.nodes_per_panel,
            "abs_tol": self.abs_tol,
        }


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=64)
def panel_nodes(L: float, panels: int, order: int):
    ref_x, ref_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-L, L, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    w = (half[:, None] * ref_w[None, :]).ravel()
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@dataclass(frozen=True)
class QuadInfo:
    """Diagnostics attached to a quadrature value."""

    value: float
    error_estimate: float
    converged: bool
    tail_bound: float | None
    spec: QuadratureSpec


def gaussian_tail_mass(L: float, variance: float, scale: float = 1.0) -> float:
    """Mass of ``scale * phi_variance`` outside ``[-L, L]``."""
    return 2.0 * scale * float(ndtr(-L / math.sqrt(variance)))


def _evaluate(f, x: np.ndarray) -> np.ndarray:
    values = np.asarray(f(x))
    if values.shape != x.shape:
        values = np.broadcast_to(values, x.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite evaluation on the quadrature node set")
    return values


def integrate_real(f, spec: QuadratureSpec = DEFAULT_SPEC, *, envelope=None, full_output=False):
    """Composite Gauss-Legendre approximation of ``integral_{-L}^{L} f``.

    Parameters
    ----------
    f : callable
        Vectorized function of a 1-D array.
    spec : QuadratureSpec
    envelope : (scale, variance), optional
        A Gaussian ``scale * phi_variance`` dominating ``|f|`` outside
        ``[-L, L]``; its tail mass is reported as ``tail_bound``.
    full_output : bool
        When true, also integrate with doubled panels and return
        ``(value, QuadInfo)``.
    """
    x, w = spec.nodes()
    value = float(np.dot(w, _evaluate(f, x)))
    if not full_output:
        return value
    fine = spec.refined()
    xf, wf = fine.nodes()
    err = abs(float(np.dot(wf, _evaluate(f, xf))) - value)
    tail = None
    if envelope is not None:
        tail = gaussian_tail_mass(spec.L, envelope[1], envelope[0])
    return value, QuadInfo(value, err, err <= spec.abs_tol, tail, spec)


def fourier_numeric(f, t, spec: QuadratureSpec = DEFAULT_SPEC, *, inverse: bool = False):
    """Unitary Fourier transform of ``f`` at ``t`` by quadrature.

    ``inverse=True`` flips the sign of the exponent (``F^{-1}``).  ``f`` may be
    real or complex valued; the result is complex with the shape of ``t``.
    """
    x, w = spec.nodes()
    fx = _evaluate(f, x).astype(complex) * w
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    sign = 1.0 if inverse else -1.0
    out = np.empty(t_arr.shape, dtype=complex)
    flat_t, flat_out = t_arr.ravel(), out.reshape(-1)
    step = max(1, _CHUNK // x.size)
    for lo in range(0, flat_t.size, step):
        tt = flat_t[lo:lo + step]
        phase = np.exp(sign * 1j * np.outer(tt, x))
        flat_out[lo:lo + step] = phase @ fx
    out *= _INV_SQRT_2PI
    return complex(out[0]) if np.ndim(t) == 0 else out


def convolve_numeric(f, g, x, spec: QuadratureSpec = DEFAULT_SPEC):
    """``(f * g)(x) = integral f(x - u) g(u) du`` over ``u`` in ``[-L, L]``.

    ``f`` must accept 2-D arrays; ``g`` is evaluated once on the nodes.
    """
    u, w = spec.nodes()
    gw = _evaluate(g, u) * w
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    flat_x = x_arr.ravel()
    out = np.empty(flat_x.shape)
    step = max(1, _CHUNK // u.size)
    for lo in range(0, flat_x.size, step):
        xx = flat_x[lo:lo + step]
        block = _evaluate(f, xx[:, None] - u[None, :])
        out[lo:lo + step] = block @ gw
    out = out.reshape(x_arr.shape)
    return float(out[0]) if np.ndim(x) == 0 else out
