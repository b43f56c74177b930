"""Distances between densities and the product-measure testing affinity.

Quadrature-based: squared L2, squared Hellinger, chi-square, total variation.
Monte Carlo: the affinity ``||P^n ^ Q^n||_1 = 1 - TV(P^n, Q^n)`` estimated
from likelihood ratios accumulated in log space.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .integrate import DEFAULT_SPEC, QuadratureSpec, integrate_real

#: Replications per independent random stream in :func:`affinity_mc`.
AFFINITY_BLOCK = 500
DEFAULT_AFFINITY_REPS = 20_000
MAX_DRAWS = 10**9

# Densities below this are treated as underflowed in chi-square denominators.
DENSITY_FLOOR = 1e-300


def _difference(f, g, diff, x):
    return diff(x) if diff is not None else f(x) - g(x)


def l2_sq(f, g, spec: QuadratureSpec = DEFAULT_SPEC, *, diff=None) -> float:
    """``integral (f - g)^2``; ``diff`` may supply ``f - g`` directly."""
    return integrate_real(lambda x: _difference(f, g, diff, x) ** 2, spec)


def hellinger_sq(f, g, spec: QuadratureSpec = DEFAULT_SPEC, *, diff=None) -> float:
    """``integral (sqrt f - sqrt g)^2``, computed as ``(f - g)^2 / (sqrt f + sqrt g)^2``.

    Raises
    ------
    ValueError
        If either density is negative on the node set.
    """
    def integrand(x):
        fx, gx = f(x), g(x)
        if np.any(fx < 0) or np.any(gx < 0):
            raise ValueError("negative density value; the family configuration is broken")
        d = _difference(f, g, diff, x)
        s = (np.sqrt(fx) + np.sqrt(gx)) ** 2
        return np.divide(d * d, s, out=np.zeros_like(s), where=s > 0)
    return integrate_real(integrand, spec)


def chi_sq(f, g, spec: QuadratureSpec = DEFAULT_SPEC, *, diff=None) -> float:
    """``integral (f - g)^2 / f``.

    Nodes where ``f`` has underflowed are skipped; there both densities sit
    far out in a Gaussian tail and the contribution is below double
    precision.
    """
    def integrand(x):
        fx = f(x)
        d = _difference(f, g, diff, x)
        return np.divide(d * d, fx, out=np.zeros_like(fx), where=fx > DENSITY_FLOOR)
    return integrate_real(integrand, spec)


def tv_quadrature(f, g, spec: QuadratureSpec = DEFAULT_SPEC, *, diff=None) -> float:
    """``(1/2) integral |f - g|``.

    The integrand has kinks where ``f = g``; with the default panels the
    error from an interior kink is of order 1e-5.
    """
    return 0.5 * integrate_real(lambda x: np.abs(_difference(f, g, diff, x)), spec)


@dataclass
class DivergenceReport:
    l2_sq: float
    hellinger_sq: float
    chi_sq: float
    tv: float | None = None
    affinity: float | None = None
    mc_stderr: float | None = None
    seed: int | None = None
    spec: QuadratureSpec = DEFAULT_SPEC

    def check(self, tol: float = 1e-12) -> list[str]:
        """Names of violated range invariants (empty when consistent)."""
        bad = []
        for name in ("l2_sq", "hellinger_sq", "chi_sq"):
            if getattr(self, name) < -tol:
                bad.append(name)
        if self.hellinger_sq > 2 + tol:
            bad.append("hellinger_sq<=2")
        # H^2 <= chi^2 for densities: (sqrt f - sqrt g)^2 <= (f - g)^2 / f
        if self.hellinger_sq > self.chi_sq + tol:
            bad.append("hellinger_sq<=chi_sq")
        if self.tv is not None and not -tol <= self.tv <= 1 + tol:
            bad.append("tv")
        if self.affinity is not None and not -tol <= self.affinity <= 1 + tol:
            bad.append("affinity")
        return bad

    def to_dict(self) -> dict:
        out = asdict(self)
        out["spec"] = self.spec.to_dict()
        return out


def divergence_report(f, g, spec: QuadratureSpec = DEFAULT_SPEC, *, diff=None) -> DivergenceReport:
    tv = tv_quadrature(f, g, spec, diff=diff)
    return DivergenceReport(
        l2_sq=l2_sq(f, g, spec, diff=diff),
        hellinger_sq=hellinger_sq(f, g, spec, diff=diff),
        chi_sq=chi_sq(f, g, spec, diff=diff),
        tv=tv,
        affinity=1.0 - tv,
        spec=spec,
    )


@dataclass(frozen=True)
class AffinityEstimate:
    """Monte Carlo testing affinity with both sampling directions kept."""

    estimate: float
    stderr: float
    forward: float
    forward_stderr: float
    backward: float
    backward_stderr: float
    n: int
    reps: int
    seed: int

    @property
    def consistent(self) -> bool:
        """The two directions agree within three joint standard errors."""
        joint = math.hypot(self.forward_stderr, self.backward_stderr)
        return abs(self.forward - self.backward) <= 3.0 * joint + 1e-15

    def to_dict(self) -> dict:
        out = asdict(self)
        out["consistent"] = self.consistent
        return out


def _tv_block(sampler, log_ratio, n, size, rng):
    x = sampler(rng, size * n).reshape(size, n)
    s = np.sum(log_ratio(x), axis=1)
    # (1 - prod g/f)_+ ; expm1 keeps precision when the product is near 1
    return np.maximum(-np.expm1(s), 0.0)


def affinity_mc(f, g, sample_f, sample_g, n: int, reps: int = DEFAULT_AFFINITY_REPS,
                seed: int = 0, *, log_ratio=None, workers: int = 1,
                max_draws: int = MAX_DRAWS) -> AffinityEstimate:
    """Estimate ``||P_f^n ^ P_g^n||_1``.

    For ``X`` drawn from ``P_f^n``, ``E[(1 - prod g(X_i)/f(X_i))_+]`` is the
    total variation distance; the same is done from ``P_g^n`` with the
    ratio inverted and the two estimates are averaged.

    Parameters
    ----------
    f, g : callable
        Densities (used only when ``log_ratio`` is not given).
    sample_f, sample_g : callable
        ``sampler(rng, size) -> ndarray`` of i.i.d. draws.
    n : int
        Power of the product measure.
    reps : int
        Replications per direction.
    seed : int
        Root seed; every block of ``AFFINITY_BLOCK`` replications gets its own
        spawned stream, so results do not depend on ``workers``.
    log_ratio : callable, optional
        ``x -> log g(x) - log f(x)``, preferably computed without
        cancellation.
    """
    if n < 1 or reps < 2:
        raise ValueError("need n >= 1 and reps >= 2")
    if 2 * n * reps > max_draws:
        raise ValueError(f"n * reps = {n * reps} exceeds the draw budget {max_draws}")
    if log_ratio is None:
        def log_ratio(x):
            return np.log(g(x)) - np.log(f(x))

    def neg_log_ratio(x):
        return -log_ratio(x)

    sizes = [min(AFFINITY_BLOCK, reps - lo) for lo in range(0, reps, AFFINITY_BLOCK)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(i):
        fwd_ss, bwd_ss = streams[i].spawn(2)
        fwd = _tv_block(sample_f, log_ratio, n, sizes[i], np.random.default_rng(fwd_ss))
        bwd = _tv_block(sample_g, neg_log_ratio, n, sizes[i], np.random.default_rng(bwd_ss))
        return fwd, bwd

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(len(sizes))))
    else:
        results = [run(i) for i in range(len(sizes))]
    fwd = np.concatenate([r[0] for r in results])
    bwd = np.concatenate([r[1] for r in results])

    tv_f, tv_b = float(np.mean(fwd)), float(np.mean(bwd))
    se_f = float(np.std(fwd, ddof=1) / math.sqrt(reps))
    se_b = float(np.std(bwd, ddof=1) / math.sqrt(reps))
    return AffinityEstimate(
        estimate=1.0 - 0.5 * (tv_f + tv_b),
        stderr=0.5 * math.hypot(se_f, se_b),
        forward=1.0 - tv_f,
        forward_stderr=se_f,
        backward=1.0 - tv_b,
        backward_stderr=se_b,
        n=n,
        reps=reps,
        seed=seed,
    )
