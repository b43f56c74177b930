"""Sinc-kernel density estimation and its Monte Carlo risk.

The estimator is ``f_n(x) = (1/(n h)) sum_j K((X_j - x)/h)`` with
``K(u) = sin(u) / (pi u)`` and ``h = 1/sqrt(log n)``.  Since ``F K`` is the
indicator of ``[-1, 1]`` (up to ``(2 pi)^(-1/2)``), the estimate is also the
inverse transform of the empirical characteristic function cut at ``1/h``,
which gives a fast evaluation path.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .integrate import QuadratureSpec, panel_nodes
from .mixture import MixtureFamily
from .special import SQRT_2PI, GaussianDensity

#: ``integral K(u)^2 du``.
KERNEL_L2_SQ = 1.0 / math.pi
MIN_REPS = 10
DEFAULT_REPS = 50
MISE_NODES_PER_PANEL = 16
MISE_PANELS = 250  # 4000 nodes

# Max entries of any sample-by-point matrix built in one go.
_CHUNK = 4_000_000


def sinc_kernel(u):
    """``sin(u) / (pi u)`` with ``K(0) = 1/pi``."""
    return np.sinc(np.asarray(u, dtype=float) / math.pi) / math.pi


def default_bandwidth(n: int) -> float:
    if n < 2:
        raise ValueError("need n >= 2 for h = 1/sqrt(log n)")
    return 1.0 / math.sqrt(math.log(n))


def ell_n(n: int) -> float:
    """``sqrt(log n) / n``."""
    return math.sqrt(math.log(n)) / n


def variance_bound(n: int, h: float) -> float:
    """``integral K^2 / (n h)``."""
    return KERNEL_L2_SQ / (n * h)


def bias_sq_bound(h: float) -> float:
    """``2 exp(-1/(2 h^2)) / sqrt(2 pi)``; equals ``(2/sqrt(2 pi)) n^(-1/2)`` at the default ``h``."""
    return 2.0 * math.exp(-0.5 / h**2) / SQRT_2PI


# -- sampling ----------------------------------------------------------------


@dataclass(frozen=True)
class MixtureTarget:
    """A family member ``f_alpha`` used as a sampling and risk target."""

    family: MixtureFamily
    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(b) for b in self.family.bits(self.alpha)))

    def pdf(self, x):
        return self.family.f(self.alpha, x)

    @property
    def std(self) -> float:
        return self.family.null_density.std

    def draw(self, rng: np.random.Generator, n: int):
        u, rate = self.family.sample_mixing(self.alpha, rng, n)
        return u + rng.standard_normal(n), rate

    def to_dict(self) -> dict:
        return {"kind": "mixture", "alpha": list(self.alpha), "family": self.family.to_dict()}


@dataclass(frozen=True)
class GaussianTarget:
    density: GaussianDensity = field(default_factory=GaussianDensity)

    def pdf(self, x):
        return self.density.pdf(x)

    @property
    def std(self) -> float:
        return self.density.std

    def draw(self, rng: np.random.Generator, n: int):
        return self.density.sample(rng, n), 1.0

    def characteristic(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * self.density.mean * t - 0.5 * self.density.variance * t * t)

    def to_dict(self) -> dict:
        return {"kind": "gaussian", "mean": self.density.mean, "variance": self.density.variance}


def as_target(source, alpha=None):
    """Wrap a family (with ``alpha``) or a Gaussian as a sampling target."""
    if isinstance(source, (MixtureTarget, GaussianTarget)):
        return source
    if isinstance(source, GaussianDensity):
        return GaussianTarget(source)
    if isinstance(source, MixtureFamily):
        if alpha is None:
            raise ValueError("a mixture family target needs a vertex alpha")
        return MixtureTarget(source, alpha)
    raise TypeError(f"cannot sample from {type(source).__name__}")


@dataclass(frozen=True)
class SampleSet:
    n: int
    values: np.ndarray
    seed: int | None
    source: dict
    acceptance_rate: float


def _draw(target, n: int, rng: np.random.Generator, seed) -> SampleSet:
    values, rate = target.draw(rng, n)
    values = np.asarray(values, dtype=float)
    values.setflags(write=False)
    return SampleSet(n, values, seed, target.to_dict(), float(rate))


def sample_mixture(source, n: int, seed: int, alpha=None) -> SampleSet:
    """``n`` i.i.d. draws: mixing location from ``pi_alpha`` plus standard normal noise."""
    if n < 1:
        raise ValueError("n must be positive")
    return _draw(as_target(source, alpha), n, np.random.default_rng(seed), seed)


# -- the estimator -----------------------------------------------------------


def _values(samples) -> np.ndarray:
    return np.asarray(samples.values if isinstance(samples, SampleSet) else samples, dtype=float)


def sinc_estimate(samples, x, h: float):
    """Direct evaluation of ``(1/(n h)) sum_j K((X_j - x)/h)``."""
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    data = _values(samples)
    xs = np.asarray(x, dtype=float)
    flat = xs.reshape(-1)
    out = np.empty(flat.size)
    step = max(1, _CHUNK // max(data.size, 1))
    for lo in range(0, flat.size, step):
        block = flat[lo:lo + step]
        out[lo:lo + step] = sinc_kernel((data[None, :] - block[:, None]) / h).sum(axis=1)
    out /= data.size * h
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


def _frequency_nodes(h: float, reach: float):
    # exp(-i t x) on [0, 1/h] turns through at most reach/h radians; ~8 per panel
    panels = max(4, math.ceil(reach / h / 8.0))
    t, w = panel_nodes(0.5 / h, panels, 16)
    return t + 0.5 / h, w


def empirical_characteristic(samples, t) -> np.ndarray:
    """``(1/n) sum_j exp(i t X_j)``."""
    data = _values(samples)
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    step = max(1, _CHUNK // max(t.size, 1))
    for lo in range(0, data.size, step):
        out += np.exp(1j * np.multiply.outer(data[lo:lo + step], t)).sum(axis=0)
    return out / data.size


def sinc_estimate_spectral(samples, x, h: float):
    """Same estimate via ``(1/pi) integral_0^{1/h} Re(exp(-i t x) ecf(t)) dt``."""
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    data = _values(samples)
    xs = np.asarray(x, dtype=float)
    reach = float(np.max(np.abs(data))) + float(np.max(np.abs(xs), initial=0.0))
    t, w = _frequency_nodes(h, reach)
    ecf = empirical_characteristic(data, t) * w
    flat = xs.reshape(-1)
    out = np.empty(flat.size)
    step = max(1, _CHUNK // t.size)
    for lo in range(0, flat.size, step):
        phase = np.exp(-1j * np.multiply.outer(flat[lo:lo + step], t))
        out[lo:lo + step] = (phase @ ecf).real / math.pi
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


# -- integrated squared error ------------------------------------------------


def mise_half_width(target) -> float:
    """``8 + 8 sd`` of the target density."""
    return 8.0 + 8.0 * target.std


def ise(samples, pdf, h: float, half_width: float,
        panels: int = MISE_PANELS) -> tuple[float, float]:
    """``integral (f_n - f)^2`` over ``[-L, L]`` and an estimate of the part outside.

    Outside ``[-L, L]`` the variance of ``f_n(x)`` is at most
    ``1 / (n pi^2 (|x| - max|X|)^2)``, which integrates to the returned
    ``2 / (n pi^2 (L - max|X|))``.
    """
    x, w = panel_nodes(half_width, panels, MISE_NODES_PER_PANEL)
    data = _values(samples)
    diff = sinc_estimate_spectral(data, x, h) - pdf(x)
    gap = half_width - float(np.max(np.abs(data)))
    tail = 2.0 / (data.size * math.pi**2 * gap) if gap > 0 else math.inf
    return float(np.dot(w, diff * diff)), tail


def ise_fourier(samples, characteristic, h: float, spec: QuadratureSpec | None = None) -> float:
    """Untruncated ISE by Plancherel, given the target's characteristic function.

    ``(1/(2 pi)) [ integral_{|t|<=1/h} |ecf - cf|^2 + integral_{|t|>1/h} |cf|^2 ]``.
    """
    data = _values(samples)
    t, w = _frequency_nodes(h, float(np.max(np.abs(data))))
    inside = 2.0 * np.dot(w, np.abs(empirical_characteristic(data, t) - characteristic(t)) ** 2)
    if spec is None:
        spec = QuadratureSpec(L=60.0, panels=240)
    s, ws = spec.nodes()
    far = s[s > 1.0 / h]
    outside = 2.0 * np.dot(ws[s > 1.0 / h], np.abs(characteristic(far)) ** 2)
    return float(inside + outside) / (2.0 * math.pi)


@dataclass(frozen=True)
class RiskReport:
    n: int
    h: float
    reps: int
    mise_mean: float
    mise_stderr: float
    variance_bound: float
    bias_sq_bound: float
    ell_n: float
    seed: int
    truncation: float
    half_width: float

    @property
    def ratio(self) -> float:
        return self.mise_mean / self.ell_n

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ratio"] = self.ratio
        return out


def replication_seeds(seed: int, reps: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(reps)


def mise_mc(target, n: int, reps: int = DEFAULT_REPS, seed: int = 0, *,
            h: float | None = None, workers: int = 1, alpha=None) -> RiskReport:
    """Monte Carlo mean integrated squared error of the sinc estimator.

    Each replication draws from its own spawned seed, so the result does not
    depend on ``workers``.
    """
    if reps < MIN_REPS:
        raise ValueError(f"need at least {MIN_REPS} replications")
    target = as_target(target, alpha)
    if h is None:
        h = default_bandwidth(n)
    half = mise_half_width(target)
    seeds = replication_seeds(seed, reps)

    def one(ss):
        s = _draw(target, n, np.random.default_rng(ss), None)
        return ise(s, target.pdf, h, half)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(ss) for ss in seeds]
    errs = np.array([r[0] for r in results])
    tails = np.array([r[1] for r in results])
    return RiskReport(
        n=n, h=h, reps=reps,
        mise_mean=float(errs.mean()),
        mise_stderr=float(errs.std(ddof=1) / math.sqrt(reps)),
        variance_bound=variance_bound(n, h),
        bias_sq_bound=bias_sq_bound(h),
        ell_n=ell_n(n),
        seed=seed,
        truncation=float(tails.mean()),
        half_width=half,
    )


# -- kernel transform and growth condition -----------------------------------


def kernel_fourier(t, spec: QuadratureSpec | None = None):
    """``F K(t)`` by quadrature on a long truncated interval (real part)."""
    if spec is None:
        spec = QuadratureSpec(L=400.0, panels=1600)
    x, w = spec.nodes()
    k = sinc_kernel(x) * w
    t = np.asarray(t, dtype=float)
    # K is even, so the transform is a cosine transform
    return np.cos(np.multiply.outer(t, x)) @ k / SQRT_2PI


def analytic_growth_check(family: MixtureFamily, alpha, y: float, x_grid,
                          spec: QuadratureSpec | None = None) -> float:
    """``min_x [exp(y^2/2)/sqrt(2 pi) - |f(x + i y)|]`` over ``x_grid``.

    ``f(z) = integral phi(z - u) pi_alpha(u) du`` is integrated over ``u`` by
    quadrature with real and imaginary parts kept separately.
    """
    if abs(y) > 6:
        raise ValueError("|y| must be at most 6")
    if spec is None:
        spec = QuadratureSpec(L=8.0 * math.sqrt(family.base_variance) + 12.0, panels=200)
    u, w = spec.nodes()
    weights = family.pi(alpha, u) * w
    xs = np.asarray(x_grid, dtype=float).reshape(-1)
    modulus = np.empty(xs.size)
    step = max(1, _CHUNK // u.size)
    for lo in range(0, xs.size, step):
        d = xs[lo:lo + step, None] - u[None, :]
        # phi(d + i y) = exp(-(d^2 - y^2)/2) (cos(d y) - i sin(d y)) / sqrt(2 pi)
        g = np.exp(-0.5 * (d * d - y * y)) / SQRT_2PI
        re = (g * np.cos(d * y)) @ weights
        im = -(g * np.sin(d * y)) @ weights
        modulus[lo:lo + step] = np.hypot(re, im)
    bound = math.exp(0.5 * y * y) / SQRT_2PI
    return float(np.min(bound - modulus))
