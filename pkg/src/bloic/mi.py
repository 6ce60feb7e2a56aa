"""Mutual information of the scalar channel ``Y = X + Z``, ``Z ~ N(0, sigma2)``.

Two independent routes are provided:

* deterministic quadrature for discrete inputs (:func:`mi_discrete_gaussian`),
  which integrates ``-p log p`` of the Gaussian-mixture output density on a
  uniform grid (the trapezoid rule is spectrally accurate for these smooth,
  rapidly decaying integrands);
* Monte Carlo (:func:`mc_mi_estimate`), averaging the information density
  ``log p(y|x) - log p(y)`` over simulated pairs with the exact output
  density of each input family.

All values are in nats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, logsumexp

from . import distributions as dists
from ._optim import grid_golden_max

_PAD_SIGMAS = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class MiResult:
    mi: float
    method: Method
    err_estimate: float


@dataclass(frozen=True)
class DiscreteInput:
    mass_points: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.mass_points, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if x.shape != p.shape or x.ndim != 1 or x.size == 0:
            raise ValueError("mass_points and probs must be equal-length 1-d arrays")
        if np.any(p <= 0):
            raise ValueError("probabilities must be positive")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to one")
        if np.any(np.diff(x) <= 0):
            raise ValueError("mass points must be strictly increasing")
        object.__setattr__(self, "mass_points", x)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_geometric(cls, dist: dists.Geometric):
        x, p = dist.masses()
        keep = p > 0
        x, p = x[keep], p[keep]
        return cls(x, p / p.sum())

    def entropy(self) -> float:
        p = self.probs
        return float(-np.sum(p * np.log(p)))

    def lattice_step(self, rtol=1e-9):
        """Common spacing if the mass points form an arithmetic progression."""
        if self.mass_points.size < 2:
            return None
        d = np.diff(self.mass_points)
        if np.all(np.abs(d - d[0]) <= rtol * d[0]):
            return float(d[0])
        return None


def _gauss_entropy(sigma2):
    return 0.5 * math.log(2.0 * math.pi * math.e * sigma2)


def _lattice_output_density(inp: DiscreteInput, sigma, step, m):
    """Output density on a grid of pitch ``step/m`` aligned with the lattice."""
    h = step / m
    pad = int(math.ceil(_PAD_SIGMAS * sigma / h))
    n_pts = inp.mass_points.size
    comb = np.zeros((n_pts - 1) * m + 1)
    comb[::m] = inp.probs
    k = np.arange(-pad, pad + 1) * h
    kernel = np.exp(-0.5 * (k / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    return np.convolve(comb, kernel), h


def _scattered_output_density(inp: DiscreteInput, sigma, h):
    x, p = inp.mass_points, inp.probs
    lo = x[0] - _PAD_SIGMAS * sigma
    hi = x[-1] + _PAD_SIGMAS * sigma
    y = np.arange(lo, hi + h, h)
    out = np.empty_like(y)
    chunk = max(1, 2_000_000 // x.size)
    logp = np.log(p)
    for s in range(0, y.size, chunk):
        yy = y[s:s + chunk, None]
        out[s:s + chunk] = np.exp(logsumexp(logp - 0.5 * ((yy - x) / sigma) ** 2, axis=1))
    return out / (sigma * math.sqrt(2.0 * math.pi)), h


def _neg_plogp(p):
    p = np.clip(p, 1e-300, None)
    return -p * np.log(p)


def output_entropy_discrete(inp: DiscreteInput, sigma2: float):
    """``h(Y)`` for a discrete input, with a step-halving error estimate."""
    sigma = math.sqrt(sigma2)
    step = inp.lattice_step()
    if step is not None:
        m = 2 * max(1, math.ceil(8.0 * step / sigma))
        dens, h = _lattice_output_density(inp, sigma, step, m)
    else:
        dens, h = _scattered_output_density(inp, sigma, sigma / 32.0)
    fine = h * np.sum(_neg_plogp(dens))
    coarse = 2.0 * h * np.sum(_neg_plogp(dens[::2]))
    return float(fine), float(abs(fine - coarse))


def mi_discrete_gaussian(inp: DiscreteInput, sigma2: float) -> MiResult:
    """``I(X; X + Z)`` by quadrature of the output entropy."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if inp.mass_points.size == 1:
        return MiResult(0.0, Method.QUADRATURE, 0.0)
    hy, err = output_entropy_discrete(inp, sigma2)
    mi = hy - _gauss_entropy(sigma2)
    # clamp tiny negative round-off; the physical bounds are 0 <= I <= H(X)
    mi = min(max(mi, 0.0), inp.entropy())
    return MiResult(mi, Method.QUADRATURE, err)


def geometric_mi(spacing: float, E: float, sigma2: float) -> float:
    """Mutual information of the geometric input with the given spacing and mean."""
    inp = DiscreteInput.from_geometric(dists.Geometric(spacing, E))
    return mi_discrete_gaussian(inp, sigma2).mi


def optimize_geometric_l(E: float, sigma2: float, lo: float = 0.05, hi: float = 20.0,
                         n_grid: int = 64):
    """Best geometric spacing for mean ``E``; bracket given in units of sigma.

    Returns ``(l_star, mi_nats)``.
    """
    if E <= 0 or sigma2 <= 0:
        raise ValueError("E and sigma2 must be positive")
    sigma = math.sqrt(sigma2)
    return grid_golden_max(lambda l: geometric_mi(l, E, sigma2), lo * sigma, hi * sigma,
                           n_grid=n_grid, xtol=1e-6 * sigma, log_scale=True)


def epi_lower(h_x: float, sigma2: float) -> float:
    """Entropy-power lower bound ``0.5 log(1 + exp(2 h_x) / (2 pi e sigma2))`` on ``I``."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return 0.5 * math.log1p(math.exp(2.0 * h_x) / (2.0 * math.pi * math.e * sigma2))


# --- Monte Carlo --------------------------------------------------------------

def _log_ndtr_diff(a, b):
    """``log(Phi(a) - Phi(b))`` for ``a > b``, stable in both tails."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    flip = b > 0
    a2 = np.where(flip, -b, a)
    b2 = np.where(flip, -a, b)
    la = log_ndtr(a2)
    lb = log_ndtr(b2)
    return la + np.log1p(-np.exp(lb - la))


def output_logpdf(dist, y, sigma2: float):
    """Exact ``log p_Y(y)`` for ``Y = X + Z`` with ``X`` drawn from ``dist``."""
    y = np.asarray(y, dtype=float)
    s = math.sqrt(sigma2)
    if isinstance(dist, dists.Exponential):
        E = dist.mean
        return -math.log(E) + sigma2 / (2 * E * E) - y / E + log_ndtr(y / s - s / E)
    if isinstance(dist, dists.Uniform):
        width = dist.hi - dist.lo
        return _log_ndtr_diff((y - dist.lo) / s, (y - dist.hi) / s) - math.log(width)
    if isinstance(dist, dists.TruncExp):
        L, mu = dist.support, dist.mu
        lam = mu / L
        log_c = math.log(lam) - math.log(-math.expm1(-mu))
        m = y - lam * sigma2
        return log_c - lam * y + 0.5 * lam * lam * sigma2 + _log_ndtr_diff((L - m) / s, -m / s)
    if isinstance(dist, dists.Geometric):
        return _lattice_logpdf(dist, y, s)
    if isinstance(dist, DiscreteInput):
        x, logp = dist.mass_points, np.log(dist.probs)
        out = np.empty_like(y)
        chunk = max(1, 2_000_000 // x.size)
        for k in range(0, y.size, chunk):
            yy = y[k:k + chunk, None]
            out[k:k + chunk] = logsumexp(logp - 0.5 * ((yy - x) / s) ** 2, axis=1)
        return out - math.log(s) - _HALF_LOG_2PI
    raise TypeError(f"unsupported distribution {dist!r}")


def _lattice_logpdf(dist: dists.Geometric, y, s):
    l, q = dist.spacing, dist.ratio
    n_pts = dist.support_size()
    total = (1.0 - q) / (1.0 - q ** n_pts)
    width = int(math.ceil(2 * _PAD_SIGMAS * s / l)) + 1
    out = np.empty_like(y)
    chunk = max(1, 2_000_000 // width)
    offs = np.arange(width)
    for k in range(0, y.size, chunk):
        yy = y[k:k + chunk]
        i0 = np.floor((yy - _PAD_SIGMAS * s) / l).astype(np.int64)
        idx = i0[:, None] + offs
        valid = (idx >= 0) & (idx < n_pts)
        idx_c = np.clip(idx, 0, n_pts - 1)
        terms = math.log(total) + idx_c * math.log(q) - 0.5 * ((yy[:, None] - idx_c * l) / s) ** 2
        terms = np.where(valid, terms, -np.inf)
        out[k:k + chunk] = logsumexp(terms, axis=1)
    return out - math.log(s) - _HALF_LOG_2PI


def mc_mi_from_pairs(dist, x, y, sigma2: float) -> MiResult:
    """Average of ``log p(y|x) - log p(y)`` over given input/output pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    log_cond = -0.5 * (y - x) ** 2 / sigma2 - 0.5 * math.log(sigma2) - _HALF_LOG_2PI
    dens = log_cond - output_logpdf(dist, y, sigma2)
    n = dens.size
    return MiResult(float(dens.mean()), Method.MONTE_CARLO, float(dens.std(ddof=1) / math.sqrt(n)))


def mc_mi_estimate(dist, sigma2: float, n: int, seed) -> MiResult:
    """Monte Carlo ``I(X; X + Z)`` with its standard error.

    Symbols and noise come from independent children of ``seed``.
    """
    if n < 10_000:
        raise ValueError("n must be at least 1e4")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    sym_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
    if isinstance(dist, DiscreteInput):
        u = np.random.default_rng(sym_seed).random(n)
        cdf = np.cumsum(dist.probs)
        x = dist.mass_points[np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)]
    else:
        x = dists.sample(dist, sym_seed, n)
    z = np.random.default_rng(noise_seed).standard_normal(n)
    return mc_mi_from_pairs(dist, x, x + math.sqrt(sigma2) * z, sigma2)
