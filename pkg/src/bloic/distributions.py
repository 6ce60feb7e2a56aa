"""Input-symbol laws, their entropies, and the truncated-exponential algebra.

All entropies are in nats. The truncated exponential on ``[0, L]`` with
shape ``mu`` has mean ``L * m(mu)`` where

    m(mu) = 1/mu - exp(-mu) / (1 - exp(-mu)),

a strictly decreasing map from ``1/2`` (``mu -> 0``) to ``0`` (``mu -> inf``).
:func:`solve_mu` inverts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DiscreteDistribution, InvalidRegime, OutOfRange

MU_MIN = 1e-12
MU_MAX = 750.0
_SERIES_CUTOFF = 1e-3
GEOMETRIC_TAIL = 1e-12


@dataclass(frozen=True)
class Exponential:
    mean: float

    def __post_init__(self):
        if self.mean <= 0:
            raise ValueError("mean must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, np.exp(-np.clip(x, 0, None) / self.mean) / self.mean, 0.0)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), 1.0 / (self.hi - self.lo), 0.0)


@dataclass(frozen=True)
class TruncExp:
    """Density ``(mu / L) / (1 - exp(-mu)) * exp(-mu x / L)`` on ``[0, L]``."""

    support: float
    mu: float

    def __post_init__(self):
        if self.support <= 0 or self.mu <= 0:
            raise ValueError("support and mu must be positive")

    @property
    def mean(self):
        return self.support * mean_fraction(self.mu)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        L, mu = self.support, self.mu
        inside = (x >= 0) & (x <= L)
        dens = (mu / L) / -math.expm1(-mu) * np.exp(-mu * np.clip(x, 0, L) / L)
        return np.where(inside, dens, 0.0)


@dataclass(frozen=True)
class Geometric:
    """Masses ``p_i = l/(l+E) * (E/(l+E))**i`` at ``x = i*l``, ``i >= 0``."""

    spacing: float
    mean: float

    def __post_init__(self):
        if self.spacing <= 0 or self.mean <= 0:
            raise ValueError("spacing and mean must be positive")

    @property
    def ratio(self):
        return self.mean / (self.spacing + self.mean)

    def support_size(self, tail=GEOMETRIC_TAIL) -> int:
        """Number of mass points needed to reach cumulative mass ``1 - tail``."""
        return int(math.ceil(math.log(tail) / math.log(self.ratio)))

    def masses(self, tail=GEOMETRIC_TAIL):
        """Truncated ``(points, probs)``; probabilities are renormalised."""
        n = self.support_size(tail)
        i = np.arange(n)
        q = self.ratio
        probs = (1.0 - q) * q ** i
        return i * self.spacing, probs / probs.sum()


SymbolDistribution = Exponential | Uniform | TruncExp | Geometric


def mean_fraction(mu):
    """``1/mu - exp(-mu) / (1 - exp(-mu))``, accurate for small ``mu``."""
    mu = float(mu)
    if mu < _SERIES_CUTOFF:
        return 0.5 - mu / 12.0 + mu ** 3 / 720.0
    return 1.0 / mu - math.exp(-mu) / -math.expm1(-mu)


def entropy(dist) -> float:
    """Differential entropy in nats."""
    if isinstance(dist, Exponential):
        return 1.0 + math.log(dist.mean)
    if isinstance(dist, Uniform):
        return math.log(dist.hi - dist.lo)
    if isinstance(dist, TruncExp):
        mu, L = dist.mu, dist.support
        # log((1 - e^-mu)/mu) -> 0 as mu -> 0
        log_ratio = math.log(-math.expm1(-mu) / mu)
        return mu * mean_fraction(mu) + math.log(L) + log_ratio
    if isinstance(dist, Geometric):
        raise DiscreteDistribution("geometric law has no differential entropy")
    raise TypeError(f"unsupported distribution {dist!r}")


@dataclass(frozen=True)
class MuSolution:
    mu: float
    target: float


def solve_mu(target: float) -> MuSolution:
    """Unique ``mu > 0`` with ``mean_fraction(mu) == target``, for ``0 < target < 1/2``."""
    if not 0.0 < target < 0.5:
        raise OutOfRange(f"target {target} outside (0, 1/2)")
    if target >= mean_fraction(_SERIES_CUTOFF):
        # invert the cubic series by a few Newton steps from the linear term
        mu = 12.0 * (0.5 - target)
        for _ in range(4):
            f = 0.5 - mu / 12.0 + mu ** 3 / 720.0 - target
            mu -= f / (-1.0 / 12.0 + mu ** 2 / 240.0)
        return MuSolution(max(mu, MU_MIN), target)
    if target <= mean_fraction(MU_MAX):
        # exp(-mu) has underflowed; the map is 1/mu to machine precision
        return MuSolution(1.0 / target, target)
    mu = brentq(lambda m: mean_fraction(m) - target, _SERIES_CUTOFF, MU_MAX,
                xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return MuSolution(mu, target)


def nu_from_papr(r: float, S: float) -> float:
    """Symbol PAPR ``nu = 2r / (2S - rS + r)`` that makes the DC-biased waveform hit PAPR ``r``."""
    if S < 1.0 - 1e-9:
        raise ValueError("excursion metric must be >= 1")
    denom = 2.0 * S - r * S + r
    if denom <= 0:
        raise InvalidRegime(f"r={r} infeasible for excursion S={S} (needs r < 2S/(S-1))")
    return 2.0 * r / denom


def sample(dist, seed, n: int) -> np.ndarray:
    """``n`` i.i.d. draws by inverse CDF; deterministic for a fixed seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.random.default_rng(seed).random(n)
    if isinstance(dist, Exponential):
        return -dist.mean * np.log1p(-u)
    if isinstance(dist, Uniform):
        return dist.lo + (dist.hi - dist.lo) * u
    if isinstance(dist, TruncExp):
        L, mu = dist.support, dist.mu
        return -(L / mu) * np.log1p(u * math.expm1(-mu))
    if isinstance(dist, Geometric):
        # P(I >= k) = q**k, truncated at the same support as the quadrature
        k = np.floor(np.log1p(-u) / math.log(dist.ratio))
        k = np.minimum(k, dist.support_size() - 1)
        return k * dist.spacing
    raise TypeError(f"unsupported distribution {dist!r}")


# --- power constraints -------------------------------------------------------

@dataclass(frozen=True)
class AP:
    """Average power at most ``energy``."""

    energy: float = 1.0


@dataclass(frozen=True)
class PP:
    """Peak power at most ``peak``."""

    peak: float = 1.0


@dataclass(frozen=True)
class PAPR:
    """Average power at most ``energy`` and peak at most ``r * energy``."""

    r: float
    energy: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("PAPR must be positive")

    @property
    def peak(self):
        return self.r * self.energy


PowerConstraint = AP | PP | PAPR
