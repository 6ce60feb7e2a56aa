"""Bandlimited modulation pulses and their shaping metrics.

Four pulses are provided, all bandlimited to ``[-W, W]``:

* ``sinc``  -- ``sinc(2Wt)``, flat spectrum of height ``1/(2W)``.
* ``s2``    -- ``sinc(Wt)**2 / 2``, triangular spectrum, nonnegative.
* ``sc``    -- spectral-cosine pulse ``2 cos(2 pi W t) / (pi (1 - 16 W^2 t^2))``.
* ``pl``    -- parametric-linear Nyquist pulse with roll-off ``beta``,
  ``g(n T0) = delta[n]`` for ``T0 = (1 + beta) / (2W)``.

The first three integrate to ``1/(2W)``; the PL pulse integrates to ``T0``.
An extra ``gain`` multiplies any pulse (the ISI-free S2 scheme uses gain 2).

Two metrics summarise a pulse for the capacity bounds: the spectral
flatness ``G`` (exponentiated mean log power spectrum, see
:func:`compute_G`) and the worst-case absolute pulse-train sum ``S(tau)``
(see :func:`compute_S`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special
from scipy.optimize import minimize_scalar

from .errors import DivergentMetric


class PulseKind(str, enum.Enum):
    SINC = "sinc"
    S2 = "s2"
    SC = "sc"
    PL = "pl"


@dataclass(frozen=True)
class Pulse:
    kind: PulseKind
    beta: float | None = None
    bandwidth: float = 1.0
    gain: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.kind is PulseKind.PL:
            if self.beta is None or not 0.0 < self.beta <= 1.0:
                raise ValueError("PL pulse needs beta in (0, 1]")
        elif self.beta is not None:
            raise ValueError(f"{self.kind.value} pulse takes no beta")

    @property
    def T0(self) -> float:
        """Nyquist spacing of the PL pulse, ``(1 + beta) / (2W)``."""
        if self.kind is not PulseKind.PL:
            raise AttributeError("T0 is defined for PL pulses only")
        return (1.0 + self.beta) / (2.0 * self.bandwidth)

    @property
    def label(self) -> str:
        name = self.kind.value if self.beta is None else f"pl(beta={self.beta:g})"
        return name if self.gain == 1.0 else f"{self.gain:g}*{name}"

    def __call__(self, t):
        return eval_time(self, t)


def sinc_pulse(W=1.0):
    return Pulse(PulseKind.SINC, bandwidth=W)


def s2_pulse(W=1.0, gain=1.0):
    return Pulse(PulseKind.S2, bandwidth=W, gain=gain)


def sc_pulse(W=1.0):
    return Pulse(PulseKind.SC, bandwidth=W)


def pl_pulse(beta, W=1.0):
    return Pulse(PulseKind.PL, beta=beta, bandwidth=W)


def eval_time(pulse: Pulse, t):
    """Pulse amplitude at time ``t`` (scalar or array, seconds).

    Removable singularities are filled by their limits: the SC pulse is
    evaluated through the identity ``(sinc(2Wt - 1/2) + sinc(2Wt + 1/2)) / 2``,
    which equals the closed form everywhere and is finite at ``t = +-1/(4W)``.
    """
    t = np.asarray(t, dtype=float)
    W = pulse.bandwidth
    kind = pulse.kind
    if kind is PulseKind.SINC:
        out = np.sinc(2.0 * W * t)
    elif kind is PulseKind.S2:
        out = 0.5 * np.sinc(W * t) ** 2
    elif kind is PulseKind.SC:
        x = 2.0 * W * t
        out = 0.5 * (np.sinc(x - 0.5) + np.sinc(x + 0.5))
    else:
        x = t / pulse.T0
        out = np.sinc(x) * np.sinc(pulse.beta * x)
    out = pulse.gain * out
    return float(out) if out.ndim == 0 else out


def eval_freq(pulse: Pulse, f):
    """Fourier transform of the pulse at frequency ``f`` (Hz); zero for ``|f| > W``."""
    f = np.asarray(f, dtype=float)
    W = pulse.bandwidth
    af = np.abs(f)
    inband = af <= W
    kind = pulse.kind
    if kind is PulseKind.SINC:
        val = np.full_like(af, 1.0 / (2.0 * W))
    elif kind is PulseKind.S2:
        val = (W - af) / (2.0 * W * W)
    elif kind is PulseKind.SC:
        val = np.cos(np.pi * af / (2.0 * W)) / (2.0 * W)
    else:
        T0 = pulse.T0
        corner = W * (1.0 - pulse.beta) / (1.0 + pulse.beta)
        ramp = T0 * (W - af) / (W - corner)
        val = np.where(af <= corner, T0, ramp)
    out = pulse.gain * np.where(inband, val, 0.0)
    return float(out) if out.ndim == 0 else out


def compute_G(pulse: Pulse, log_floor: float = -700.0) -> float:
    """Spectral flatness ``exp((1/W) int_0^W log|2W G(f)|^2 df)``.

    The pulse is first rescaled so that its spectrum at DC is ``1/(2W)``;
    the metric is scale dependent and is only meaningful in that
    normalisation. The log-singularity at the band edge is integrated in the
    variable ``u = W - f`` by adaptive Gauss-Kronrod quadrature.
    """
    W = pulse.bandwidth
    scale = 1.0 / (2.0 * W * eval_freq(pulse, 0.0))

    def integrand(u):
        val = 2.0 * W * scale * eval_freq(pulse, W - u)
        if val <= 0.0:
            return log_floor
        return 2.0 * math.log(abs(val))

    breaks = []
    if pulse.kind is PulseKind.PL and pulse.beta < 1.0:
        breaks.append(W - W * (1.0 - pulse.beta) / (1.0 + pulse.beta))
    total, _ = integrate.quad(integrand, 0.0, W, points=breaks or None,
                              limit=200, epsabs=1e-13, epsrel=1e-12)
    mean_log = total / W
    if not math.isfinite(mean_log) or mean_log <= log_floor:
        raise DivergentMetric(f"log-spectrum integral diverges for {pulse.label}")
    return math.exp(mean_log)


# --- excursion metric -------------------------------------------------------

def _envelope(pulse: Pulse):
    """Return ``(order, K)`` with ``|g(s)| <= K / |s|**order`` for large ``|s|``."""
    W = pulse.bandwidth
    kind = pulse.kind
    if kind is PulseKind.SINC:
        return 1, pulse.gain / (2.0 * np.pi * W)
    if kind is PulseKind.S2:
        return 2, pulse.gain / (2.0 * np.pi ** 2 * W ** 2)
    if kind is PulseKind.SC:
        return 2, pulse.gain / (8.0 * np.pi * W ** 2)
    return 2, pulse.gain * pulse.T0 ** 2 / (pulse.beta * np.pi ** 2)


def _oscillation_period(pulse: Pulse) -> float:
    """Slowest period (seconds) of the bounded factor multiplying the envelope."""
    W = pulse.bandwidth
    if pulse.kind is PulseKind.S2:
        return 1.0 / W
    if pulse.kind is PulseKind.SC:
        return 1.0 / (2.0 * W)
    if pulse.kind is PulseKind.PL:
        return pulse.T0 / pulse.beta
    return 1.0 / (2.0 * W)


def default_terms(pulse: Pulse, tau: float) -> int:
    """Truncation index ``N`` used by :func:`abs_pulse_train`."""
    period = _oscillation_period(pulse) / tau
    return int(max(2048, math.ceil(256 * period)))


def _hann_mean(ratio, axis=-1):
    w = np.hanning(ratio.shape[axis] + 2)[1:-1]
    return np.tensordot(ratio, w, axes=([axis], [0])) / w.sum()


def abs_pulse_train(pulse: Pulse, t, tau: float, n_terms: int | None = None,
                    return_bound: bool = False):
    """``sum_i |g(t - i tau)|`` at each ``t``.

    Terms with ``|i| <= n_terms`` are summed directly. The remaining tail is
    estimated as (mean of ``|g| / envelope`` over the outer quarter of the
    retained terms, Hann weighted) times the exact envelope tail, which is a
    trigamma value. The envelope tail itself is a rigorous bound on the
    truncation error and is returned when ``return_bound`` is set.
    """
    order, K = _envelope(pulse)
    if order < 2:
        raise DivergentMetric(f"{pulse.label}: pulse train sum diverges (1/t decay)")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    N = default_terms(pulse, tau) if n_terms is None else int(n_terms)
    block = max(N // 4, 8)
    idx = np.arange(-N, N + 1)

    chunk = max(1, int(4_000_000 // idx.size))
    total = np.empty(t.size)
    tail = np.empty(t.size)
    bound = np.empty(t.size)
    for start in range(0, t.size, chunk):
        tt = t[start:start + chunk]
        s = tt[:, None] - idx[None, :] * tau
        vals = np.abs(eval_time(pulse, s))
        vals = np.atleast_2d(vals)
        total[start:start + chunk] = vals.sum(axis=1)

        x = tt / tau
        b_right = K / tau ** 2 * special.polygamma(1, N + 1 - x)
        b_left = K / tau ** 2 * special.polygamma(1, N + 1 + x)
        m_right = _hann_mean(vals[:, -block:] * s[:, -block:] ** 2 / K)
        m_left = _hann_mean(vals[:, :block] * s[:, :block] ** 2 / K)
        tail[start:start + chunk] = m_right * b_right + m_left * b_left
        bound[start:start + chunk] = b_right + b_left
    out = total + tail
    if return_bound:
        return out, bound
    return out


@dataclass(frozen=True)
class Excursion:
    value: float
    t_star: float
    tail_bound: float

    @property
    def divergent(self) -> bool:
        return math.isinf(self.value)


def excursion(pulse: Pulse, tau: float, n_grid: int = 256,
              n_terms: int | None = None) -> Excursion:
    """Maximise the absolute pulse-train sum over one period, with diagnostics."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    order, _ = _envelope(pulse)
    if order < 2:
        return Excursion(math.inf, 0.0, math.inf)

    N = default_terms(pulse, tau) if n_terms is None else int(n_terms)
    coarse_N = min(N, 512)
    # the sum is symmetric about tau/2 for even pulses
    grid = np.linspace(0.0, tau / 2.0, n_grid + 1)
    coarse = abs_pulse_train(pulse, grid, tau, coarse_N)

    # refine every local maximum of the coarse profile within reach of the best
    is_peak = np.r_[coarse[0] >= coarse[1],
                    (coarse[1:-1] >= coarse[:-2]) & (coarse[1:-1] >= coarse[2:]),
                    coarse[-1] >= coarse[-2]]
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[coarse[peaks] >= coarse.max() - 1e-3 * max(coarse.max(), 1.0)]
    peaks = peaks[np.argsort(coarse[peaks])[::-1][:3]]

    # locate each peak with a moderate term count, then evaluate it at full N;
    # the value is second order in the location error
    locate_N = min(N, 2048)
    locate = lambda u: float(abs_pulse_train(pulse, u, tau, locate_N)[0])  # noqa: E731
    fine = lambda u: float(abs_pulse_train(pulse, u, tau, N)[0])  # noqa: E731
    best_t, best_v = 0.0, -math.inf
    h = grid[1] - grid[0]
    for k in peaks:
        lo, hi = max(grid[k] - h, 0.0), min(grid[k] + h, tau / 2.0)
        res = minimize_scalar(lambda u: -locate(u), bounds=(lo, hi), method="bounded",
                              options={"xatol": tau * 1e-9})
        for tc in (grid[k], float(res.x)):
            vc = fine(tc)
            if vc > best_v:
                best_t, best_v = tc, vc
    _, bound = abs_pulse_train(pulse, best_t, tau, N, return_bound=True)
    return Excursion(best_v, best_t, float(bound[0]))


def compute_S(pulse: Pulse, tau: float) -> float:
    """Peak excursion ``max_{t in [0, tau]} sum_i |g(t - i tau)|``.

    Returns ``math.inf`` (the divergence flag) for pulses whose tails decay
    only like ``1/t``, i.e. the sinc pulse at every spacing.
    """
    return excursion(pulse, tau).value


def S_nyquist(pulse: Pulse) -> float:
    """``S`` at the Nyquist spacing ``1/(2W)``."""
    return compute_S(pulse, 1.0 / (2.0 * pulse.bandwidth))


def S_beta(pulse: Pulse) -> float:
    """``S`` of a PL pulse at its own ISI-free spacing ``T0``."""
    return compute_S(pulse, pulse.T0)


def verify_nyquist(pulse: Pulse, spacing: float | None = None, n_max: int = 64,
                   tol: float = 1e-9) -> bool:
    """Check ``|g(n T) - delta[n]| < tol`` for ``|n| <= n_max``.

    ``spacing`` defaults to ``T0`` for PL pulses, ``1/W`` for S2 and
    ``1/(2W)`` for sinc; the SC pulse has no natural ISI-free spacing and
    needs it explicitly.
    """
    if spacing is None:
        W = pulse.bandwidth
        if pulse.kind is PulseKind.PL:
            spacing = pulse.T0
        elif pulse.kind is PulseKind.S2:
            spacing = 1.0 / W
        elif pulse.kind is PulseKind.SINC:
            spacing = 1.0 / (2.0 * W)
        else:
            raise ValueError("spacing required for the SC pulse")
    n = np.arange(-n_max, n_max + 1)
    samples = eval_time(pulse, n * spacing)
    target = (n == 0).astype(float)
    return bool(np.all(np.abs(samples - target) < tol))


@dataclass(frozen=True)
class PulseMetrics:
    gain_metric: float
    excursion: float
    tau: float
    t_star: float = 0.0
    tail_bound: float = 0.0

    @property
    def divergent(self) -> bool:
        return math.isinf(self.excursion)


def pulse_metrics(pulse: Pulse, tau: float | None = None) -> PulseMetrics:
    """``G`` together with ``S`` at ``tau`` (default: Nyquist spacing, or ``T0`` for PL)."""
    if tau is None:
        tau = pulse.T0 if pulse.kind is PulseKind.PL else 1.0 / (2.0 * pulse.bandwidth)
    exc = excursion(pulse, tau)
    return PulseMetrics(compute_G(pulse), exc.value, tau, exc.t_star, exc.tail_bound)
