"""Oversampled PAM waveforms and empirical admissibility checks.

A trace is the finite superposition ``dc + sum_i x_i g(t - i Ts)`` sampled
every ``dt = Ts / oversampling``. Symbols occupy the central span
``[0, n Ts)``; symbol-free guards of at least 32 periods on either side let
the edge pulses ring out. Statistics are taken over the central span.

The pulse kernel extends until its tail envelope falls below ``1e-9`` of the
pulse peak (capped at the trace length, so the sinc pulse is never truncated).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import polygamma

from . import distributions as dists
from . import mi as mi_mod
from . import pulses
from .errors import InvalidRegime

MIN_OVERSAMPLING = 16
DEFAULT_OVERSAMPLING = 64
MIN_GUARD = 32
TAIL_TOL = 1e-9
NONNEG_TOL = 1e-9
POWER_RTOL = 1e-6


@dataclass
class WaveformTrace:
    samples: np.ndarray
    dt: float
    symbols: np.ndarray
    Ts: float
    dc_bias: float
    pulse: pulses.Pulse
    guard: int = MIN_GUARD
    kernel_halfwidth: float = math.inf

    def __post_init__(self):
        if self.dt > self.Ts / MIN_OVERSAMPLING * (1 + 1e-12):
            raise ValueError("oversampling below 16 samples per symbol")
        if self.guard < MIN_GUARD:
            raise ValueError("guard must be at least 32 symbol periods")

    @property
    def oversampling(self) -> int:
        return int(round(self.Ts / self.dt))

    @property
    def n_symbols(self) -> int:
        return int(self.symbols.size)

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.samples.size) - self.guard * self.oversampling) * self.dt

    @property
    def central(self) -> np.ndarray:
        start = self.guard * self.oversampling
        return self.samples[start:start + self.n_symbols * self.oversampling]

    def at_symbol_instants(self) -> np.ndarray:
        start = self.guard * self.oversampling
        return self.samples[start:start + self.n_symbols * self.oversampling:self.oversampling]


@dataclass(frozen=True)
class AdmissibilityReport:
    min_value: float
    avg_power: float
    peak_value: float
    guard_truncation_bound: float
    avg_power_stderr: float
    nonnegative: bool
    power_ok: bool | None
    peak_ok: bool | None

    @property
    def passed(self) -> bool:
        return self.nonnegative and self.power_ok is not False and self.peak_ok is not False


def _allowed_spacings(pulse):
    W = pulse.bandwidth
    out = [1.0 / (2.0 * W), 1.0 / W]
    if pulse.kind is pulses.PulseKind.PL:
        out.append(pulse.T0)
    return out


def _kernel_halfwidth(pulse, span):
    order, K = pulses._envelope(pulse)
    peak = abs(float(pulses.eval_time(pulse, 0.0)))
    return min((K / (TAIL_TOL * peak)) ** (1.0 / order), span)


def superpose(pulse, symbols, Ts, dc, oversampling, guard=MIN_GUARD, halfwidth=None):
    """Sample ``dc + sum_i symbols[i] g(t - i Ts)`` on the trace grid."""
    symbols = np.asarray(symbols, dtype=float)
    n = symbols.size
    dt = Ts / oversampling
    n_samples = (n + 2 * guard) * oversampling
    span = n_samples * dt
    hw = _kernel_halfwidth(pulse, span) if halfwidth is None else min(halfwidth, span)
    H = int(math.ceil(hw / dt))
    kernel = pulses.eval_time(pulse, np.arange(-H, H + 1) * dt)
    train = np.zeros(n_samples)
    train[guard * oversampling:(guard + n) * oversampling:oversampling] = symbols
    wave = fftconvolve(train, kernel)[H:H + n_samples]
    return WaveformTrace(wave + dc, dt, symbols, Ts, float(dc), pulse, guard, H * dt)


def gen_waveform(pulse, dist, Ts, dc, n_symbols, oversampling=DEFAULT_OVERSAMPLING,
                 seed=0, offset=0.0, guard=MIN_GUARD, halfwidth=None) -> WaveformTrace:
    """Random PAM trace with i.i.d. symbols ``X_i - offset`` drawn from ``dist``.

    ``offset`` centres bounded symbols for the DC-biased constructions.
    """
    if oversampling < MIN_OVERSAMPLING or int(oversampling) != oversampling:
        raise ValueError("oversampling must be an integer >= 16")
    if not any(math.isclose(Ts, s, rel_tol=1e-12) for s in _allowed_spacings(pulse)):
        raise ValueError(f"symbol spacing {Ts} is not a supported signalling rate")
    if n_symbols < 1:
        raise ValueError("need at least one symbol")
    x = dists.sample(dist, seed, n_symbols) - offset
    return superpose(pulse, x, Ts, dc, int(oversampling), guard, halfwidth)


def _block_stderr(values, block):
    means = values[: values.size // block * block].reshape(-1, block).mean(axis=1)
    if means.size < 2:
        return math.inf
    return float(means.std(ddof=1) / math.sqrt(means.size))


def guard_truncation_bound(trace: WaveformTrace) -> float:
    """Envelope bound on the pulse tail dropped by the finite kernel."""
    span = trace.samples.size * trace.dt
    if trace.kernel_halfwidth >= span:
        return 0.0
    order, K = pulses._envelope(trace.pulse)
    if order < 2:
        return math.inf
    m = trace.kernel_halfwidth / trace.Ts
    amp = float(np.max(np.abs(trace.symbols)))
    return amp * 2.0 * K / trace.Ts ** 2 * float(polygamma(1, m))


def check_admissibility(trace: WaveformTrace, constraint) -> AdmissibilityReport:
    """Empirical nonnegativity, average power and peak over the central span.

    The average-power flag allows three standard errors of the time average
    (estimated from per-symbol block means) on top of the ``1e-6`` tolerance,
    since the constraint is on the ensemble mean.
    """
    c = trace.central
    avg = float(c.mean())
    stderr = _block_stderr(c, trace.oversampling)
    lo, hi = float(c.min()), float(c.max())
    power_ok = peak_ok = None
    if isinstance(constraint, (dists.AP, dists.PAPR)):
        power_ok = avg <= constraint.energy * (1 + POWER_RTOL) + 3.0 * stderr
    if isinstance(constraint, (dists.PP, dists.PAPR)):
        peak_ok = hi <= constraint.peak * (1 + POWER_RTOL)
    return AdmissibilityReport(lo, avg, hi, guard_truncation_bound(trace), stderr,
                               lo >= -NONNEG_TOL, power_ok, peak_ok)


def isi_free_sampling_check(trace: WaveformTrace) -> float:
    """``max_i |x(i Ts) - (x_i + dc)|`` over the central symbols."""
    got = trace.at_symbol_instants()
    return float(np.max(np.abs(got - (trace.symbols + trace.dc_bias))))


# --- constructions -----------------------------------------------------------

@dataclass(frozen=True)
class Construction:
    """Pulse, spacing, symbol law and DC bias of one signalling scheme."""

    name: str
    pulse: pulses.Pulse
    Ts: float
    dist: object
    offset: float = 0.0
    dc: float = 0.0

    def waveform(self, n_symbols, seed=0, oversampling=DEFAULT_OVERSAMPLING, **kw):
        return gen_waveform(self.pulse, self.dist, self.Ts, self.dc, n_symbols,
                            oversampling, seed, self.offset, **kw)

    @property
    def isi_free(self) -> bool:
        return pulses.verify_nyquist(self.pulse, self.Ts)


def _bounded_law(constraint, S):
    """Support, law and DC bias for symbols centred under a DC bias ``S L / 2``."""
    if isinstance(constraint, dists.AP):
        L = 2.0 * constraint.energy / S
        return dists.Uniform(0.0, L), L
    if isinstance(constraint, dists.PP):
        L = constraint.peak / S
        return dists.Uniform(0.0, L), L
    if isinstance(constraint, dists.PAPR):
        nu = dists.nu_from_papr(constraint.r, S)
        mu = dists.solve_mu(1.0 / nu).mu
        L = constraint.peak / S
        return dists.TruncExp(L, mu), L
    raise TypeError(f"unknown constraint {constraint!r}")


def nyquist_s2_exponential(energy=1.0, W=1.0) -> Construction:
    """Nyquist-rate S2 PAM with exponential symbols (average-power limited)."""
    return Construction("nyquist-s2-exp", pulses.s2_pulse(W), 1.0 / (2.0 * W),
                        dists.Exponential(energy))


def nyquist_dc(pulse, constraint, W=None) -> Construction:
    """Nyquist-rate PAM with centred bounded symbols plus DC bias ``S L / 2``."""
    Ts = 1.0 / (2.0 * pulse.bandwidth)
    S = pulses.compute_S(pulse, Ts)
    law, L = _bounded_law(constraint, S)
    return Construction(f"nyquist-dc-{pulse.label}", pulse, Ts, law, L / 2.0, S * L / 2.0)


def ifs_s2(constraint, W=1.0) -> Construction:
    """ISI-free S2 signalling at spacing ``1/W`` (pulse gain 2, no DC)."""
    if isinstance(constraint, dists.AP):
        law = dists.Exponential(constraint.energy)
    elif isinstance(constraint, dists.PP):
        law = dists.Uniform(0.0, constraint.peak)
    elif isinstance(constraint, dists.PAPR):
        mu = dists.solve_mu(1.0 / constraint.r).mu
        law = dists.TruncExp(constraint.peak, mu)
    else:
        raise TypeError(f"unknown constraint {constraint!r}")
    return Construction("ifs-s2", pulses.s2_pulse(W, gain=2.0), 1.0 / W, law)


def ifs_s2_geometric(spacing, energy=1.0, W=1.0) -> Construction:
    return Construction("ifs-s2-geom", pulses.s2_pulse(W, gain=2.0), 1.0 / W,
                        dists.Geometric(spacing, energy))


def ifs_pl_dc(beta, constraint, W=1.0) -> Construction:
    """ISI-free PL signalling at spacing ``T0`` with centred symbols and DC bias."""
    p = pulses.pl_pulse(beta, W)
    S = pulses.compute_S(p, p.T0)
    law, L = _bounded_law(constraint, S)
    return Construction(f"ifs-pl-dc-{beta:g}", p, p.T0, law, L / 2.0, S * L / 2.0)


def equivalent_channel_mi(scheme: Construction, snr=None, n_symbols=100_000, seed=0,
                          oversampling=MIN_OVERSAMPLING) -> mi_mod.MiResult:
    """Simulated rate of an ISI-free scheme in bit/s/Hz, with its MC error.

    The waveform is sampled at the symbol instants and i.i.d. ``N(0, N0 W)``
    noise (unit variance) is added, which is what ideal bandlimited filtering
    followed by direct sampling delivers. The scheme already carries the
    signal scale, so ``snr`` is accepted only for bookkeeping.
    """
    if not scheme.isi_free:
        raise InvalidRegime(f"{scheme.name} is not ISI-free at its symbol spacing")
    sym_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
    trace = scheme.waveform(n_symbols, seed=sym_seed, oversampling=oversampling)
    x = trace.symbols + scheme.offset
    noise = np.random.default_rng(noise_seed).standard_normal(n_symbols)
    y = trace.at_symbol_instants() - scheme.dc + scheme.offset + noise
    res = mi_mod.mc_mi_from_pairs(scheme.dist, x, y, 1.0)
    per_hz = 1.0 / (scheme.Ts * scheme.pulse.bandwidth) / math.log(2.0)
    return mi_mod.MiResult(res.mi * per_hz, res.method, res.err_estimate * per_hz)


def find_sinc_counterexample(n_seeds=100, n_symbols=64, energy=1.0, W=1.0,
                             oversampling=DEFAULT_OVERSAMPLING):
    """First seed whose exponential-symbol sinc waveform goes negative.

    Returns ``(seed, min_value)`` or ``None`` if every seed stays nonnegative.
    """
    p = pulses.sinc_pulse(W)
    for seed in range(n_seeds):
        tr = gen_waveform(p, dists.Exponential(energy), 1.0 / (2.0 * W), 0.0, n_symbols,
                          oversampling, seed)
        lo = float(tr.central.min())
        if lo < -NONNEG_TOL:
            return seed, lo
    return None


def write_trace_csv(trace: WaveformTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "amplitude"])
        for t, a in zip(trace.times, trace.samples):
            w.writerow([f"{t:.9g}", f"{a:.9g}"])
