"""Closed-form capacity bounds for the bandlimited optical intensity channel.

Everything is per unit bandwidth (bit/s/Hz) with the noise normalised so that
``N0 * W = 1``. The SNR is the amplitude-like ratio ``E / sqrt(N0 W)`` (PNR
``A / sqrt(N0 W)`` under a peak constraint), and ``snr_db = 10 log10(snr)``.

Lower bounds come in two families:

* Nyquist-rate PAM with a shaping pulse (pre-log 1), driven by the pulse
  flatness ``G`` and excursion ``S``;
* ISI-free signalling with direct sampling (pre-log 1/2 for the S2 pulse at
  half the Nyquist rate, ``1/(1+beta)`` for DC-biased PL pulses).

Upper bounds lift discrete-time optical intensity channel bounds by a factor
of two transmissions per second per Hz.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import xlogy

from . import distributions as dists
from . import mi as mi_mod
from . import pulses
from ._optim import grid_golden_max
from .errors import AsymptoticOnly, DivergentMetric, InvalidRegime

LOG2E = 1.0 / math.log(2.0)
TWO_PI_E = 2.0 * math.pi * math.e

G_S2 = math.exp(-2.0)
S_S2 = 1.0
G_SC = 0.25
S_SC = 4.0 / math.pi

BETA_MIN = 0.01


def db_to_snr(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def snr_to_db(snr):
    return 10.0 * np.log10(snr)


def _log2_1p(x):
    return np.log1p(x) * LOG2E


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


# --- Nyquist-rate PAM lower bounds ------------------------------------------

def lb_general_pam(G, h_x, noise_var=1.0):
    """``log2(1 + G exp(2 h_x) / (2 pi e N0W))`` for symbol entropy ``h_x`` (nats).

    ``h_x`` carries the symbol scale, so with ``noise_var = 1`` it is the
    entropy of the symbols measured in units of ``sqrt(N0 W)``.
    """
    h_x = np.asarray(h_x, dtype=float)
    return _out(_log2_1p(G * np.exp(2.0 * h_x) / (TWO_PI_E * noise_var)))


def lb_exp_s2(snr):
    """Exponential symbols on the S2 pulse: ``log2(1 + snr^2 / (2 pi e))``."""
    snr = np.asarray(snr, dtype=float)
    return _out(_log2_1p(snr ** 2 / TWO_PI_E))


def lb_pp_general(G, SN, pnr):
    """Uniform symbols, DC-biased to the peak: ``log2(1 + G pnr^2 / (2 pi e SN^2))``."""
    if math.isinf(SN):
        raise DivergentMetric("pulse excursion is infinite; no peak-limited construction")
    pnr = np.asarray(pnr, dtype=float)
    return _out(_log2_1p(G * pnr ** 2 / (TWO_PI_E * SN ** 2)))


def lb_unif_cos(pnr):
    """Peak-limited bound with the spectral-cosine pulse, ``log2(1 + pi pnr^2 / (128 e))``."""
    return lb_pp_general(G_SC, S_SC, pnr)


def papr_eta(G, S, r):
    """Coefficient ``eta`` of ``snr^2`` in the PAPR-limited bound ``log2(1 + eta snr^2)``.

    For ``r > 2`` the symbols are truncated exponential with symbol PAPR
    ``nu`` chosen so that the DC-biased waveform has PAPR ``r``; for
    ``r <= 2`` uniform symbols are used and the average constraint is slack.
    """
    if math.isinf(S):
        raise DivergentMetric("pulse excursion is infinite")
    if r <= 0:
        raise ValueError("PAPR must be positive")
    base = G * r * r / (TWO_PI_E * S * S)
    if r <= 2.0:
        return base
    nu = dists.nu_from_papr(r, S)
    mu = dists.solve_mu(1.0 / nu).mu
    shrink = -math.expm1(-mu) / mu
    return base * math.exp(2.0 * mu / nu) * shrink * shrink


def lb_papr_general(G, S, r, snr):
    snr = np.asarray(snr, dtype=float)
    return _out(_log2_1p(papr_eta(G, S, r) * snr ** 2))


def lb_te_s2(r, snr):
    """Truncated-exponential symbols on the S2 pulse under PAPR ``r``."""
    return lb_papr_general(G_S2, S_S2, r, snr)


def lb_unif_s2_pam(snr):
    """Uniform symbols on ``[0, 2E]`` with the S2 pulse (a practical AP design)."""
    snr = np.asarray(snr, dtype=float)
    return lb_general_pam(G_S2, np.log(2.0 * snr))


# --- ISI-free lower bounds -----------------------------------------------------

def _ifs_eta(constraint):
    if isinstance(constraint, dists.AP):
        return math.e / (2.0 * math.pi)
    if isinstance(constraint, dists.PP):
        return 1.0 / TWO_PI_E
    if isinstance(constraint, dists.PAPR):
        return papr_eta(1.0, 1.0, constraint.r)
    raise TypeError(f"unknown constraint {constraint!r}")


def lb_ifs_family(constraint, snr):
    """ISI-free S2 signalling at half the Nyquist rate.

    ``constraint`` selects the symbol law (exponential, uniform, or
    truncated exponential) and, for PAPR, supplies ``r``; ``snr`` is the
    SNR (PNR under a peak constraint).
    """
    snr = np.asarray(snr, dtype=float)
    return _out(0.5 * _log2_1p(_ifs_eta(constraint) * snr ** 2))


def lb_geom_s2_ifs(snr):
    """ISI-free S2 signalling with optimised geometric symbols (bit/s/Hz)."""
    snr_arr = np.atleast_1d(np.asarray(snr, dtype=float))
    vals = np.array([mi_mod.optimize_geometric_l(s, 1.0)[1] * LOG2E for s in snr_arr])
    return _out(vals.reshape(np.shape(snr)))


@functools.lru_cache(maxsize=4096)
def s_beta(beta: float) -> float:
    """Excursion of the PL pulse at its own Nyquist spacing."""
    p = pulses.pl_pulse(beta)
    return pulses.compute_S(p, p.T0)


@functools.lru_cache(maxsize=8)
def _s_beta_table(n_grid: int = 64):
    betas = np.linspace(BETA_MIN, 1.0, n_grid)
    values = np.array([s_beta(float(b)) for b in betas])
    return betas, values, PchipInterpolator(betas, values)


def _dc_eta(constraint, S):
    if isinstance(constraint, dists.AP):
        return 2.0 / (math.pi * math.e * S * S)
    if isinstance(constraint, dists.PP):
        return 1.0 / (TWO_PI_E * S * S)
    if isinstance(constraint, dists.PAPR):
        return papr_eta(1.0, S, constraint.r)
    raise TypeError(f"unknown constraint {constraint!r}")


def ifs_dc_rate(beta, constraint, snr, S=None):
    """DC-biased ISI-free rate with a PL pulse of fixed roll-off ``beta``.

    Returns ``nan`` where the PAPR target is infeasible for this pulse.
    """
    if S is None:
        S = s_beta(float(beta))
    snr = np.asarray(snr, dtype=float)
    try:
        eta = _dc_eta(constraint, S)
    except InvalidRegime:
        return _out(np.full(snr.shape, np.nan))
    return _out(_log2_1p(eta * snr ** 2) / (1.0 + beta))


def _check_pl(pulse):
    if pulse is not None and pulse.kind is not pulses.PulseKind.PL:
        raise ValueError("DC-aided ISI-free signalling needs the PL pulse family")


def lb_ifs_dc(pulse, constraint, snr, n_grid: int = 64):
    """Supremum over the PL roll-off of :func:`ifs_dc_rate` at one SNR.

    ``pulse`` only selects the PL family; its own roll-off is ignored.
    Excursions on the beta grid are exact and cached; golden-section
    refinement between grid points uses a monotone cubic interpolant of the
    excursion, and the returned value is recomputed with the exact excursion
    at the chosen roll-off. Returns ``(rate, beta_star)``.
    """
    _check_pl(pulse)
    betas, _, interp = _s_beta_table(n_grid)

    def objective(b):
        v = ifs_dc_rate(b, constraint, snr, S=float(interp(b)))
        return -np.inf if np.isnan(v) else v

    grid_vals = np.array([objective(b) for b in betas])
    if not np.any(np.isfinite(grid_vals)):
        return float("nan"), float("nan")
    b_star, _ = grid_golden_max(objective, BETA_MIN, 1.0, n_grid=n_grid, xtol=1e-6)
    exact = ifs_dc_rate(b_star, constraint, snr)
    k = int(np.argmax(grid_vals))
    if np.isnan(exact) or grid_vals[k] > exact:
        return float(grid_vals[k]), float(betas[k])
    return float(exact), float(b_star)


def lb_ifs_dc_curve(constraint, snr_grid, n_grid: int = 64):
    """:func:`lb_ifs_dc` over an SNR grid; returns ``(rates, beta_stars)``."""
    out = [lb_ifs_dc(None, constraint, float(s), n_grid) for s in np.atleast_1d(snr_grid)]
    vals, betas = zip(*out)
    return np.array(vals), np.array(betas)


# --- upper bounds --------------------------------------------------------------

def ub_ap_1(snr):
    """``log2((e / 2 pi) (snr + 2)^2)``, clamped at zero."""
    snr = np.asarray(snr, dtype=float)
    raw = np.log2(math.e / (2.0 * math.pi) * (snr + 2.0) ** 2)
    return _out(np.maximum(raw, 0.0))


def ub_ap_1_clamped(snr) -> bool:
    snr = np.asarray(snr, dtype=float)
    return bool(np.any(math.e / (2.0 * math.pi) * (snr + 2.0) ** 2 < 1.0))


def _ub2_objective(alpha, snr):
    a = math.log(math.e / (2.0 * math.pi) * snr * snr)
    return (alpha * a - xlogy(2.0 - 2.0 * alpha, 1.0 - alpha) - xlogy(3.0 * alpha, alpha)) * LOG2E


def ub_ap_2(snr, return_alpha=False):
    """Supremum over ``alpha in [0, 1]`` of the second lifted average-power bound."""
    snr_arr = np.atleast_1d(np.asarray(snr, dtype=float))
    vals, alphas = [], []
    for s in snr_arr:
        a_star, v = grid_golden_max(lambda a: float(_ub2_objective(a, s)), 0.0, 1.0)
        vals.append(max(v, 0.0))
        alphas.append(a_star)
    vals = np.array(vals).reshape(np.shape(snr))
    alphas = np.array(alphas).reshape(np.shape(snr))
    if return_alpha:
        return _out(vals), _out(alphas)
    return _out(vals)


def ub_mcoic_asymptote(snr):
    """High-SNR multicarrier bound ``log2(snr^2)``; warns below ``snr = 1``."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 1.0):
        warnings.warn("multicarrier asymptote is only meaningful for snr > 1",
                      AsymptoticOnly, stacklevel=2)
    return _out(np.log2(snr ** 2))


def ub_lift_dtoic(dtoic_rate_per_symbol, W=1.0):
    """Bit/s from a per-symbol discrete-time bound at ``2W`` symbols per second."""
    rate = np.asarray(dtoic_rate_per_symbol, dtype=float)
    if np.any(rate < 0):
        raise ValueError("rate must be nonnegative")
    return _out(2.0 * W * rate)


# --- derived curves ----------------------------------------------------------

def eta_curve(pulse, r_grid):
    """``[(r, eta)]`` for a Nyquist-rate PAM pulse under PAPR ``r``."""
    G = pulses.compute_G(pulse)
    S = pulses.S_nyquist(pulse)
    return [(float(r), papr_eta(G, S, float(r))) for r in r_grid]


def ap_pp_bound(snr, A0_over_sigma):
    """Truncated-exponential S2 bound with the PAPR set to ``A0 / E`` at each SNR."""
    if A0_over_sigma <= 0:
        raise ValueError("A0_over_sigma must be positive")
    snr_arr = np.atleast_1d(np.asarray(snr, dtype=float))
    vals = np.array([lb_te_s2(A0_over_sigma / s, s) for s in snr_arr])
    return _out(vals.reshape(np.shape(snr)))


# --- curve bookkeeping -------------------------------------------------------

BOUND_IDS = (
    "ExpS2", "UnifCos", "TES2", "ExpS2IFS", "UnifS2IFS", "TES2IFS", "GeomS2IFS",
    "UnifPLIFS", "TEPLIFS", "UB1", "UB2", "MCOICAsymptote", "GeneralPAM",
)

PROVENANCE = {
    "ExpS2": "LB: Nyquist-rate PAM, S2 pulse, exponential symbols, entropy-power bound",
    "UnifCos": "LB (peak): Nyquist-rate PAM, spectral-cosine pulse, uniform symbols + DC bias",
    "TES2": "LB (PAPR): Nyquist-rate PAM, S2 pulse, truncated-exponential symbols + DC bias",
    "ExpS2IFS": "LB (ISI-free): S2 pulse at half Nyquist rate, exponential symbols",
    "UnifS2IFS": "LB (ISI-free, peak): S2 pulse at half Nyquist rate, uniform symbols",
    "TES2IFS": "LB (ISI-free, PAPR): S2 pulse at half Nyquist rate, truncated-exponential symbols",
    "GeomS2IFS": "LB (ISI-free): S2 pulse at half Nyquist rate, geometric symbols, spacing optimised",
    "UnifPLIFS": "LB (ISI-free): DC-biased PL pulse, uniform symbols, sup over roll-off",
    "TEPLIFS": "LB (ISI-free, PAPR): DC-biased PL pulse, truncated-exponential symbols, sup over roll-off",
    "UB1": "UB: lifted discrete-time bound log((e/2pi)(snr+2)^2)",
    "UB2": "UB: lifted discrete-time bound, sup over alpha",
    "MCOICAsymptote": "UB (high-SNR asymptote only): multicarrier sphere-packing, log(snr^2)",
    "GeneralPAM": "LB: Nyquist-rate PAM, user pulse flatness and symbol entropy",
}


@dataclass
class BoundCurve:
    bound_id: str
    snr_db: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound_id not in BOUND_IDS:
            raise ValueError(f"unknown bound id {self.bound_id}")
        self.snr_db = np.asarray(self.snr_db, dtype=float)
        self.values = np.asarray(self.values, dtype=float)

    @property
    def provenance(self) -> str:
        return PROVENANCE[self.bound_id]

    @property
    def grid(self):
        return list(zip(self.snr_db.tolist(), self.values.tolist()))


def _constraint(kind: str, r):
    if kind == "ap":
        return dists.AP()
    if kind == "pp":
        return dists.PP()
    if kind == "papr":
        _need(r, "r", "a PAPR bound")
        return dists.PAPR(r)
    raise ValueError(f"unknown constraint kind {kind}")


def evaluate_curve(bound_id: str, snr_db, r: float | None = None,
                   beta: float | None = None, constraint: str = "ap") -> BoundCurve:
    """Evaluate one named bound over an SNR grid given in dB.

    ``constraint`` (``ap`` or ``pp``) picks the symbol law of ``UnifPLIFS``;
    ``beta`` fixes its roll-off instead of optimising it.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    snr = db_to_snr(snr_db)
    meta = {}
    if bound_id == "ExpS2":
        vals = lb_exp_s2(snr)
    elif bound_id == "UnifCos":
        vals = lb_unif_cos(snr)
        meta["x_axis"] = "pnr"
    elif bound_id == "TES2":
        _need(r, "r", bound_id)
        vals = lb_te_s2(r, snr)
        meta["r"] = r
    elif bound_id == "ExpS2IFS":
        vals = lb_ifs_family(dists.AP(), snr)
    elif bound_id == "UnifS2IFS":
        vals = lb_ifs_family(dists.PP(), snr)
        meta["x_axis"] = "pnr"
    elif bound_id == "TES2IFS":
        _need(r, "r", bound_id)
        vals = lb_ifs_family(dists.PAPR(r), snr)
        meta["r"] = r
    elif bound_id == "GeomS2IFS":
        vals = lb_geom_s2_ifs(snr)
    elif bound_id in ("UnifPLIFS", "TEPLIFS"):
        if bound_id == "TEPLIFS":
            cons = _constraint("papr", r)
            meta["r"] = r
        else:
            cons = _constraint(constraint, r)
            if constraint == "pp":
                meta["x_axis"] = "pnr"
        if beta is not None:
            vals = ifs_dc_rate(beta, cons, snr)
            meta["beta"] = beta
        else:
            vals, betas = lb_ifs_dc_curve(cons, snr)
            meta["beta_star"] = betas
    elif bound_id == "UB1":
        vals = ub_ap_1(snr)
        meta["clamped"] = ub_ap_1_clamped(snr)
    elif bound_id == "UB2":
        vals, alphas = ub_ap_2(snr, return_alpha=True)
        meta["alpha_star"] = alphas
    elif bound_id == "MCOICAsymptote":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AsymptoticOnly)
            vals = np.where(snr > 1.0, ub_mcoic_asymptote(np.maximum(snr, 1.0)), np.nan)
        meta["asymptotic"] = True
    else:
        raise ValueError(f"unknown bound id {bound_id}")
    return BoundCurve(bound_id, snr_db, np.atleast_1d(vals), meta)


def _need(value, name, bound_id):
    if value is None:
        raise ValueError(f"{bound_id} needs {name}")
