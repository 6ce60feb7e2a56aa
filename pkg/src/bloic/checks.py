"""Self-checks shared by ``bloic validate`` and the test-suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import distributions as dists
from . import mi as mi_mod
from . import pulses
from . import simulate as sim


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: float
    tol: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} {self.name}: measured={self.measured:.9g} "
                f"expected={self.expected:.9g} tol={self.tol:.3g}")


def _close(name, measured, expected, tol):
    return Check(name, measured, expected, tol, abs(measured - expected) <= tol)


def _at_most(name, measured, limit, tol=0.0):
    return Check(name, measured, limit, tol, measured <= limit + tol)


def pulse_suite() -> list[Check]:
    out = [
        _close("G sinc", pulses.compute_G(pulses.sinc_pulse()), 1.0, 1e-4),
        _close("G s2", pulses.compute_G(pulses.s2_pulse()), math.exp(-2.0), 1e-4),
        _close("G sc", pulses.compute_G(pulses.sc_pulse()), 0.25, 1e-4),
        _close("S_N s2", pulses.S_nyquist(pulses.s2_pulse()), 1.0, 1e-4),
        _close("S_N sc", pulses.S_nyquist(pulses.sc_pulse()), 4.0 / math.pi, 1e-4),
    ]
    s_sinc = pulses.S_nyquist(pulses.sinc_pulse())
    out.append(Check("S_N sinc divergent", s_sinc, math.inf, 0.0, math.isinf(s_sinc)))
    for label, p, spacing in [("s2 x2 at 1/W", pulses.s2_pulse(gain=2.0), 1.0),
                              ("pl 0.3 at T0", pulses.pl_pulse(0.3), None),
                              ("sinc at 1/2W", pulses.sinc_pulse(), 0.5)]:
        ok = pulses.verify_nyquist(p, spacing)
        out.append(Check(f"Nyquist {label}", float(ok), 1.0, 0.0, ok))
    return out


def construction_suite(seed: int = 0, n_symbols: int = 10_000) -> list[Check]:
    out = []
    energy = 1.0
    tr = sim.nyquist_s2_exponential(energy).waveform(n_symbols, seed=seed)
    rep = sim.check_admissibility(tr, dists.AP(energy))
    out.append(_close("S2 Nyquist exponential average power (rel)", rep.avg_power / energy, 1.0, 0.01))
    out.append(Check("S2 Nyquist exponential nonnegative", rep.min_value, 0.0, sim.NONNEG_TOL,
                     rep.nonnegative))

    beta = 0.5
    c = sim.ifs_pl_dc(beta, dists.AP(energy))
    tr = c.waveform(n_symbols, seed=seed)
    rep = sim.check_admissibility(tr, dists.AP(energy))
    out.append(_close(f"PL({beta}) DC construction mean / (S L/2)", rep.avg_power / c.dc, 1.0, 0.01))
    out.append(Check(f"PL({beta}) DC construction nonnegative", rep.min_value, 0.0,
                     sim.NONNEG_TOL, rep.nonnegative))
    out.append(_at_most(f"PL({beta}) ISI-free sampling error", sim.isi_free_sampling_check(tr),
                        1e-9))

    tr = sim.ifs_s2(dists.AP(energy)).waveform(min(n_symbols, 2000), seed=seed)
    out.append(_at_most("S2 x2 ISI-free sampling error", sim.isi_free_sampling_check(tr), 1e-9))

    r = 2.5
    for p in (pulses.s2_pulse(), pulses.sc_pulse()):
        tr = sim.nyquist_dc(p, dists.PAPR(r, energy)).waveform(n_symbols, seed=seed)
        rep = sim.check_admissibility(tr, dists.PAPR(r, energy))
        out.append(_at_most(f"{p.label} PAPR {r} peak / E", rep.peak_value / energy,
                            r * (1 + sim.POWER_RTOL)))
        out.append(Check(f"{p.label} PAPR {r} nonnegative", rep.min_value, 0.0,
                         sim.NONNEG_TOL, rep.nonnegative))

    found = sim.find_sinc_counterexample(n_seeds=100)
    out.append(Check("sinc PAM goes negative within 100 seeds",
                     math.nan if found is None else found[1], 0.0, sim.NONNEG_TOL,
                     found is not None))
    return out


EPI_CASES = (
    ("exponential", 1.0), ("exponential", 3.0), ("exponential", 10.0),
    ("uniform", 3.0), ("truncexp", 3.0),
)


def epi_law(name: str, snr: float):
    """Symbol law at amplitude ``snr`` (unit noise) for the EPI comparison."""
    if name == "exponential":
        return dists.Exponential(snr)
    if name == "uniform":
        return dists.Uniform(0.0, 2.0 * snr)
    if name == "truncexp":
        # PAPR 3 truncated exponential with mean snr
        mu = dists.solve_mu(1.0 / 3.0).mu
        return dists.TruncExp(3.0 * snr, mu)
    raise ValueError(name)


def epi_check(name: str, snr: float, n: int = 200_000, seed: int = 0) -> Check:
    law = epi_law(name, snr)
    lower = mi_mod.epi_lower(dists.entropy(law), 1.0)
    est = mi_mod.mc_mi_estimate(law, 1.0, n, seed)
    return Check(f"EPI {name} snr={snr:g}: lower <= MC + 3 se", lower, est.mi,
                 3.0 * est.err_estimate, lower <= est.mi + 3.0 * est.err_estimate)


def epi_suite(seed: int = 0) -> list[Check]:
    return [epi_check(name, snr, seed=seed) for name, snr in EPI_CASES]


SUITES = {"pulses": pulse_suite, "appendices": construction_suite, "epi": epi_suite}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in run_suite(key, seed)]
    if name == "pulses":
        return pulse_suite()
    return SUITES[name](seed=seed)
