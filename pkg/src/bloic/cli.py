"""Command-line front end: ``bloic {pulse,bound,curve,figure,validate,gap,eta}``."""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds as B
from . import checks
from . import pulses
from .errors import InvalidRegime, UnknownFigure

DEFAULT_GRID = (-8.0, 22.0, 0.25)
FIGURE_GRIDS = {"fig3": (0.0, 12.0), "fig4": (-10.0, 0.0)}
FIG5_BETAS = (0.05, 0.1, 0.2, 0.4, 0.7, 1.0)
FIG8_RATIOS = (2.0, 2.5, 3.0, 4.0, 6.0)
FIG9_R = (1.0, 9.0, 0.01)
FIGURES = tuple(f"fig{k}" for k in range(2, 10))


@dataclass
class RunConfig:
    command: str
    snr_start_db: float | None = None
    snr_stop_db: float | None = None
    snr_step_db: float = DEFAULT_GRID[2]
    r: float | None = None
    a0_db: float = 10.0
    pulse: str = "s2"
    beta: float | None = None
    seed: int = 0
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def grid(self, start=DEFAULT_GRID[0], stop=DEFAULT_GRID[1]) -> np.ndarray:
        lo = start if self.snr_start_db is None else self.snr_start_db
        hi = stop if self.snr_stop_db is None else self.snr_stop_db
        if self.snr_step_db <= 0:
            raise ValueError("--snr-step-db must be positive")
        if hi < lo:
            raise ValueError("empty SNR grid")
        n = int(math.floor((hi - lo) / self.snr_step_db + 1e-9)) + 1
        return lo + self.snr_step_db * np.arange(n)


@dataclass
class Table:
    """Columns of one CSV output with per-column provenance."""

    x_name: str
    x: np.ndarray
    columns: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    header: list = field(default_factory=list)

    def add(self, name, values, note):
        if name in self.columns:
            raise ValueError(f"duplicate column {name}")
        self.columns[name] = np.asarray(values, dtype=float)
        self.notes[name] = note

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        for name, note in self.notes.items():
            buf.write(f"# {name}: {note}\n")
        buf.write(",".join([self.x_name, *self.columns]) + "\n")
        for k, xv in enumerate(self.x):
            row = [xv, *(col[k] for col in self.columns.values())]
            buf.write(",".join("%.9g" % v for v in row) + "\n")
        return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _pulse_from(cfg: RunConfig):
    if cfg.pulse == "sinc":
        return pulses.sinc_pulse()
    if cfg.pulse == "s2":
        return pulses.s2_pulse()
    if cfg.pulse == "sc":
        return pulses.sc_pulse()
    if cfg.pulse == "pl":
        if cfg.beta is None:
            raise ValueError("--pulse pl needs --beta")
        return pulses.pl_pulse(cfg.beta)
    raise ValueError(cfg.pulse)


def _add_bound(table: Table, bound_id, name=None, **kw):
    curve = B.evaluate_curve(bound_id, table.x, **kw)
    note = B.PROVENANCE[bound_id]
    params = ", ".join(f"{k}={v:g}" for k, v in kw.items() if isinstance(v, (int, float)))
    if params:
        note = f"{note} [{params}]"
    table.add(name or bound_id, curve.values, note)
    return curve


# --- figures -----------------------------------------------------------------

def _fig_ap(cfg, which):
    start, stop = FIGURE_GRIDS.get(which, DEFAULT_GRID[:2])
    t = Table("snr_dB", cfg.grid(start, stop))
    for bid in ("ExpS2", "ExpS2IFS", "UnifPLIFS", "GeomS2IFS"):
        _add_bound(t, bid)
    if which == "fig2":
        _add_bound(t, "UB1")
        _add_bound(t, "UB2")
        _add_bound(t, "MCOICAsymptote")
    return t


def _fig5(cfg):
    t = Table("snr_dB", cfg.grid())
    for b in FIG5_BETAS:
        _add_bound(t, "UnifPLIFS", f"UnifPLIFS[beta={b:g}]", beta=b)
    return t


def _fig6(cfg):
    t = Table("pnr_dB", cfg.grid())
    _add_bound(t, "UnifCos")
    _add_bound(t, "UnifS2IFS")
    _add_bound(t, "UnifPLIFS", "UnifPLIFS[pp]", constraint="pp")
    return t


def _fig7(cfg):
    r = 2.5 if cfg.r is None else cfg.r
    t = Table("snr_dB", cfg.grid())
    _add_bound(t, "TES2", f"TES2[r={r:g}]", r=r)
    _add_bound(t, "TES2IFS", f"TES2IFS[r={r:g}]", r=r)
    _add_bound(t, "TEPLIFS", f"TEPLIFS[r={r:g}]", r=r)
    _add_bound(t, "UB1")
    _add_bound(t, "UB2")
    return t


def _fig8(cfg):
    t = Table("snr_dB", cfg.grid())
    for r in FIG8_RATIOS:
        _add_bound(t, "TES2", f"TES2[r={r:g}]", r=r)
    _add_bound(t, "ExpS2", "TES2[r=inf]")
    a0 = 10.0 ** (cfg.a0_db / 10.0)
    t.add(f"TES2[A0={cfg.a0_db:g}dB]", B.ap_pp_bound(B.db_to_snr(t.x), a0),
          B.PROVENANCE["TES2"] + f" [r = A0/snr, A0 = {cfg.a0_db:g} dB]")
    return t


def _fig9(cfg):
    lo, hi, step = FIG9_R
    r = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    t = Table("r", r)
    for p in (pulses.s2_pulse(), pulses.sc_pulse()):
        t.add(f"eta[{p.label}]", _eta_column(p, r),
              f"coefficient of snr^2 in the PAPR-limited Nyquist PAM bound, {p.label} pulse")
    return t


def _eta_column(pulse, r_grid):
    G = pulses.compute_G(pulse)
    S = pulses.S_nyquist(pulse)
    out = []
    for r in r_grid:
        try:
            out.append(B.papr_eta(G, S, float(r)))
        except InvalidRegime:
            out.append(math.nan)
    return np.array(out)


def make_figure(fig_id: str, cfg: RunConfig) -> Table:
    if fig_id not in FIGURES:
        raise UnknownFigure(fig_id)
    if fig_id in ("fig2", "fig3", "fig4"):
        t = _fig_ap(cfg, fig_id)
    else:
        t = {"fig5": _fig5, "fig6": _fig6, "fig7": _fig7, "fig8": _fig8, "fig9": _fig9}[fig_id](cfg)
    t.header = [f"figure: {fig_id}", "units: bit/s/Hz; x axis in dB of E/sqrt(N0 W) (peak for pnr)"]
    return t


# --- commands ----------------------------------------------------------------

def cmd_pulse(cfg):
    p = _pulse_from(cfg)
    m = pulses.pulse_metrics(p)
    lines = [f"pulse={p.label}", f"G={m.gain_metric:.9g}", f"tau={m.tau:.9g}",
             f"S={m.excursion:.9g}", f"t_star={m.t_star:.9g}",
             f"tail_bound={m.tail_bound:.3g}", f"divergent={m.divergent}"]
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_bound(cfg):
    bid = cfg.extra["bound_id"]
    snr_db = cfg.extra["snr_db"]
    curve = B.evaluate_curve(bid, [snr_db], r=cfg.r, beta=cfg.beta,
                             constraint=cfg.extra.get("constraint", "ap"))
    _emit(f"{bid} snr_dB={snr_db:g} value={curve.values[0]:.9g} bit/s/Hz\n", cfg.out)
    return 0


def cmd_curve(cfg):
    t = Table("snr_dB", cfg.grid())
    for bid in cfg.extra["bound_ids"]:
        _add_bound(t, bid, r=cfg.r, beta=cfg.beta, constraint=cfg.extra.get("constraint", "ap"))
    _emit(t.to_csv(), cfg.out)
    return 0


def cmd_figure(cfg):
    _emit(make_figure(cfg.extra["fig_id"], cfg).to_csv(), cfg.out)
    return 0


def gap_at(snr_db: float):
    """Horizontal (dB) and vertical (bit/s/Hz) gap between Exp-S2 and UB1."""
    s = float(B.db_to_snr(snr_db))
    rate = B.lb_exp_s2(s)
    bits = B.ub_ap_1(s) - rate
    # SNR at which UB1 reaches the same rate
    s_u = math.sqrt(2.0 * math.pi / math.e * (2.0 ** rate)) - 2.0
    db = snr_db - 10.0 * math.log10(s_u) if s_u > 0 else math.inf
    return db, bits


def cmd_gap(cfg):
    grid = cfg.grid(DEFAULT_GRID[0], 60.0)
    lines = []
    for x in (grid[0], grid[-1]):
        db, bits = gap_at(x)
        lines.append(f"snr_dB={x:g} gap_dB={db:.6g} gap_bits={bits:.6g}")
    lines.append(f"limit gap_dB={10 * math.log10(math.e):.6g} gap_bits={2 * math.log2(math.e):.6g}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_eta(cfg):
    r = np.arange(1.0, 9.0 + 1e-9, 0.01) if cfg.r is None else np.array([cfg.r])
    t = Table("r", r)
    names = cfg.extra.get("pulses") or ["s2", "sc"]
    for name in names:
        p = _pulse_from(RunConfig("eta", pulse=name, beta=cfg.beta))
        t.add(f"eta[{p.label}]", _eta_column(p, r),
              f"coefficient of snr^2 in the PAPR-limited Nyquist PAM bound, {p.label} pulse")
    _emit(t.to_csv(), cfg.out)
    return 0


def cmd_validate(cfg):
    results = checks.run_suite(cfg.extra["suite"], cfg.seed)
    _emit("\n".join(c.line() for c in results) + "\n", cfg.out)
    return 0 if all(c.passed for c in results) else 1


COMMANDS = {"pulse": cmd_pulse, "bound": cmd_bound, "curve": cmd_curve, "figure": cmd_figure,
            "validate": cmd_validate, "gap": cmd_gap, "eta": cmd_eta}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--snr-start-db", type=float)
    common.add_argument("--snr-stop-db", type=float)
    common.add_argument("--snr-step-db", type=float, default=DEFAULT_GRID[2])
    common.add_argument("--r", type=float, help="peak-to-average power ratio")
    common.add_argument("--a0-db", type=float, default=10.0,
                        help="peak amplitude above noise for the AP-PP curve")
    common.add_argument("--pulse", choices=["sinc", "s2", "sc", "pl"], default="s2")
    common.add_argument("--beta", type=float, help="PL roll-off")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv"], default="csv")

    ap = argparse.ArgumentParser(prog="bloic", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("pulse", parents=[common], help="pulse metrics G and S")
    p = sub.add_parser("bound", parents=[common], help="one bound at one SNR")
    p.add_argument("bound_id", choices=B.BOUND_IDS[:-1])
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--constraint", choices=["ap", "pp"], default="ap")
    p = sub.add_parser("curve", parents=[common], help="bounds over an SNR grid as CSV")
    p.add_argument("bound_ids", nargs="+", choices=B.BOUND_IDS[:-1])
    p.add_argument("--constraint", choices=["ap", "pp"], default="ap")
    p = sub.add_parser("figure", parents=[common], help="data behind one figure as CSV")
    p.add_argument("fig_id")
    p = sub.add_parser("validate", parents=[common], help="run self-check suites")
    p.add_argument("--suite", choices=["pulses", "appendices", "epi", "all"], default="all")
    sub.add_parser("gap", parents=[common], help="Exp-S2 vs UB1 gap")
    p = sub.add_parser("eta", parents=[common], help="PAPR coefficient eta versus r")
    p.add_argument("--pulses", nargs="+", choices=["s2", "sc", "pl"])
    return ap


def config_from_args(ns) -> RunConfig:
    known = {"command", "snr_start_db", "snr_stop_db", "snr_step_db", "r", "a0_db",
             "pulse", "beta", "seed", "out"}
    d = vars(ns)
    extra = {k: v for k, v in d.items() if k not in known and k != "format"}
    return RunConfig(**{k: d[k] for k in known}, extra=extra)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except UnknownFigure as exc:
        print(f"unknown figure {exc}; choose from {', '.join(FIGURES)}", file=sys.stderr)
        return 2
    except (ValueError, InvalidRegime) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
