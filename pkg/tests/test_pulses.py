import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from bloic import pulses as P
from bloic.errors import DivergentMetric

betas = st.floats(min_value=0.02, max_value=1.0)

# S at the PL Nyquist spacing, frozen from this implementation and checked
# below against a brute-force direct sum.
S_BETA_FROZEN = {0.01: 3.8942695762, 0.05: 2.8697742102, 0.1: 2.4288294081,
                 0.2: 1.9888544441, 0.3: 1.7245564371, 0.4: 1.5234367474,
                 0.7: 1.1564203406, 1.0: 1.0}


def brute_force_S(pulse, tau, t, n=2_000_000):
    i = np.arange(-n, n + 1)
    return float(np.abs(P.eval_time(pulse, t - i * tau)).sum())


def test_table_constants():
    assert P.compute_G(P.sinc_pulse()) == pytest.approx(1.0, abs=1e-10)
    assert P.compute_G(P.s2_pulse()) == pytest.approx(math.exp(-2), abs=1e-10)
    assert P.compute_G(P.sc_pulse()) == pytest.approx(0.25, abs=1e-10)
    assert P.S_nyquist(P.s2_pulse()) == pytest.approx(1.0, abs=1e-9)
    assert P.S_nyquist(P.sc_pulse()) == pytest.approx(4 / math.pi, abs=1e-9)
    assert math.isinf(P.S_nyquist(P.sinc_pulse()))


def test_sinc_train_raises_divergent():
    with pytest.raises(DivergentMetric):
        P.abs_pulse_train(P.sinc_pulse(), 0.0, 0.5)


@given(betas)
def test_G_pl_closed_form(beta):
    # flat top then a linear ramp to zero over the outer 2 beta/(1+beta) of the band
    assert P.compute_G(P.pl_pulse(beta)) == pytest.approx(math.exp(-4 * beta / (1 + beta)),
                                                          rel=1e-8)


@given(st.floats(0.5, 4.0), st.sampled_from(["s2", "sc", "sinc"]))
def test_G_scale_invariant_in_bandwidth(W, kind):
    p = P.Pulse(kind, bandwidth=W)
    ref = P.Pulse(kind)
    assert P.compute_G(p) == pytest.approx(P.compute_G(ref), rel=1e-9)


@given(betas)
def test_G_at_most_one(beta):
    # Jensen: mean log of a normalised spectrum cannot exceed zero
    assert P.compute_G(P.pl_pulse(beta)) <= 1.0 + 1e-12


def test_sc_time_closed_form():
    t = np.linspace(-3, 3, 601)
    t = t[np.abs(np.abs(t) - 0.25) > 1e-6]
    closed = 2 * np.cos(2 * np.pi * t) / (np.pi * (1 - 16 * t ** 2))
    assert np.allclose(P.eval_time(P.sc_pulse(), t), closed, atol=1e-12)
    assert P.eval_time(P.sc_pulse(), 0.25) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("pulse", [P.sinc_pulse(), P.s2_pulse(), P.sc_pulse(), P.pl_pulse(0.3),
                                   P.pl_pulse(1.0)])
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_spectrum_matches_time_domain(pulse):
    # G(f) = 2 int_0^inf g(t) cos(2 pi f t) dt by Fourier-weighted quadrature
    for f in (0.2, 0.45, 0.8):
        val, _ = integrate.quad(lambda t: P.eval_time(pulse, t), 0, np.inf, weight="cos",
                                wvar=2 * math.pi * f, limlst=200)
        # the 1/t sinc tail converges slowly under this rule
        tol = 5e-5 if pulse.kind is P.PulseKind.SINC else 1e-6
        assert 2 * val == pytest.approx(P.eval_freq(pulse, f), abs=tol)


def test_spectrum_zero_out_of_band():
    for p in (P.sinc_pulse(), P.s2_pulse(), P.sc_pulse(), P.pl_pulse(0.5)):
        assert P.eval_freq(p, 1.0001) == 0.0
        assert np.all(P.eval_freq(p, np.linspace(-1, 1, 101)) >= 0)


@given(betas, st.integers(-50, 50))
def test_pl_nyquist_property(beta, n):
    p = P.pl_pulse(beta)
    assert P.eval_time(p, n * p.T0) == pytest.approx(1.0 if n == 0 else 0.0, abs=1e-12)


def test_verify_nyquist():
    assert P.verify_nyquist(P.s2_pulse(gain=2.0), 1.0)
    assert P.verify_nyquist(P.pl_pulse(0.25))
    assert P.verify_nyquist(P.sinc_pulse())
    assert not P.verify_nyquist(P.s2_pulse(gain=2.0), 0.5)
    with pytest.raises(ValueError):
        P.verify_nyquist(P.sc_pulse())


@given(st.floats(-20, 20), st.sampled_from([P.s2_pulse(), P.sc_pulse(), P.pl_pulse(0.4)]))
def test_pulses_are_even(t, p):
    assert P.eval_time(p, t) == pytest.approx(P.eval_time(p, -t), abs=1e-15)


@pytest.mark.parametrize("beta", [0.1, 0.3, 0.7])
def test_S_beta_against_direct_sum(beta):
    p = P.pl_pulse(beta)
    exc = P.excursion(p, p.T0)
    assert exc.value == pytest.approx(brute_force_S(p, p.T0, exc.t_star), abs=2e-6)
    # nothing on a dense grid beats the reported maximum
    grid = np.linspace(0, p.T0, 257)
    assert np.max(P.abs_pulse_train(p, grid, p.T0)) <= exc.value + 1e-9


@pytest.mark.parametrize("beta,value", sorted(S_BETA_FROZEN.items()))
def test_S_beta_frozen(beta, value):
    assert P.S_beta(P.pl_pulse(beta)) == pytest.approx(value, abs=1e-9)


def test_S_beta_decreasing_in_beta():
    vals = [P.S_beta(P.pl_pulse(b)) for b in (0.02, 0.1, 0.3, 0.6, 1.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_S_converged_in_terms():
    p = P.pl_pulse(0.2)
    a = P.excursion(p, p.T0).value
    b = P.excursion(p, p.T0, n_terms=2 * P.default_terms(p, p.T0)).value
    assert abs(a - b) < 1e-7


def test_tail_bound_covers_truncation():
    p = P.pl_pulse(0.3)
    t = 0.17
    direct, bound = P.abs_pulse_train(p, t, p.T0, n_terms=4096, return_bound=True)
    ref = brute_force_S(p, p.T0, t)
    assert abs(direct[0] - ref) <= bound[0]


def test_S_at_least_one_for_unit_dc_pulses():
    # sum_i g(t - i T) = 1 for these normalisations, so the absolute sum is >= 1
    for p in (P.s2_pulse(), P.sc_pulse(), P.pl_pulse(0.5)):
        tau = p.T0 if p.kind is P.PulseKind.PL else 0.5
        assert P.compute_S(p, tau) >= 1.0 - 1e-9


def test_pulse_metrics_bundle():
    m = P.pulse_metrics(P.sc_pulse())
    assert m.gain_metric == pytest.approx(0.25)
    assert m.excursion == pytest.approx(4 / math.pi, abs=1e-9)
    assert m.t_star == pytest.approx(0.0, abs=1e-6)
    assert not m.divergent
    assert P.pulse_metrics(P.sinc_pulse()).divergent


def test_pulse_validation():
    with pytest.raises(ValueError):
        P.pl_pulse(0.0)
    with pytest.raises(ValueError):
        P.pl_pulse(1.5)
    with pytest.raises(ValueError):
        P.Pulse("s2", beta=0.2)
    with pytest.raises(ValueError):
        P.s2_pulse(W=-1)
    with pytest.raises(AttributeError):
        P.s2_pulse().T0
