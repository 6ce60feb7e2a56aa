import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from bloic import distributions as D
from bloic import mi as M

# +-sigma binary input at unit noise, by 30-digit adaptive quadrature of
# ln 2 - E[ln(1 + exp(-2Y))], Y ~ N(1, 1)
BPSK_MI = 0.336830820346831612


def test_bpsk_oracle():
    inp = M.DiscreteInput(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    res = M.mi_discrete_gaussian(inp, 1.0)
    assert res.mi == pytest.approx(BPSK_MI, abs=1e-9)
    assert res.method is M.Method.QUADRATURE


def test_bpsk_monte_carlo_agrees():
    inp = M.DiscreteInput(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    res = M.mc_mi_estimate(inp, 1.0, 400_000, seed=0)
    assert abs(res.mi - BPSK_MI) < 4 * res.err_estimate


def test_scattered_and_lattice_paths_agree():
    pts = np.array([0.0, 1.0, 2.0, 3.0])
    p = np.array([0.4, 0.3, 0.2, 0.1])
    lattice = M.mi_discrete_gaussian(M.DiscreteInput(pts, p), 0.7).mi
    jitter = pts + np.array([0, 1e-7, 0, 0])
    scattered = M.mi_discrete_gaussian(M.DiscreteInput(jitter, p), 0.7).mi
    assert lattice == pytest.approx(scattered, abs=1e-6)


def test_far_apart_points_give_full_entropy():
    inp = M.DiscreteInput(np.array([0.0, 100.0]), np.array([0.5, 0.5]))
    assert M.mi_discrete_gaussian(inp, 1.0).mi == pytest.approx(math.log(2), abs=1e-12)


def test_single_point_zero():
    assert M.mi_discrete_gaussian(M.DiscreteInput(np.array([1.0]), np.array([1.0])), 1.0).mi == 0


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6), st.floats(0.05, 5.0),
       st.floats(0.1, 4.0))
def test_mi_between_zero_and_entropy(weights, step, sigma2):
    p = np.array(weights) / np.sum(weights)
    inp = M.DiscreteInput(step * np.arange(p.size), p)
    mi = M.mi_discrete_gaussian(inp, sigma2).mi
    assert 0.0 <= mi <= inp.entropy() + 1e-12


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_mi_increasing_in_separation(a, b):
    a, b = sorted((a, b))
    pa = M.mi_discrete_gaussian(M.DiscreteInput(np.array([0.0, a]), np.array([0.5, 0.5])), 1.0).mi
    pb = M.mi_discrete_gaussian(M.DiscreteInput(np.array([0.0, b]), np.array([0.5, 0.5])), 1.0).mi
    assert pa <= pb + 1e-10


def test_geometric_quadrature_vs_monte_carlo():
    g = D.Geometric(1.0, 3.0)
    q = M.geometric_mi(1.0, 3.0, 1.0)
    mc = M.mc_mi_estimate(g, 1.0, 200_000, seed=1)
    assert abs(q - mc.mi) < 4 * mc.err_estimate


def test_geometric_optimum_is_stationary():
    E = 2.0
    l_star, best = M.optimize_geometric_l(E, 1.0)
    for f in (0.9, 1.1):
        assert M.geometric_mi(l_star * f, E, 1.0) <= best + 1e-9


@pytest.mark.parametrize("snr_db", [-5.0, 0.0, 5.0])
def test_geometric_beats_epi_exponential(snr_db):
    s = 10 ** (snr_db / 10)
    _, best = M.optimize_geometric_l(s, 1.0)
    assert best >= M.epi_lower(D.entropy(D.Exponential(s)), 1.0)


def test_epi_lower_formula():
    assert M.epi_lower(0.0, 1.0) == pytest.approx(0.5 * math.log1p(1 / (2 * math.pi * math.e)))
    with pytest.raises(ValueError):
        M.epi_lower(0.0, 0.0)


@pytest.mark.parametrize("dist", [D.Exponential(2.0), D.Uniform(0.0, 3.0), D.TruncExp(4.0, 2.5),
                                  D.Geometric(0.8, 1.5)])
def test_output_logpdf_normalised_and_matches_convolution(dist):
    y = np.linspace(-12, 60, 40001)
    dens = np.exp(M.output_logpdf(dist, y, 1.0))
    assert np.trapezoid(dens, y) == pytest.approx(1.0, abs=1e-6)
    if isinstance(dist, D.Geometric):
        x, p = dist.masses()
        ref = (p[None, :] * np.exp(-0.5 * (y[:, None] - x) ** 2)).sum(axis=1) / math.sqrt(2 * math.pi)
    else:
        top = getattr(dist, "hi", getattr(dist, "support", np.inf))

        def conv(yy):
            # the Gaussian factor is negligible beyond 15 sigma
            lo, hi = max(0.0, yy - 15.0), min(top, yy + 15.0)
            if lo >= hi:
                return 0.0
            return integrate.quad(lambda x: dist.pdf(x) * math.exp(-0.5 * (yy - x) ** 2),
                                  lo, hi, epsabs=1e-14)[0]

        ref = np.array([conv(yy) for yy in y[::1000]])
        ref /= math.sqrt(2 * math.pi)
        dens = dens[::1000]
    assert np.allclose(dens, ref, rtol=1e-6, atol=1e-12)


def test_output_logpdf_far_tails_finite():
    for dist in (D.Exponential(1.0), D.Uniform(0.0, 1.0), D.TruncExp(2.0, 3.0)):
        v = M.output_logpdf(dist, np.array([-60.0, 80.0]), 1.0)
        assert np.all(np.isfinite(v))


def test_mc_is_deterministic_and_validates():
    a = M.mc_mi_estimate(D.Exponential(1.0), 1.0, 10_000, seed=5)
    b = M.mc_mi_estimate(D.Exponential(1.0), 1.0, 10_000, seed=5)
    assert a == b
    with pytest.raises(ValueError):
        M.mc_mi_estimate(D.Exponential(1.0), 1.0, 100, seed=0)


def test_discrete_input_validation():
    with pytest.raises(ValueError):
        M.DiscreteInput(np.array([0.0, 1.0]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        M.DiscreteInput(np.array([1.0, 0.0]), np.array([0.5, 0.5]))
