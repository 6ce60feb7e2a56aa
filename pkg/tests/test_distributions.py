import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from bloic import distributions as D
from bloic.errors import DiscreteDistribution, InvalidRegime, OutOfRange

MU_QUARTER = 3.5935119694474262  # root of m(mu) = 1/4 (brentq at machine precision)


@given(st.floats(1e-6, 700.0))
def test_mean_fraction_matches_integral(mu):
    # m(mu) = E[X]/L for the truncated exponential, by direct quadrature
    if mu > 50:
        ref = 1 / mu - math.exp(-mu) / -math.expm1(-mu)
    else:
        num, _ = integrate.quad(lambda x: x * math.exp(-mu * x), 0, 1)
        den, _ = integrate.quad(lambda x: math.exp(-mu * x), 0, 1)
        ref = num / den
    assert D.mean_fraction(mu) == pytest.approx(ref, rel=1e-9, abs=1e-15)


@given(st.floats(1e-9, 0.5 - 1e-9))
def test_solve_mu_roundtrip(target):
    mu = D.solve_mu(target).mu
    assert mu > 0
    assert D.mean_fraction(mu) == pytest.approx(target, rel=1e-9)


def test_solve_mu_known_value():
    assert D.solve_mu(0.25).mu == pytest.approx(MU_QUARTER, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, 0.5, -0.1, 0.7])
def test_solve_mu_out_of_range(bad):
    with pytest.raises(OutOfRange):
        D.solve_mu(bad)


@given(st.floats(1e-4, 0.49), st.floats(1e-4, 0.49))
def test_solve_mu_monotone(a, b):
    if a < b:
        assert D.solve_mu(a).mu >= D.solve_mu(b).mu


@given(st.floats(0.01, 200.0), st.floats(0.1, 10.0))
def test_truncexp_entropy_matches_quadrature(mu, L):
    d = D.TruncExp(L, mu)
    ref, _ = integrate.quad(lambda x: -d.pdf(x) * math.log(d.pdf(x)), 0, L, limit=200)
    assert D.entropy(d) == pytest.approx(ref, rel=1e-7, abs=1e-9)


@given(st.floats(0.01, 50.0), st.floats(0.1, 10.0))
def test_truncexp_entropy_below_maxent_bounds(mu, L):
    d = D.TruncExp(L, mu)
    h = D.entropy(d)
    assert h <= math.log(L) + 1e-12
    assert h <= 1 + math.log(d.mean) + 1e-12


def test_entropy_closed_forms():
    assert D.entropy(D.Exponential(2.0)) == pytest.approx(1 + math.log(2))
    assert D.entropy(D.Uniform(1.0, 4.0)) == pytest.approx(math.log(3))
    with pytest.raises(DiscreteDistribution):
        D.entropy(D.Geometric(1.0, 1.0))


@given(st.floats(0.1, 20.0))
def test_nu_unit_excursion_is_identity(r):
    assert D.nu_from_papr(r, 1.0) == pytest.approx(r)


def test_nu_spectral_cosine():
    S = 4 / math.pi
    assert D.nu_from_papr(4.0, S) == pytest.approx(8 / (2 * S - 4 * S + 4), rel=1e-12)
    assert D.nu_from_papr(4.0, S) == pytest.approx(5.5039, abs=1e-4)
    with pytest.raises(InvalidRegime):
        D.nu_from_papr(10.0, S)


@given(st.floats(2.0, 30.0), st.floats(1.0, 3.0))
def test_nu_construction_hits_target_papr(r, S):
    # peak S L over mean L/nu + (S - 1) L / 2 must equal r
    try:
        nu = D.nu_from_papr(r, S)
    except InvalidRegime:
        assert r >= 2 * S / (S - 1) - 1e-9
        return
    assert S / (1 / nu + (S - 1) / 2) == pytest.approx(r, rel=1e-10)


@pytest.mark.parametrize("dist", [D.Exponential(1.5), D.Uniform(0.0, 3.0), D.TruncExp(3.0, 2.0),
                                  D.Geometric(0.7, 1.2)])
def test_sample_mean_and_determinism(dist):
    x = D.sample(dist, 7, 200_000)
    assert np.array_equal(x, D.sample(dist, 7, 200_000))
    assert x.mean() == pytest.approx(dist.mean, rel=0.01)
    assert np.all(x >= 0)


def test_geometric_masses():
    g = D.Geometric(0.5, 2.0)
    x, p = g.masses()
    assert p.sum() == pytest.approx(1.0)
    assert np.sum(x * p) == pytest.approx(2.0, rel=1e-9)
    assert g.ratio == pytest.approx(0.8)


def test_constraint_types():
    c = D.PAPR(3.0, energy=2.0)
    assert c.peak == 6.0
    with pytest.raises(ValueError):
        D.PAPR(0.0)
