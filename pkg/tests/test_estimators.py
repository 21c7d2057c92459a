from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURE_SPECTRA, random_atomic
from freeprob.core import AtomicMeasure, MarchenkoPastur, MomentSequence, PointMass, moments_of
from freeprob.errors import DomainError, SolverError
from freeprob.estimators import (
    InfoNoiseParams,
    g2_fixed_point,
    g2_moment_route,
    g2_theta,
    info_noise_forward,
    info_noise_inverse,
    info_noise_support_edge,
)
from freeprob.transforms import dozier_silverstein_mw, stieltjes_atoms, stieltjes_moments

TWO_ATOM = FIXTURE_SPECTRA["two-atom"]
G2_FIXTURES = [FIXTURE_SPECTRA[k] for k in ("two-atom", "three-atom", "skewed")]


def exact_moments(mu: AtomicMeasure, K: int) -> MomentSequence:
    return MomentSequence([sum(Fraction(w) * Fraction(x) ** k for x, w in mu.atoms) for k in range(1, K + 1)])


def close(a, b, tol):
    return all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a, b, strict=True))


# -- parameters ------------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(c=0, sigma2=0.1, order=3), dict(c=1, sigma2=-0.1, order=3),
                                dict(c=1, sigma2=0.1, order=0)])
def test_params_validated(kw):
    with pytest.raises(DomainError):
        InfoNoiseParams(**kw)


def test_input_order_checked():
    with pytest.raises(DomainError):
        info_noise_forward(TWO_ATOM.moments(3), InfoNoiseParams(0.5, 0.1, 5))


# -- forward / inverse maps ------------------------------------------------

@pytest.mark.parametrize("c", [0.25, 0.5, 2.0])
def test_no_noise_is_identity(c):
    g = TWO_ATOM.moments(10)
    assert close(info_noise_forward(g, InfoNoiseParams(c, 0.0, 10)), g, 1e-15)
    gx = exact_moments(TWO_ATOM, 8)
    assert info_noise_forward(gx, InfoNoiseParams(Fraction(c), 0, 8)) == gx


@pytest.mark.parametrize("c", [Fraction(1, 4), Fraction(1, 2), Fraction(2)])
def test_pure_noise_is_marchenko_pastur(c):
    zero = moments_of(PointMass(0), 8, exact=True)
    mp = moments_of(MarchenkoPastur(c), 8, exact=True)
    p = InfoNoiseParams(c, 1, 8)
    assert info_noise_forward(zero, p) == mp
    assert info_noise_inverse(mp, p) == zero


@given(st.fractions(Fraction(1, 10), 3, max_denominator=10), st.fractions(0, 2, max_denominator=10))
@settings(max_examples=25, deadline=None)
def test_exact_roundtrip_and_first_moment(c, s2):
    g = exact_moments(FIXTURE_SPECTRA["three-atom"], 8)
    p = InfoNoiseParams(c, s2, 8)
    w = info_noise_forward(g, p)
    assert info_noise_inverse(w, p) == g
    assert w[0] == g[0] + s2


def test_float_roundtrip():
    rng = np.random.default_rng(8)
    for _ in range(20):
        g = random_atomic(rng, int(rng.integers(1, 6)), lo=0.0, hi=2.0).moments(10)
        p = InfoNoiseParams(float(rng.uniform(0.25, 2)), float(rng.uniform(0, 0.5)), 10)
        assert close(info_noise_inverse(info_noise_forward(g, p), p), g, 1e-10)


@given(st.fractions(Fraction(1, 4), 4, max_denominator=8))
@settings(max_examples=20, deadline=None)
def test_scaling_homogeneity(s):
    g = exact_moments(TWO_ATOM, 7)
    c, s2 = Fraction(1, 2), Fraction(1, 4)
    scaled = MomentSequence([s ** (k + 1) * v for k, v in enumerate(g)])
    lhs = info_noise_forward(scaled, InfoNoiseParams(c, s * s2, 7))
    rhs = info_noise_forward(g, InfoNoiseParams(c, s2, 7))
    assert list(lhs) == [s ** (k + 1) * v for k, v in enumerate(rhs)]


@pytest.mark.parametrize("name", sorted(FIXTURE_SPECTRA))
def test_moment_route_equals_fixed_point(name):
    gamma = FIXTURE_SPECTRA[name]
    c, s2 = 0.5, 0.25
    w = info_noise_forward(gamma.moments(40), InfoNoiseParams(c, s2, 40))
    edge = info_noise_support_edge(gamma, c, s2)
    for z in (-8.0, -10.0, -15.0):
        a = stieltjes_moments(w, z, edge, tol=1e-8)
        assert abs(a - dozier_silverstein_mw(gamma, c, s2, z)) <= 1e-7


# -- support edge ----------------------------------------------------------

def test_edge_without_noise_is_largest_atom():
    assert info_noise_support_edge(TWO_ATOM, 0.5, 0.0) == 3.0


@pytest.mark.parametrize("c", [0.25, 0.5, 1.0])
def test_edge_of_pure_noise(c):
    edge = info_noise_support_edge(AtomicMeasure(((0.0, 1.0),)), c, 1.0)
    assert edge == pytest.approx((1 + c**0.5) ** 2, rel=1e-8)


def test_edge_controls_the_moment_growth():
    # For a density vanishing like a square root at the edge e,
    # m_{k+1} / m_k = e (1 - 3 / (2k) + O(k^-2)).
    c, s2 = 0.5, 0.25
    edge = info_noise_support_edge(TWO_ATOM, c, s2)
    w = info_noise_forward(TWO_ATOM.moments(48), InfoNoiseParams(c, s2, 48))
    ratios = [w[k] / w[k - 1] for k in (11, 23, 47)]
    assert ratios[0] < ratios[1] < ratios[2] < edge
    assert ratios[2] == pytest.approx(edge * (1 - 1.5 / 47), abs=0.02)


# -- G2 --------------------------------------------------------------------

def test_g2_point_mass_two_routes():
    mu = AtomicMeasure(((1.0, 1.0),))
    a = g2_fixed_point(mu, 1.0, -3.0)
    b = g2_moment_route(mu.moments(60), 1.0, -3.0, support_bound=1.0)
    assert a == pytest.approx(2 / 9, abs=1e-14)
    assert abs(a - b) <= 1e-8


def test_g2_moment_route_on_mp_moments():
    m = moments_of(MarchenkoPastur(1), 40)
    assert g2_moment_route(m, 1.0, -10.0, support_bound=1.0) == pytest.approx(1 / 11, abs=1e-12)


def test_g2_small_c_is_plain_stieltjes():
    mu = FIXTURE_SPECTRA["three-atom"]
    plain = stieltjes_atoms(mu, -5.0).real
    assert abs(g2_moment_route(mu.moments(60), 1e-9, -5.0, 1.5) - plain) <= 1e-6
    assert g2_theta(mu, 1e-9, -5.0) == pytest.approx(-5.0, rel=1e-8)
    assert abs(g2_fixed_point(mu, 1e-9, -5.0) - plain) <= 1e-6


@pytest.mark.parametrize("mu", G2_FIXTURES)
@pytest.mark.parametrize("c", [0.1, 0.25, 0.5])
def test_g2_routes_agree(mu, c):
    for z in (-5.0, -10.0):
        a = g2_fixed_point(mu, c, z)
        b = g2_moment_route(mu.moments(60), c, z, support_bound=mu.support_bound(), tol=1e-10)
        assert abs(a - b) <= 1e-6


def test_g2_theta_solves_its_equation():
    mu, c, z = TWO_ATOM, 0.25, -5.0
    t = g2_theta(mu, c, z)
    assert t < 0
    assert abs(t * c * stieltjes_atoms(mu, t).real - (1 - c) + t / z) < 1e-14


def test_g2_errors():
    with pytest.raises(DomainError):
        g2_fixed_point(TWO_ATOM, 0.5, 1.0)
    with pytest.raises(DomainError):
        g2_moment_route(TWO_ATOM.moments(5), 0.5, 0.0, 3.0)
    with pytest.raises(SolverError):
        g2_fixed_point(AtomicMeasure(((1.0, 1.0),)), 2.0, -5.0)
