from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import boxed_nc_sum, nc_moment_sum, rationals
from freeprob.core import CumulantSequence, MomentSequence
from freeprob.errors import ResourceError
from freeprob.ncpart import catalan
from freeprob.series import (
    FormalSeries,
    boxed_convolve,
    boxed_convolve_bruteforce,
    cumulants_to_moments,
    id_series,
    moeb,
    moments_to_cumulants,
    scale_coeff,
    zeta,
)


def close(a, b, tol):
    return all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a, b, strict=True))


# -- special series --------------------------------------------------------

def test_special_series():
    assert zeta(4).coef == (1, 1, 1, 1)
    assert id_series(3).coef == (1, 0, 0)
    assert moeb(4).coef == (1, -1, 2, -5)


def test_moeb_is_signed_catalan():
    assert list(moeb(10, exact=True)) == [(-1) ** (n - 1) * catalan(n - 1) for n in range(1, 11)]


def test_moeb_solves_zeta_inverse_by_nc_sum():
    # Solve zeta ⊠ x = id one coefficient at a time with the NC sum as the only tool.
    K = 7
    x = []
    one = zeta(K, exact=True)
    target = id_series(K, exact=True)
    for n in range(1, K + 1):
        trial = x + [Fraction(0)]
        base = boxed_nc_sum(list(one), trial, n)
        # x_n enters only through the all-singletons partition (K = one block of size n).
        x.append(target[n - 1] - base)
    assert x == list(moeb(K, exact=True))


@pytest.mark.parametrize("K", [1, 3, 6])
def test_zeta_box_moeb_is_id(K):
    assert boxed_convolve_bruteforce(zeta(K, True), moeb(K, True)) == id_series(K, True)
    assert boxed_convolve(zeta(K, True), moeb(K, True)) == id_series(K, True)


# -- scaling ---------------------------------------------------------------

def test_scale_coeff_examples():
    assert scale_coeff((1, 1, 1), 2).coef == (2, 4, 8)
    f = FormalSeries([0.3, -1.2, 5.0])
    assert scale_coeff(f, 1) == f
    c0 = Fraction(3, 7)
    assert scale_coeff(zeta(3, True), c0, -1).coef == (1, c0, c0 * c0)


@given(st.lists(rationals(), min_size=1, max_size=7), st.lists(rationals(), min_size=7, max_size=7),
       rationals(-3, 3))
@settings(max_examples=30, deadline=None)
def test_scaling_law(f, g, c):
    K = len(f)
    g = g[:K]
    # (c f) is the scalar multiple; each NC term picks up |pi| + |K(pi)| = n + 1 factors of c.
    lhs = boxed_convolve([c * x for x in f], [c * x for x in g])
    rhs = scale_coeff(boxed_convolve(f, g), c, exponent_offset=1)
    assert lhs == rhs


@given(st.lists(rationals(), min_size=1, max_size=8), rationals(-3, 3))
@settings(max_examples=30, deadline=None)
def test_box_with_scaled_identity(f, c):
    K = len(f)
    cid = FormalSeries([c] + [Fraction(0)] * (K - 1))
    assert boxed_convolve(f, cid) == scale_coeff(f, c)


# -- boxed convolution -----------------------------------------------------

def test_zeta_box_zeta():
    assert boxed_convolve_bruteforce(zeta(2), zeta(2)).coef == (1, 2)


@given(st.lists(rationals(), min_size=1, max_size=8), st.lists(rationals(), min_size=8, max_size=8))
@settings(max_examples=40, deadline=None)
def test_fast_box_equals_nc_sum_exactly(f, g):
    K = len(f)
    g = g[:K]
    fast = boxed_convolve(f, g)
    assert list(fast) == [boxed_nc_sum(f, g, n) for n in range(1, K + 1)]
    assert fast == boxed_convolve_bruteforce(f, g)


@given(st.lists(rationals(), min_size=1, max_size=8), st.lists(rationals(), min_size=8, max_size=8))
@settings(max_examples=40, deadline=None)
def test_box_commutes(f, g):
    g = g[: len(f)]
    assert boxed_convolve(f, g) == boxed_convolve(g, f)


def test_bruteforce_size_guard():
    with pytest.raises(ResourceError):
        boxed_convolve_bruteforce(zeta(13), zeta(13))


# -- moment/cumulant maps --------------------------------------------------

def test_delta_one():
    assert cumulants_to_moments((1, 0, 0, 0)).m == (1, 1, 1, 1)
    assert moments_to_cumulants((1, 1, 1)).alpha == (1, 0, 0)


def test_all_ones_give_catalan():
    assert cumulants_to_moments((1, 1, 1, 1, 1)).m == (1, 2, 5, 14, 42)


def test_pairings():
    assert cumulants_to_moments((0, 1, 0, 0)).m == (0, 1, 0, 2)


def test_mp_cumulants_recovered():
    c = 0.5
    a = moments_to_cumulants((1, 1 + c, 1 + 3 * c + c * c))
    assert list(a) == pytest.approx([1, 0.5, 0.25], abs=1e-15)


@given(st.lists(rationals(), min_size=1, max_size=8))
@settings(max_examples=50, deadline=None)
def test_recursion_equals_nc_sum_exactly(alpha):
    m = cumulants_to_moments(alpha)
    assert list(m) == [nc_moment_sum(alpha, n) for n in range(1, len(alpha) + 1)]


@given(st.lists(rationals(), min_size=1, max_size=10))
@settings(max_examples=50, deadline=None)
def test_maps_are_inverse(alpha):
    assert moments_to_cumulants(cumulants_to_moments(alpha)).alpha == tuple(alpha)
    assert cumulants_to_moments(moments_to_cumulants(alpha)).m == tuple(alpha)


def test_recursion_equals_box_with_zeta_floats():
    rng = np.random.default_rng(11)
    for _ in range(200):
        K = int(rng.integers(1, 9))
        alpha = rng.uniform(-2, 2, size=K).tolist()
        assert close(cumulants_to_moments(alpha), boxed_convolve_bruteforce(alpha, zeta(K)), 1e-12)


@given(st.lists(rationals(), min_size=2, max_size=8), st.integers(0, 6), rationals())
@settings(max_examples=40, deadline=None)
def test_triangularity(vals, j, bump):
    # Changing coefficient j+1 leaves the first j output coefficients untouched.
    j = min(j, len(vals) - 1)
    other = list(vals)
    other[j] = other[j] + bump + 1
    g = [Fraction(1, k) for k in range(1, len(vals) + 1)]
    for fn in (cumulants_to_moments, moments_to_cumulants, lambda v: boxed_convolve(v, g)):
        assert tuple(fn(vals))[:j] == tuple(fn(other))[:j]


def test_float_and_exact_modes():
    assert not cumulants_to_moments([0.5, 1.0]).exact
    assert cumulants_to_moments([Fraction(1, 2), 1]).exact
    # Plain integers stay in float mode; exact mode is opted into with Fractions.
    assert isinstance(cumulants_to_moments([1, 1]).m[0], float)


def test_types_convert_losslessly():
    s = FormalSeries([Fraction(1, 3), 2])
    assert FormalSeries(MomentSequence(s.coef).m) == s
    assert CumulantSequence(s.coef).alpha == s.coef
