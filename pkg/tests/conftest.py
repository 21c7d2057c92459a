from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from freeprob.core import AtomicMeasure


def set_partitions(elements):
    """All set partitions of ``elements`` (restricted-growth recursion)."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def crosses_bruteforce(blocks) -> bool:
    """Direct quadruple test: some i<j<k<l with i~k, j~l, i not~ j."""
    label = {}
    for b, block in enumerate(blocks):
        for x in block:
            label[x] = b
    pts = sorted(label)
    for i, j, k, l in itertools.combinations(pts, 4):
        if label[i] == label[k] and label[j] == label[l] and label[i] != label[j]:
            return True
    return False


def nc_moment_sum(alpha, n: int):
    """Moment m_n as the sum over NC(n) of products of cumulants."""
    from freeprob.ncpart import enumerate_nc

    total = alpha[0] * 0
    for p in enumerate_nc(n):
        term = alpha[0] * 0 + 1
        for size in p.block_sizes:
            term = term * alpha[size - 1]
        total += term
    return total


def boxed_nc_sum(f, g, n: int):
    """``sum_{pi in NC(n)} prod f_{|V|} over pi * prod g_{|W|} over K(pi)``."""
    from freeprob.ncpart import enumerate_nc, kreweras

    total = f[0] * 0
    for p in enumerate_nc(n):
        term = f[0] * 0 + 1
        for size in p.block_sizes:
            term = term * f[size - 1]
        for size in kreweras(p).block_sizes:
            term = term * g[size - 1]
        total += term
    return total


def rationals(lo=-2, hi=2):
    return st.fractions(min_value=lo, max_value=hi, max_denominator=12)


bounded_floats = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def random_atomic(rng: np.random.Generator, k: int, lo: float = 0.1, hi: float = 4.0) -> AtomicMeasure:
    pos = rng.uniform(lo, hi, size=k)
    w = rng.dirichlet(np.ones(k))
    w[-1] = 1.0 - float(np.sum(w[:-1]))
    return AtomicMeasure(tuple(zip(pos.tolist(), w.tolist())))


# Spectra shared by the cross-route checks.
FIXTURE_SPECTRA = {
    "two-atom": AtomicMeasure(((1.0, 0.5), (3.0, 0.5))),
    "point": AtomicMeasure(((2.0, 1.0),)),
    "three-atom": AtomicMeasure(((0.5, 0.3), (1.0, 0.4), (1.5, 0.3))),
    "with-zero": AtomicMeasure(((0.0, 0.25), (1.0, 0.5), (2.0, 0.25))),
    "skewed": AtomicMeasure(((0.2, 0.7), (2.5, 0.3))),
}


@pytest.fixture
def two_atom():
    return FIXTURE_SPECTRA["two-atom"]


def frac(x):
    return Fraction(x)
