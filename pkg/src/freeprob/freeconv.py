"""Free additive and multiplicative (de)convolution on moment sequences.

All four operations act on truncated moment sequences of equal order and
are exact triangular maps. Deconvolutions are formal: they return a moment
sequence without asking whether a measure represents it (see
:func:`freeprob.core.is_plausible`).

Float inputs to the additive and Marcenko-Pastur maps are evaluated exactly
on their rational images and rounded once at the end. Deconvolution is
badly conditioned at moderate orders (denoising at ``K = 10`` amplifies
rounding by several orders of magnitude), and chained float steps would
otherwise lose about three more digits. Above ``EXACT_MAX_ORDER`` the
exact evaluation gets too slow and plain floating point is used. The
multiplicative maps always stay in
plain floating point because their exact evaluation is cubic in ``K``
with large rationals.

Convolution with the Marcenko-Pastur law ``mu_c`` (mean 1, free cumulants
``c**(k-1)``) has a fast path: multiply the moments by ``c``, read them as
free cumulants and push them through the moment-cumulant recursion, then
divide by ``c``.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from freeprob.core import CumulantSequence, MomentSequence, check_same_order
from freeprob.errors import DomainError, SingularDeconvolutionError
from freeprob.series import (
    alternating_moments,
    boxed_convolve,
    cumulants_to_moments,
    moments_to_cumulants,
)


EXACT_MAX_ORDER = 24


def _lift(x):
    if isinstance(x, MomentSequence):
        return x if x.exact else MomentSequence([Fraction(v) for v in x])
    if isinstance(x, (int, float)):
        return Fraction(x)
    return x


def correctly_rounded(fn):
    """Run ``fn`` exactly on the rational images of float arguments, then round once.

    Exact inputs pass straight through. If the exact result does not fit
    in a double the plain floating-point evaluation is returned instead.
    """

    @functools.wraps(fn)
    def wrapper(*args):
        seqs = [a for a in args if isinstance(a, MomentSequence)]
        if all(s.exact for s in seqs) or max(s.order for s in seqs) > EXACT_MAX_ORDER:
            return fn(*args)
        for a in args:
            if isinstance(a, float) and not math.isfinite(a):
                return fn(*args)
        exact = fn(*[_lift(a) for a in args])
        try:
            return MomentSequence([float(v) for v in exact])
        except OverflowError:
            return fn(*args)

    return wrapper


def _check_c(c):
    if not c > 0:
        raise DomainError(f"aspect ratio c must be positive, got {c}")


def _coerce_scalar(c, seq: MomentSequence):
    return Fraction(c) if seq.exact else float(c)


@correctly_rounded
def add_conv(a: MomentSequence, b: MomentSequence) -> MomentSequence:
    """Additive free convolution: free cumulants add."""
    check_same_order(a, b)
    ka, kb = moments_to_cumulants(a), moments_to_cumulants(b)
    return cumulants_to_moments(CumulantSequence([x + y for x, y in zip(ka, kb)]))


@correctly_rounded
def add_deconv(c: MomentSequence, b: MomentSequence) -> MomentSequence:
    """Additive free deconvolution: ``add_conv(add_deconv(c, b), b) == c``."""
    check_same_order(c, b)
    kc, kb = moments_to_cumulants(c), moments_to_cumulants(b)
    return cumulants_to_moments(CumulantSequence([x - y for x, y in zip(kc, kb)]))


@correctly_rounded
def shift(a: MomentSequence, s) -> MomentSequence:
    """``a ⊞ delta_s``: the point mass only moves the first free cumulant."""
    k = list(moments_to_cumulants(a))
    k[0] = k[0] + _coerce_scalar(s, a)
    return cumulants_to_moments(CumulantSequence(k))


def mult_conv(a: MomentSequence, b: MomentSequence) -> MomentSequence:
    """Multiplicative free convolution ``a ⊠ b``.

    The free cumulants of the product are the boxed convolution of the
    factors' cumulants.
    """
    check_same_order(a, b)
    r = boxed_convolve(moments_to_cumulants(a), moments_to_cumulants(b))
    return cumulants_to_moments(r)


def mult_deconv(c: MomentSequence, b: MomentSequence) -> MomentSequence:
    """Formal multiplicative free deconvolution: solve ``mult_conv(x, b) == c`` for ``x``.

    Moment ``m_n`` of ``x`` enters ``(x ⊠ b)_n`` only through the term
    ``m_n * b_1**n``, so the moments of ``x`` are solved one order at a
    time; ``b_1 = 0`` makes the system singular.

    Raises
    ------
    SingularDeconvolutionError
        If the first moment of ``b`` vanishes.
    """
    K = check_same_order(c, b)
    b1 = b[0]
    if b1 == 0:
        raise SingularDeconvolutionError("multiplicative deconvolution needs a nonzero first moment")
    zero = c[0] * 0
    kb = moments_to_cumulants(b).values
    x = []
    for n in range(1, K + 1):
        trial = MomentSequence(x + [zero])
        kx = moments_to_cumulants(trial).values
        A, _ = alternating_moments(kx, kb[:n], 2 * n)
        x.append((c[n - 1] - A[2 * n]) / b1**n)
    return MomentSequence(x)


@correctly_rounded
def mp_conv(a: MomentSequence, c) -> MomentSequence:
    """``a ⊠ mu_c`` by the scaled-moment fast path."""
    _check_c(c)
    c = _coerce_scalar(c, a)
    scaled = CumulantSequence([c * v for v in a])
    return MomentSequence([v / c for v in cumulants_to_moments(scaled)])


@correctly_rounded
def mp_deconv(a: MomentSequence, c) -> MomentSequence:
    """Formal deconvolution ``a ⊠⁻¹ mu_c``; the exact inverse of :func:`mp_conv`."""
    _check_c(c)
    c = _coerce_scalar(c, a)
    scaled = MomentSequence([c * v for v in a])
    return MomentSequence([v / c for v in moments_to_cumulants(scaled)])


def aspect_flip(a: MomentSequence, c, inverse: bool = False) -> MomentSequence:
    """Move moments between the two Gram matrices of an ``n x N`` matrix ``A``.

    Since ``Tr((A A*)^k) = Tr((A* A)^k)`` and ``c = n/N``, the ``tr_N``
    moments of the ``N x N`` Gram matrix ``A* A`` turn into the ``tr_n``
    moments of the ``n x n`` Gram matrix ``A A*`` as ``out_k = a_k / c``.
    ``inverse=True`` goes the other way (``out_k = a_k * c``).
    """
    _check_c(c)
    c = _coerce_scalar(c, a)
    if inverse:
        return MomentSequence([v * c for v in a])
    return MomentSequence([v / c for v in a])
