"""Truncated one-variable power series with vanishing constant term.

A series ``f = sum_{n=1..K} f_n z^n`` is stored by its coefficients
``f_1..f_K``. Every operation is triangular: coefficient ``k`` of a result
depends only on coefficients ``1..k`` of the inputs, so truncation to order
``K`` is exact.

The moment-cumulant conversion uses the recursion

    m_m = sum_{k=1..m} alpha_k [z^{m-k}] (1 + M(z))^k

which replaces the sum over noncrossing partitions by ``O(K^3)`` classical
polynomial products. :func:`boxed_convolve_bruteforce` keeps the partition
sum itself as an oracle.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from freeprob.core import CumulantSequence, MomentSequence, _Coefficients
from freeprob.errors import DomainError, ResourceError
from freeprob.ncpart import enumerate_nc, kreweras

BRUTEFORCE_MAX_ORDER = 12


class FormalSeries(_Coefficients):
    """Coefficients ``f_1..f_K`` of a power series with no constant term."""

    @property
    def coef(self) -> tuple:
        return self.values


def _coefs(x) -> tuple:
    if isinstance(x, _Coefficients):
        return x.values
    return FormalSeries(x).values


def _zero(vals: Sequence):
    return vals[0] * 0


def _one(vals: Sequence):
    return vals[0] * 0 + 1


def as_series(x) -> FormalSeries:
    return FormalSeries(_coefs(x))


def zeta(K: int, exact: bool = False) -> FormalSeries:
    one = Fraction(1) if exact else 1.0
    return FormalSeries([one] * K)


def id_series(K: int, exact: bool = False) -> FormalSeries:
    one = Fraction(1) if exact else 1.0
    return FormalSeries([one] + [one * 0] * (K - 1))


def moeb(K: int, exact: bool = False) -> FormalSeries:
    """The boxed-convolution inverse of :func:`zeta`.

    ``zeta ⊠ f`` is the moment series of cumulants ``f``, so solving
    ``zeta ⊠ moeb = id`` is one triangular solve: the cumulants of the
    moment sequence ``(1, 0, 0, ...)``.
    """
    return FormalSeries(moments_to_cumulants(MomentSequence(id_series(K, exact).values)).values)


def scale_coeff(f, c, exponent_offset: int = 0) -> FormalSeries:
    """Coefficientwise scaling: ``out_n = c**(n + exponent_offset) * f_n``."""
    vals = _coefs(f)
    if isinstance(vals[0], Fraction) and not isinstance(c, float):
        c = Fraction(c)
    return FormalSeries([c ** (n + exponent_offset) * v for n, v in enumerate(vals, start=1)])


def _polymul_trunc(p: Sequence, q: Sequence, deg: int) -> list:
    """Product of two coefficient lists (constant term first), truncated at ``deg``."""
    zero = p[0] * 0
    out = [zero] * (deg + 1)
    for i, a in enumerate(p[: deg + 1]):
        if a == 0:
            continue
        for j, b in enumerate(q[: deg + 1 - i]):
            out[i + j] += a * b
    return out


def cumulants_to_moments(alpha) -> MomentSequence:
    """Moments from free cumulants by the left-to-right recursion.

    The powers ``(1 + M)^k`` are grown one coefficient at a time as each new
    moment becomes known, so the whole computation is ``O(K^3)``.
    """
    a = _coefs(alpha)
    K = len(a)
    zero, one = _zero(a), _one(a)
    m = [one] + [zero] * K  # coefficients of 1 + M
    # P[k][j] = [z^j](1 + M)^k; column j is filled once m_1..m_j are known
    P = [[one] + [zero] * K for _ in range(K + 1)]
    for k in range(1, K + 1):
        P[k][0] = one
    for mm in range(1, K + 1):
        total = zero
        for k in range(1, mm + 1):
            total += a[k - 1] * P[k][mm - k]
        m[mm] = total
        for k in range(1, K + 1):
            acc = zero
            prev = P[k - 1]
            for i in range(0, mm + 1):
                acc += prev[mm - i] * m[i]
            P[k][mm] = acc
    return MomentSequence(m[1:])


def moments_to_cumulants(moments) -> CumulantSequence:
    """Exact inverse of :func:`cumulants_to_moments` (``alpha_m`` enters with coefficient 1)."""
    mv = _coefs(moments)
    K = len(mv)
    zero, one = _zero(mv), _one(mv)
    base = [one] + list(mv)
    powers = [[one] + [zero] * K]
    for _ in range(K):
        powers.append(_polymul_trunc(powers[-1], base, K))
    alpha = []
    for mm in range(1, K + 1):
        acc = mv[mm - 1]
        for k in range(1, mm):
            acc -= alpha[k - 1] * powers[k][mm - k]
        alpha.append(acc)
    return CumulantSequence(alpha)


def boxed_convolve_bruteforce(f, g, K: int | None = None) -> FormalSeries:
    """``(f ⊠ g)_m = sum over NC(m) of f_pi * g_{K(pi)}``, straight from the definition."""
    fv, gv = _coefs(f), _coefs(g)
    if K is None:
        K = min(len(fv), len(gv))
    if K > min(len(fv), len(gv)):
        raise DomainError(f"order {K} exceeds the input orders")
    if K > BRUTEFORCE_MAX_ORDER:
        raise ResourceError(f"brute-force boxed convolution limited to K <= {BRUTEFORCE_MAX_ORDER}")
    zero = _zero(fv) * _zero(gv)
    out = []
    for mm in range(1, K + 1):
        total = zero
        for pi in enumerate_nc(mm):
            term = _one(fv) * _one(gv)
            for size in pi.block_sizes:
                term *= fv[size - 1]
            if term == 0:
                continue
            for size in kreweras(pi).block_sizes:
                term *= gv[size - 1]
            total += term
        out.append(total)
    return FormalSeries(out)


def alternating_moments(ka: Sequence, kb: Sequence, length: int) -> tuple[list, list]:
    """Moments of alternating words in two free variables.

    Given free cumulants ``ka`` of ``a`` and ``kb`` of ``b``, returns lists
    ``A, B`` with ``A[l] = phi(a b a b ...)`` and ``B[l] = phi(b a b a ...)``
    for words of length ``l = 0..length``.

    The block containing the first letter sits on same-letter positions;
    every gap between two of its elements has odd length and the final gap
    is unrestricted, so

        A(x) = 1 + sum_s ka_s x^s Bodd(x)^(s-1) B(x)

    with ``Bodd`` the odd part of ``B``. Powers of the odd parts are grown
    one coefficient at a time, giving ``O(length^3)`` work overall.
    """
    zero = _zero(ka) * _zero(kb)
    one = zero + 1
    L = length
    A = [one] + [zero] * L
    B = [one] + [zero] * L
    # TA[s][j] = [x^j] Aodd(x)^s
    TA = [[one] + [zero] * L] + [[zero] * (L + 1) for _ in range(L)]
    TB = [[one] + [zero] * L] + [[zero] * (L + 1) for _ in range(L)]
    na, nb = len(ka), len(kb)
    for ell in range(1, L + 1):
        for own, kappa, n_k, T, other in ((A, ka, na, TB, B), (B, kb, nb, TA, A)):
            total = zero
            for s in range(1, min(ell, n_k) + 1):
                if kappa[s - 1] == 0:
                    continue
                row = T[s - 1]
                acc = zero
                for i in range(0, ell - s + 1):
                    acc += row[i] * other[ell - s - i]
                total += kappa[s - 1] * acc
            own[ell] = total
        # new odd coefficient feeds the power tables
        for src, T in ((A, TA), (B, TB)):
            for s in range(1, ell + 1):
                acc = zero
                prev = T[s - 1]
                for i in range(1, ell + 1, 2):
                    acc += src[i] * prev[ell - i]
                T[s][ell] = acc
    return A, B


def boxed_convolve(f, g) -> FormalSeries:
    """Boxed convolution ``f ⊠ g`` of one-variable series, in polynomial time.

    Reading ``f`` as the cumulants of ``a`` and ``g`` as the moments of a
    free ``b`` (so ``b`` has cumulants ``g ⊠ Moeb``), the coefficient
    ``(f ⊠ g)_n`` is ``phi((ab)^n)``: summing over cumulant partitions
    below the Kreweras complement reproduces ``g_{K(pi)}``.
    """
    fv, gv = _coefs(f), _coefs(g)
    K = min(len(fv), len(gv))
    kb = moments_to_cumulants(FormalSeries(gv[:K])).values
    A, _ = alternating_moments(fv[:K], kb, 2 * K)
    return FormalSeries([A[2 * n] for n in range(1, K + 1)])
