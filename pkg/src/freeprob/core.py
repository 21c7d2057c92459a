"""Domain types shared by every module, and the named laws.

Moment and cumulant sequences are immutable tuples indexed from 1 in the
mathematical sense (``seq[0]`` holds the first moment). The zeroth moment
is implicit and always 1.

Values are either all ``float`` or, in exact mode, all
:class:`fractions.Fraction`. Exact mode is meant for the small-order
combinatorial oracles; the kernels in :mod:`freeprob.series` are written
over generic numbers so the same code path serves both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

from freeprob.errors import DomainError

Number = Union[float, Fraction]

WEIGHT_TOL = 1e-12


def _normalize(values: Iterable) -> tuple:
    vals = list(values)
    if any(isinstance(v, Fraction) for v in vals):
        out = []
        for v in vals:
            if isinstance(v, Rational):
                out.append(Fraction(v))
            else:
                raise DomainError(f"cannot mix inexact value {v!r} into an exact sequence")
        return tuple(out)
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class _Coefficients:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", _normalize(self.values))
        if len(self.values) == 0:
            raise DomainError(f"{type(self).__name__} needs order K >= 1")

    @property
    def order(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def truncate(self, order: int):
        if not 1 <= order <= self.order:
            raise DomainError(f"cannot truncate order {self.order} sequence to {order}")
        return type(self)(self.values[:order])

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def __repr__(self) -> str:
        body = ", ".join(str(v) if self.exact else f"{v:.6g}" for v in self.values)
        return f"{type(self).__name__}({body})"


class MomentSequence(_Coefficients):
    """Raw moments ``m_1..m_K`` under the normalized trace."""

    @property
    def m(self) -> tuple:
        return self.values


class CumulantSequence(_Coefficients):
    """Free cumulants ``alpha_1..alpha_K``, the coefficients of ``R(z) = sum alpha_n z^n``."""

    @property
    def alpha(self) -> tuple:
        return self.values


def check_same_order(*seqs: _Coefficients) -> int:
    orders = {s.order for s in seqs}
    if len(orders) != 1:
        raise DomainError(f"order mismatch: {sorted(orders)}")
    return orders.pop()


def is_plausible(m: MomentSequence, tol: float = 1e-10) -> bool:
    """Whether ``m`` could be the moment sequence of a real measure.

    Checks positive semidefiniteness of the Hankel matrix
    ``H[i, j] = m_{i+j}`` (with ``m_0 = 1``), the classical solvability
    condition of the Hamburger moment problem. This is advisory only:
    deconvolution outputs are formal and are never rejected on this basis.
    """
    full = [1.0] + [float(v) for v in m]
    h = (len(full) - 1) // 2
    H = np.array([[full[i + j] for j in range(h + 1)] for i in range(h + 1)])
    eig = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.max(np.abs(H))))
    return bool(eig.min() >= -tol * scale)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite probability measure ``sum_i w_i delta(x_i)``.

    Parameters
    ----------
    atoms : sequence of (position, weight)
        Weights must be nonnegative and sum to one within ``1e-12``.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(x), float(w)) for x, w in self.atoms)
        if not atoms:
            raise DomainError("atomic measure needs at least one atom")
        for x, w in atoms:
            if not math.isfinite(x):
                raise DomainError(f"atom position {x} is not finite")
            if not (w >= 0.0 and math.isfinite(w)):
                raise DomainError(f"atom weight {w} is negative or not finite")
        total = math.fsum(w for _, w in atoms)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def uniform(cls, positions: Sequence[float]) -> "AtomicMeasure":
        """Empirical spectral measure: equal weight on every position."""
        pos = np.asarray(positions, dtype=float).ravel()
        if pos.size == 0:
            raise DomainError("empty spectrum")
        w = 1.0 / pos.size
        # fsum of n copies of 1/n is within an ulp of 1
        return cls(tuple((float(x), w) for x in pos))

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def moments(self, K: int) -> MomentSequence:
        x, w = self.positions, self.weights
        return MomentSequence([math.fsum(w * x**k) for k in range(1, K + 1)])

    def support_bound(self) -> float:
        return float(np.max(np.abs(self.positions)))


# --- named laws -----------------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    a: Number


@dataclass(frozen=True)
class MarchenkoPastur:
    """Marcenko-Pastur law with ratio ``c``, normalized to mean 1.

    Its free cumulants are ``c**(k-1)``; for ``c > 1`` this includes the
    atom of mass ``1 - 1/c`` at the origin.
    """

    c: Number

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"Marcenko-Pastur ratio must be positive, got {self.c}")


@dataclass(frozen=True)
class Semicircle:
    variance: Number


@dataclass(frozen=True)
class Atomic:
    measure: AtomicMeasure


LawSpec = Union[PointMass, MarchenkoPastur, Semicircle, Atomic]


def moments_of(law: LawSpec, K: int, exact: bool = False) -> MomentSequence:
    """Raw moments ``m_1..m_K`` of a named law.

    With ``exact=True`` the parameters are converted to
    :class:`~fractions.Fraction` and the result is exact (not available for
    atomic measures, whose atoms are stored as floats).
    """
    from freeprob.series import cumulants_to_moments

    if K < 1:
        raise DomainError(f"order must be >= 1, got {K}")
    conv = Fraction if exact else float

    if isinstance(law, PointMass):
        a = conv(law.a)
        return MomentSequence([a**k for k in range(1, K + 1)])
    if isinstance(law, MarchenkoPastur):
        c = conv(law.c)
        if not c > 0:
            raise DomainError(f"Marcenko-Pastur ratio must be positive, got {c}")
        alpha = CumulantSequence([c ** (k - 1) for k in range(1, K + 1)])
        return cumulants_to_moments(alpha)
    if isinstance(law, Semicircle):
        alpha = [conv(0)] * K
        if K >= 2:
            alpha[1] = conv(law.variance)
        return cumulants_to_moments(CumulantSequence(alpha))
    if isinstance(law, Atomic):
        if exact:
            raise DomainError("exact mode is not available for atomic measures")
        return law.measure.moments(K)
    raise DomainError(f"unknown law {law!r}")


def point_mass_moments(a: Number, K: int) -> MomentSequence:
    return moments_of(PointMass(a), K, exact=isinstance(a, Fraction))
