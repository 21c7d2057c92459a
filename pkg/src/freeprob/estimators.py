"""Information-plus-noise spectra and the G2 covariance estimator.

For ``W = (1/N)(R + sigma X)(R + sigma X)*`` with ``Gamma = (1/N) R R*``
and ``c = n/N``, the limiting spectra satisfy

    mu_W ⊠⁻¹ mu_c = (mu_Gamma ⊠⁻¹ mu_c) ⊞ delta_{sigma^2},

i.e. after deconvolving the Marcenko-Pastur law the noise is a plain shift
of the spectrum. Both directions are exact triangular maps on moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from freeprob.core import AtomicMeasure, MomentSequence
from freeprob.errors import DomainError, SolverError
from freeprob.freeconv import correctly_rounded, mp_conv, mp_deconv, shift
from freeprob.transforms import stieltjes_atoms, stieltjes_moments


@dataclass(frozen=True)
class InfoNoiseParams:
    """Aspect ratio ``c = n/N``, noise variance ``sigma2`` and moment order."""

    c: float
    sigma2: float
    order: int

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"c must be positive, got {self.c}")
        if self.sigma2 < 0:
            raise DomainError(f"sigma2 must be nonnegative, got {self.sigma2}")
        if self.order < 1:
            raise DomainError(f"order must be >= 1, got {self.order}")


def _prepare(seq: MomentSequence, p: InfoNoiseParams) -> MomentSequence:
    if seq.order < p.order:
        raise DomainError(f"input has order {seq.order}, need at least {p.order}")
    return seq.truncate(p.order)


@correctly_rounded
def _noise_map(seq: MomentSequence, c, s) -> MomentSequence:
    return mp_conv(shift(mp_deconv(seq, c), s), c)


def info_noise_forward(gamma: MomentSequence, p: InfoNoiseParams) -> MomentSequence:
    """Moments of ``mu_W`` predicted from the moments of ``mu_Gamma``.

    Float input is evaluated exactly and rounded once (see
    :func:`freeprob.freeconv.correctly_rounded`).
    """
    return _noise_map(_prepare(gamma, p), p.c, p.sigma2)


def info_noise_inverse(w: MomentSequence, p: InfoNoiseParams) -> MomentSequence:
    """Moments of ``mu_Gamma`` recovered from those of ``mu_W`` (denoising)."""
    return _noise_map(_prepare(w, p), p.c, -p.sigma2)


def info_noise_support_edge(gamma: AtomicMeasure, c: float, sigma2: float) -> float:
    """Right edge of the support of the limiting ``mu_W``.

    On ``x`` to the right of the support the inverse Stieltjes transforms
    obey

        m_W^-1(u / (1 - s c u)) = (1 - s c u)^2 m_Gamma^-1(u) + s (1 - c)(1 - s c u)

    for ``u < 0`` (``s = sigma2``). The edge is the first critical value of
    the right-hand side as ``u`` decreases from ``0``.
    """
    if not c > 0 or sigma2 < 0:
        raise DomainError("need c > 0 and sigma2 >= 0")
    t, w = gamma.positions, gamma.weights
    tmax = float(t.max())
    if sigma2 == 0:
        return tmax
    top = float(w[t == tmax].sum())

    def x_gamma(u):
        f = lambda x: float(np.sum(w / (t - x))) - u
        lo = tmax + min(1e-3, 0.5 * top / abs(u))
        while f(lo) > 0:
            lo = tmax + 0.5 * (lo - tmax)
        return brentq(f, lo, tmax + 1.0 / abs(u) + 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def X(u):
        a = 1 - sigma2 * c * u
        return a * a * x_gamma(u) + sigma2 * (1 - c) * a

    us = -np.logspace(-4, 4, 801)
    vals = [X(u) for u in us]
    for i in range(1, len(us) - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            r = minimize_scalar(X, bounds=(us[i + 1], us[i - 1]), method="bounded",
                                options={"xatol": 1e-12})
            return float(min(r.fun, vals[i]))
    raise SolverError("no critical point found for the support edge")


def g2_moment_route(gamma_emp: MomentSequence, c: float, z: float, support_bound: float,
                    tol: float = 1e-10) -> float:
    """G2 estimate at real ``z < 0`` as the Stieltjes transform of ``gamma_emp ⊠⁻¹ mu_c``.

    ``support_bound`` bounds the support of the *deconvolved* measure; it
    controls the truncation of the moment expansion.
    """
    if not z < 0:
        raise DomainError(f"G2 is evaluated at real z < 0, got {z}")
    return stieltjes_moments(mp_deconv(gamma_emp, c), z, support_bound, tol=tol).real


def g2_theta(gamma_emp: AtomicMeasure, c: float, z: float) -> float:
    """Root ``theta < 0`` of ``theta c m(theta) - (1 - c) + theta / z = 0``.

    ``m`` is the Stieltjes transform of the empirical spectrum. The bracket
    starts at ``[z, z * 1e-12]`` and its left end is pushed out
    geometrically until the left side changes sign.
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if not z < 0:
        raise DomainError(f"G2 is evaluated at real z < 0, got {z}")
    if gamma_emp.positions.min() < 0:
        raise DomainError("empirical spectrum must be nonnegative")

    def f(theta):
        return theta * c * stieltjes_atoms(gamma_emp, theta).real - (1 - c) + theta / z

    hi = z * 1e-12
    if f(hi) >= 0:
        raise SolverError(f"no sign change near 0 for c={c}, z={z}", residual=f(hi))
    lo = z
    for _ in range(200):
        if f(lo) > 0:
            break
        lo *= 2
    else:
        raise SolverError(f"could not bracket theta for c={c}, z={z}", residual=f(lo))
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def g2_fixed_point(gamma_emp: AtomicMeasure, c: float, z: float) -> float:
    """Girko's G2 estimate ``theta/z * m(theta)`` of the population Stieltjes transform at ``z``."""
    theta = g2_theta(gamma_emp, c, z)
    return theta / z * stieltjes_atoms(gamma_emp, theta).real

