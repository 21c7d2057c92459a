"""Numeric Stieltjes, eta and S transforms, and fixed-point characterizations.

Conventions: ``m(z) = ∫ dF(x) / (x - z)`` and ``eta(z) = ∫ dF(x) / (1 + z x)``,
related by ``eta(z) = m(-1/z) / z``. Transforms of moment sequences are
evaluated through the expansion ``m(z) = -sum_{k>=0} m_k z^{-(k+1)}``,
which converges only outside a disc containing the support.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from freeprob.core import AtomicMeasure, MomentSequence
from freeprob.errors import ConvergenceError, DomainError, PoleError, SolverError

POLE_TOL = 1e-300


def stieltjes_atoms(mu: AtomicMeasure, z: complex) -> complex:
    """Exact ``sum_i w_i / (x_i - z)``."""
    z = complex(z)
    d = mu.positions - z
    if np.any(np.abs(d) <= POLE_TOL):
        raise PoleError(f"z={z} coincides with an atom")
    return complex(np.sum(mu.weights / d))


def truncation_bound(radius: float, z: complex, K: int) -> float:
    """Worst-case tail of the moment expansion after ``K`` terms.

    For a measure supported in ``[-radius, radius]`` the neglected terms are
    bounded by ``(r/|z|)^(K+1) / (1 - r/|z|) / |z|``.
    """
    q = radius / abs(z)
    if q >= 1:
        return math.inf
    return q ** (K + 1) / (1 - q) / abs(z)


def stieltjes_moments(m: MomentSequence, z: complex, radius: float, tol: float = 1e-10) -> complex:
    """Truncated moment expansion of the Stieltjes transform.

    Parameters
    ----------
    m : MomentSequence
        Moments ``m_1..m_K`` (``m_0 = 1`` implied).
    z : complex
        Evaluation point with ``|z| > radius``.
    radius : float
        Caller-supplied bound on the support. Deconvolved sequences carry no
        support information of their own, so this cannot be inferred.
    tol : float
        Largest acceptable value of :func:`truncation_bound`.

    Raises
    ------
    ConvergenceError
        If ``|z| <= radius`` or the truncation bound exceeds ``tol``.
    """
    z = complex(z)
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    if abs(z) <= radius:
        raise ConvergenceError(f"|z|={abs(z):.6g} inside the support radius {radius:.6g}")
    bound = truncation_bound(radius, z, len(m))
    if bound > tol:
        raise ConvergenceError(
            f"truncation bound {bound:.3g} exceeds {tol:.3g} at z={z} with K={len(m)}"
        )
    # Horner in w = 1/z: -w (1 + m_1 w + m_2 w^2 + ...)
    w = 1 / z
    acc = 0j
    for v in reversed(m.values):
        acc = (acc + float(v)) * w
    return -w * (1 + acc)


def eta_atoms(mu: AtomicMeasure, z: float) -> float:
    """``sum_i w_i / (1 + z x_i)``; strictly decreasing in ``z >= 0`` for nonnegative atoms."""
    d = 1 + z * mu.positions
    if np.any(np.abs(d) <= POLE_TOL):
        raise PoleError(f"1 + z*x vanishes at z={z}")
    return float(np.sum(mu.weights / d))


def eta_from_stieltjes(stieltjes: Callable[[float], complex], z: float) -> float:
    """``eta(z) = m(-1/z) / z`` for ``z > 0``."""
    if z <= 0:
        raise DomainError("eta via the Stieltjes transform needs z > 0")
    return (stieltjes(-1.0 / z) / z).real


def eta_inverse(eta: Callable[[float], float], y: float, lo: float = 1e-9, hi: float = 1e6,
                tol: float = 1e-12) -> float:
    """Invert a decreasing eta transform by bisection on ``[lo, hi]``.

    ``tol`` is relative to the bracket width at convergence.
    """
    flo, fhi = eta(lo) - y, eta(hi) - y
    if flo < 0 or fhi > 0:
        raise SolverError(f"eta^-1({y}) not bracketed by [{lo}, {hi}]")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if eta(mid) - y > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def s_transform(eta: Callable[[float], float], z: float, **kwargs) -> float:
    """``S(z) = -(z+1)/z * eta^-1(z+1)`` for ``z`` in ``(-1, 0)``."""
    if not -1 < z < 0:
        raise DomainError(f"S-transform is defined on (-1, 0), got {z}")
    return -(z + 1) / z * eta_inverse(eta, z + 1, **kwargs)


def s_transform_mp(c: float, z: float) -> float:
    """S-transform of the Marcenko-Pastur law, ``1 / (1 + c z)``."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if not -1 < z < 0:
        raise DomainError(f"S-transform is defined on (-1, 0), got {z}")
    d = 1 + c * z
    if d == 0:
        raise PoleError(f"S-transform of MP({c}) has a pole at z={z}")
    return 1 / d


def mp_stieltjes(c: float, z: complex) -> complex:
    """Closed-form Stieltjes transform of the mean-one Marcenko-Pastur law.

    Root of ``c z m^2 + (z + c - 1) m + 1 = 0`` on the branch that behaves
    like ``-1/z`` at infinity.
    """
    z = complex(z)
    a, b = c * z, z + c - 1
    disc = cmath.sqrt(b * b - 4 * a)
    roots = ((-b + disc) / (2 * a), (-b - disc) / (2 * a))
    return min(roots, key=lambda r: abs(r * z + 1))


def _fixed_point(F: Callable[[complex], complex], m0: complex, damping: float,
                 max_iter: int, tol: float, what: str) -> complex:
    m = m0
    res = math.inf
    for _ in range(max_iter):
        fm = F(m)
        res = abs(fm - m)
        if res < tol:
            return fm
        m = (1 - damping) * m + damping * fm
    raise SolverError(f"{what}: no convergence after {max_iter} iterations (residual {res:.3g})",
                      residual=res)


def dozier_silverstein_mw(gamma: AtomicMeasure, c: float, sigma2: float, z: complex,
                          damping: float = 0.5, max_iter: int = 10000,
                          tol: float = 1e-12) -> complex:
    """Stieltjes transform of the information-plus-noise limit at ``z``.

    Solves

        m = ∫ dF_Gamma(t) / ( t/(1 + s c m) - (1 + s c m) z + s (1 - c) ),  s = sigma2,

    by damped Picard iteration from ``m = -1/z``.
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    if sigma2 < 0:
        raise DomainError(f"sigma2 must be nonnegative, got {sigma2}")
    z = complex(z)
    if not (z.imag > 0 or (z.imag == 0 and z.real < 0)):
        raise DomainError(f"z={z} must lie in the upper half-plane or on the negative axis")
    t, w = gamma.positions, gamma.weights

    def F(m):
        a = 1 + sigma2 * c * m
        return complex(np.sum(w / (t / a - a * z + sigma2 * (1 - c))))

    return _fixed_point(F, -1 / z, damping, max_iter, tol, "Dozier-Silverstein")


def sample_covariance_mw(theta: AtomicMeasure, c: float, z: complex,
                         damping: float = 0.5, max_iter: int = 10000,
                         tol: float = 1e-12) -> complex:
    """Stieltjes transform of ``theta ⊠ mu_c`` via the Marcenko-Pastur-Silverstein equation.

    ``m = ∫ dF_theta(t) / ( t (1 - c - c z m) - z )``. Used as an independent
    evaluator of sample-covariance limits where the moment expansion does
    not converge.
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    z = complex(z)
    t, w = theta.positions, theta.weights

    def F(m):
        return complex(np.sum(w / (t * (1 - c - c * z * m) - z)))

    return _fixed_point(F, -1 / z, damping, max_iter, tol, "Marcenko-Pastur-Silverstein")
