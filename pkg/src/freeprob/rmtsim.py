"""Seeded Monte Carlo for information-plus-noise and sample covariance matrices.

Reproducibility contract
------------------------
* Repetition ``r`` of a run with seed ``s`` draws from the stream keyed by
  ``mix64(s, r)`` (SplitMix64 finalizer, see :func:`mix64`).
* Uniforms come from NumPy's counter-based ``Philox`` generator keyed by
  that value; Gaussians are built from them by Box-Muller, so the
  generator identity is fully pinned and does not depend on NumPy's
  Gaussian sampler.
* Per-repetition results are stacked in repetition order before any
  reduction, so threaded and serial runs give bit-identical output.

Moments are normalized traces of matrix powers; no eigendecomposition is
involved except where an empirical spectrum is explicitly requested.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from freeprob.core import AtomicMeasure, MomentSequence
from freeprob.errors import DomainError

MASK64 = (1 << 64) - 1


def mix64(seed: int, index: int) -> int:
    """Derive an independent 64-bit stream key from ``(seed, index)``.

    SplitMix64: advance by ``index + 1`` golden-ratio increments and apply
    the finalizer.
    """
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _generator(key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(key) & MASK64))


def sample_gaussian_matrix(n: int, N: int, key: int) -> np.ndarray:
    """``n x N`` i.i.d. standard complex Gaussians (``E|X_ij|^2 = 1``).

    Box-Muller in polar form: ``sqrt(-log u1) * exp(2 pi i u2)`` has
    independent real and imaginary parts of variance 1/2.
    """
    if n < 1 or N < 1:
        raise DomainError(f"invalid dimensions {n} x {N}")
    u = _generator(key).random((2, n, N))
    r = np.sqrt(-np.log1p(-u[0]))  # 1 - u in (0, 1]
    return r * np.exp(2j * np.pi * u[1])


def sample_bernoulli_matrix(n: int, N: int, key: int) -> np.ndarray:
    """``n x N`` i.i.d. ``(±1 ± i)/sqrt(2)`` entries. Experimental; no limit theorem is claimed."""
    u = _generator(key).random((2, n, N))
    return (np.where(u[0] < 0.5, -1.0, 1.0) + 1j * np.where(u[1] < 0.5, -1.0, 1.0)) / math.sqrt(2)


def largest_remainder_counts(weights: Sequence[float], n: int) -> list[int]:
    """Split ``n`` slots proportionally to ``weights`` (Hamilton's method, ties by index)."""
    if n < 1:
        raise DomainError("need at least one slot")
    quotas = [w * n for w in weights]
    counts = [math.floor(q) for q in quotas]
    short = n - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def realized_spectrum(gamma_spectrum: AtomicMeasure, n: int) -> np.ndarray:
    """The ``n`` eigenvalues of ``Gamma_n``, largest first."""
    counts = largest_remainder_counts(list(gamma_spectrum.weights), n)
    lam = np.repeat(gamma_spectrum.positions, counts)
    return np.sort(lam)[::-1]


def haar_unitary(n: int, key: int) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (QR of a complex Gaussian with phase correction)."""
    Z = sample_gaussian_matrix(n, n, key)
    Q, Rm = np.linalg.qr(Z)
    d = np.diagonal(Rm)
    return Q * (d / np.abs(d))


def realize_signal(gamma_spectrum: AtomicMeasure, n: int, N: int,
                   rotate_key: int | None = None) -> np.ndarray:
    """Deterministic ``n x N`` signal ``R`` with ``(1/N) R R*`` having the target spectrum.

    Eigenvalue counts are rounded by largest remainder. ``R`` is
    ``diag(sqrt(N * lambda_i))`` padded with zeros, which needs at most
    ``min(n, N)`` nonzero eigenvalues (so for ``n > N`` the target must put
    mass ``>= 1 - N/n`` at zero). ``rotate_key`` conjugates by a seeded Haar
    unitary to move the eigenvectors off the standard basis.
    """
    if n < 1 or N < 1:
        raise DomainError(f"invalid dimensions {n} x {N}")
    if gamma_spectrum.positions.min() < 0:
        raise DomainError("signal spectrum must be nonnegative")
    lam = realized_spectrum(gamma_spectrum, n)
    nonzero = int(np.count_nonzero(lam))
    r = min(n, N)
    if nonzero > r:
        raise DomainError(f"{nonzero} nonzero eigenvalues do not fit a rank-{r} {n}x{N} signal")
    R = np.zeros((n, N))
    R[np.arange(r), np.arange(r)] = np.sqrt(N * lam[:r])
    if rotate_key is not None:
        return haar_unitary(n, rotate_key) @ R
    return R


def empirical_moments(M: np.ndarray, K: int) -> MomentSequence:
    """Normalized traces ``tr(M^k)``, ``k = 1..K``, by repeated multiplication."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    out = []
    P = M
    for k in range(1, K + 1):
        if k > 1:
            P = P @ M
        out.append(np.trace(P).real / n)
    return MomentSequence(out)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a seeded information-plus-noise experiment.

    ``gamma_spectrum`` is the spectrum of ``Gamma_n = (1/N) R R*`` under
    ``tr_n``. ``noise="bernoulli"`` is experimental.
    """

    n: int
    N: int
    sigma2: float
    gamma_spectrum: AtomicMeasure
    seed: int
    reps: int = 1
    order: int = 6
    rotate: bool = False
    noise: str = "gaussian"

    def __post_init__(self):
        if self.n < 1 or self.N < 1 or self.reps < 1 or self.order < 1:
            raise DomainError("n, N, reps and order must all be >= 1")
        if self.sigma2 < 0:
            raise DomainError(f"sigma2 must be nonnegative, got {self.sigma2}")
        if self.gamma_spectrum.positions.min() < 0:
            raise DomainError("gamma spectrum atoms must be nonnegative")
        if self.noise not in ("gaussian", "bernoulli"):
            raise DomainError(f"unknown noise model {self.noise!r}")

    @property
    def c(self) -> float:
        return self.n / self.N


@dataclass(frozen=True)
class MomentEstimate:
    """Mean moments over repetitions with their standard errors.

    ``samples`` holds the per-repetition moments, shape ``(reps, K)``.
    """

    mean: MomentSequence
    stderr: tuple
    reps: int
    samples: np.ndarray

    def __post_init__(self):
        if any(s < 0 for s in self.stderr):
            raise DomainError("negative standard error")


def _summarize(samples: np.ndarray) -> MomentEstimate:
    reps = samples.shape[0]
    mean = samples.mean(axis=0)
    if reps > 1:
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(reps)
    else:
        stderr = np.zeros(samples.shape[1])
    return MomentEstimate(MomentSequence(mean), tuple(float(s) for s in stderr), reps, samples)


def info_noise_factor(spec: EnsembleSpec, rep: int) -> np.ndarray:
    """``(R + sigma X) / sqrt(N)`` for repetition ``rep``, so that ``W = A A*``."""
    key = mix64(spec.seed, rep)
    rotate_key = mix64(key, 1) if spec.rotate else None
    R = realize_signal(spec.gamma_spectrum, spec.n, spec.N, rotate_key=rotate_key)
    if spec.sigma2 == 0:
        return R / math.sqrt(spec.N)
    sampler = sample_gaussian_matrix if spec.noise == "gaussian" else sample_bernoulli_matrix
    X = sampler(spec.n, spec.N, key)
    return (R + math.sqrt(spec.sigma2) * X) / math.sqrt(spec.N)


def _rep_moments(spec: EnsembleSpec, rep: int) -> np.ndarray:
    A = info_noise_factor(spec, rep)
    W = A @ A.conj().T
    return empirical_moments(W, spec.order).as_array()


def simulate_info_noise(spec: EnsembleSpec, workers: int = 1) -> MomentEstimate:
    """Empirical ``tr_n`` moments of ``W = (1/N)(R + sigma X)(R + sigma X)*`` over ``spec.reps`` draws."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: _rep_moments(spec, r), range(spec.reps)))
    else:
        rows = [_rep_moments(spec, r) for r in range(spec.reps)]
    return _summarize(np.vstack(rows))


def sample_covariance_spectrum(theta: AtomicMeasure, n: int, N: int, key: int) -> AtomicMeasure:
    """Eigenvalues of ``(1/N) T^(1/2) X X* T^(1/2)`` with ``T`` diagonal of spectrum ``theta``.

    The columns of ``T^(1/2) X`` are i.i.d. samples with covariance ``T``.
    """
    t = realized_spectrum(theta, n)
    if t.min() < 0:
        raise DomainError("covariance spectrum must be nonnegative")
    Y = np.sqrt(t)[:, None] * sample_gaussian_matrix(n, N, key)
    S = Y @ Y.conj().T / N
    return AtomicMeasure.uniform(np.linalg.eigvalsh(S))


def _centered_poly(M: np.ndarray, coeffs: Sequence[float]) -> np.ndarray:
    n = M.shape[0]
    P = np.zeros_like(M)
    power = np.eye(n, dtype=M.dtype)
    for j, a in enumerate(coeffs):
        if j > 0:
            power = power @ M
        if a:
            P = P + a * power
    return P - (np.trace(P) / n) * np.eye(n)


def mixed_moment_value(factors: dict[str, np.ndarray], pattern: Sequence[tuple[str, Sequence[float]]]) -> float:
    """``|tr(P_1(M_1)° P_2(M_2)° ...)|`` with each factor centered to zero normalized trace.

    ``pattern`` lists ``(name, coeffs)`` pairs; ``coeffs[j]`` multiplies
    ``M^j`` and ``name`` picks the matrix out of ``factors``.
    """
    if not pattern:
        raise DomainError("empty pattern")
    prod = None
    for name, coeffs in pattern:
        F = _centered_poly(factors[name], coeffs)
        prod = F if prod is None else prod @ F
    n = prod.shape[0]
    return float(abs(np.trace(prod) / n))


ALTERNATING_PATTERN = (("X", (0.0, 1.0)), ("R", (0.0, 1.0)))
IDENTICAL_PATTERN = (("X", (0.0, 1.0)), ("X", (0.0, 1.0)))


def mixed_moment_decay(n_list: Sequence[int], template: EnsembleSpec,
                       pattern: Sequence[tuple[str, Sequence[float]]] = ALTERNATING_PATTERN
                       ) -> list[tuple[int, float]]:
    """Average ``|tr_n|`` of a centered alternating product as ``n`` grows at fixed ``c``.

    For each ``n`` the column count is ``round(n / c)`` with ``c`` taken
    from ``template``; ``"X"`` names ``(1/N) X X*`` and ``"R"`` names
    ``(1/N) R R*`` realized from ``template.gamma_spectrum``. Values are
    averaged over ``template.reps`` seeded draws.
    """
    c = template.c
    out = []
    for n in n_list:
        N = max(1, round(n / c))
        R = realize_signal(template.gamma_spectrum, n, N)
        G = R @ R.T / N
        base = mix64(template.seed, n)
        vals = []
        for rep in range(template.reps):
            X = sample_gaussian_matrix(n, N, mix64(base, rep))
            A = X @ X.conj().T / N
            vals.append(mixed_moment_value({"X": A, "R": G.astype(A.dtype)}, pattern))
        out.append((int(n), float(np.mean(vals))))
    return out
