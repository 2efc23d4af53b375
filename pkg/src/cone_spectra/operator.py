"""The periodic operator ``-d^2/ds^2 - kappa^2/4`` and the accumulation constant."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .curves import CurvatureProfile
from .errors import ConvergenceFailure, InvalidInput, NearZeroEigenvalue

NEGATIVE_THRESHOLD = -1e-10
DEFAULT_N = 2048


@dataclass(frozen=True)
class PeriodicOperatorMatrix:
    """Second-order finite-difference matrix on the periodic grid of a profile."""

    profile: CurvatureProfile
    diag: np.ndarray
    offdiag: float

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def h(self) -> float:
        return self.profile.h

    def sparse(self) -> sp.csc_matrix:
        n = self.n
        off = np.full(n, self.offdiag)
        m = sp.diags([off[:-1], self.diag, off[:-1]], [-1, 0, 1], format="lil")
        m[0, n - 1] = self.offdiag
        m[n - 1, 0] = self.offdiag
        return m.tocsc()

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()

    def kinetic_row_sums(self) -> np.ndarray:
        kin = self.diag + self.profile.kappa**2 / 4.0
        return kin + 2.0 * self.offdiag


def assemble(profile: CurvatureProfile) -> PeriodicOperatorMatrix:
    h = profile.h
    diag = 2.0 / h**2 - profile.kappa**2 / 4.0
    return PeriodicOperatorMatrix(profile, diag, -1.0 / h**2)


def _lowest(matrix: PeriodicOperatorMatrix, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues via shift-invert Lanczos below the spectrum."""
    n = matrix.n
    if count >= n - 1 or n <= 256:
        return np.linalg.eigvalsh(matrix.dense())[:count]
    # Gershgorin-type lower bound keeps the shift strictly below the spectrum
    sigma = float(matrix.diag.min() + 2.0 * matrix.offdiag) - 1.0
    # fixed start vector: ARPACK's random default breaks bit-for-bit reproducibility
    v0 = np.random.default_rng(12345).standard_normal(n)
    try:
        vals = eigsh(matrix.sparse(), k=count, sigma=sigma, which="LM", v0=v0,
                     return_eigenvectors=False, tol=1e-13, maxiter=50 * n)
    except ArpackNoConvergence as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return np.sort(vals)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    grid_sizes_used: tuple
    richardson_error: np.ndarray
    length: float = float("nan")
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return len(self.eigenvalues)


def eigenvalues(matrix: PeriodicOperatorMatrix, count: int = 8, richardson: bool = True) -> SpectrumResult:
    """Lowest ``count`` eigenvalues, Richardson-extrapolated from grids n and 2n.

    The extrapolant is ``(4*lam_2n - lam_n)/3`` and the reported error bar is
    ``|lam_2n - lam_n|/3``.
    """
    n = matrix.n
    if count < 1 or count > n // 4:
        raise InvalidInput(f"count must lie in [1, n/4] = [1, {n // 4}], got {count}")
    coarse = _lowest(matrix, count)
    if not richardson:
        return SpectrumResult(coarse, (n,), np.zeros(count), matrix.profile.length, {n: coarse})
    fine_matrix = assemble(matrix.profile.resample(2 * n))
    fine = _lowest(fine_matrix, count)
    extrap = (4.0 * fine - coarse) / 3.0
    err = np.abs(fine - coarse) / 3.0
    order = np.argsort(extrap, kind="stable")
    return SpectrumResult(extrap[order], (n, 2 * n), err[order], matrix.profile.length,
                          {n: coarse, 2 * n: fine})


def spectrum_below(profile: CurvatureProfile, ceiling: float = 0.0, start: int = 8,
                   richardson: bool = True) -> SpectrumResult:
    """All eigenvalues below ``ceiling`` plus at least one above it."""
    matrix = assemble(profile)
    count = start
    while True:
        count = min(count, matrix.n // 4)
        spec = eigenvalues(matrix, count, richardson=richardson)
        if spec.eigenvalues[-1] > ceiling or count == matrix.n // 4:
            return spec
        count *= 2


@dataclass(frozen=True)
class AccumulationConstant:
    k_S: float
    negative_eigenvalues: tuple
    threshold: float = NEGATIVE_THRESHOLD
    errors: tuple = ()

    def recompute(self) -> float:
        return sum(math.sqrt(-lam) for lam in self.negative_eigenvalues) / (2.0 * math.pi)

    @property
    def error(self) -> float:
        """First-order propagation of the eigenvalue error bars into k_S."""
        return sum(e / (2.0 * math.sqrt(-lam)) for lam, e in zip(self.negative_eigenvalues, self.errors)) / (2.0 * math.pi)


def accumulation_constant(spectrum: SpectrumResult, strict: bool = True) -> AccumulationConstant:
    """``(1/2pi) * sum sqrt(-lam_j)`` over the eigenvalues below ``-1e-10``.

    With ``strict`` set, an eigenvalue whose magnitude is below its own error
    bar (or below 1e-10) raises :class:`NearZeroEigenvalue`, since the number
    of summands is then undetermined.
    """
    lam = np.asarray(spectrum.eigenvalues)
    err = np.asarray(spectrum.richardson_error)
    if len(lam) and lam[0] < 0.0 and err[0] >= 0.1 * abs(lam[0]):
        raise ConvergenceFailure(f"lowest eigenvalue not converged: {lam[0]} +- {err[0]}")
    if lam[-1] <= NEGATIVE_THRESHOLD:
        raise InvalidInput("spectrum does not reach above zero; request more eigenvalues")
    if strict:
        near = np.abs(lam) < np.maximum(1e-10, err)
        if np.any(near):
            raise NearZeroEigenvalue(f"eigenvalue(s) {lam[near]} indistinguishable from 0")
    neg = lam < NEGATIVE_THRESHOLD
    negatives = tuple(float(x) for x in lam[neg])
    ks = sum(math.sqrt(-x) for x in negatives) / (2.0 * math.pi)
    return AccumulationConstant(ks, negatives, NEGATIVE_THRESHOLD, tuple(float(x) for x in err[neg]))


def minmax_upper_bound(profile: CurvatureProfile) -> float:
    """Rayleigh quotient of the constant function: ``-(1/4l) int kappa^2 ds``."""
    return -profile.integral(2) / (4.0 * profile.length)


def rayleigh_quotient(profile: CurvatureProfile, u: np.ndarray) -> float:
    """Discrete Rayleigh quotient <u, K u>/<u, u> on the profile's grid."""
    m = assemble(profile).sparse()
    u = np.asarray(u, dtype=float)
    return float(u @ (m @ u) / (u @ u))


def k_s(profile: CurvatureProfile, strict: bool = True) -> AccumulationConstant:
    """Accumulation constant of a profile at its own grid (and the doubled one).

    Identically vanishing curvature gives a non-negative operator, so the
    answer 0 is exact there and the near-zero guard is not consulted.
    """
    if not np.any(profile.kappa):
        return AccumulationConstant(0.0, ())
    return accumulation_constant(spectrum_below(profile), strict=strict)
