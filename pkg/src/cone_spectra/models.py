"""Interval operators with a unit attractive point interaction at the origin.

On ``(-L, L)`` the operator acts as ``-u''`` away from 0, with
``u'(0+) - u'(0-) = -u(0)`` and Dirichlet or Neumann conditions at ``+-L``.

Ground state (even) matching conditions, for ``lambda = -k**2``::

    Dirichlet: tanh(k L) = 2 k      Neumann: coth(k L) = 2 k

and for ``lambda = +k**2``::

    Dirichlet: tan(k L) = 2 k       Neumann: tan(k L) = -1 / (2 k)

Odd modes vanish at 0 and do not feel the point interaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ConvergenceFailure, InvalidInput, NoNegativeRoot


@dataclass(frozen=True)
class IntervalDeltaSpec:
    L: float
    bc: str  # "D" or "N"

    def __post_init__(self):
        if not self.L > 0.0:
            raise InvalidInput(f"half-length must be positive, got {self.L}")
        if self.bc not in ("D", "N"):
            raise InvalidInput(f"bc must be 'D' or 'N', got {self.bc!r}")


@dataclass(frozen=True)
class ModelSpectrum:
    lambda1: float
    lambda2: float
    method: str
    residual: float = 0.0


def _bisect(f, lo, hi, tol=1e-14):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def _scan_root(f, lo, hi, step=1e-3):
    """First sign change of ``f`` on a uniform scan of [lo, hi], refined by bisection."""
    grid = np.arange(lo, hi + step, step)
    vals = np.array([f(k) for k in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(idx) == 0:
        return None
    i = idx[0]
    return _bisect(f, grid[i], grid[i + 1])


def _negative_ground_state(spec: IntervalDeltaSpec):
    L = spec.L
    if spec.bc == "D":
        f = lambda k: math.tanh(k * L) - 2.0 * k
    else:
        f = lambda k: 1.0 / math.tanh(k * L) - 2.0 * k
    k = _scan_root(f, 1e-6, 2.0)
    if k is None:
        return None
    return k, abs(f(k))


def _positive_even_root(L: float, bc: str, branch: int):
    """``branch``-th positive-energy even root ``k`` (branch 0 = lowest)."""
    # tan(kL) is continuous on ((j - 1/2) pi / L, (j + 1/2) pi / L); use x = k L
    if bc == "D":
        g = lambda x: math.sin(x) - 2.0 * (x / L) * math.cos(x)
    else:
        g = lambda x: 2.0 * (x / L) * math.sin(x) + math.cos(x)
    roots = []
    x = 1e-4
    step = 1e-3
    prev = g(x)
    while len(roots) <= branch:
        nxt = x + step
        val = g(nxt)
        if prev == 0.0 or (prev > 0) != (val > 0):
            roots.append(_bisect(g, x, nxt) / L)
        x, prev = nxt, val
        if x > 1e4:
            raise ConvergenceFailure("no positive-energy root found")
    return roots[branch]


def solve_transcendental(spec: IntervalDeltaSpec, allow_nonnegative: bool = True) -> ModelSpectrum:
    """Two lowest eigenvalues from the matching conditions (see module docstring).

    For Dirichlet ends a negative ground state exists only for ``L > 2``; at
    ``L = 2`` the ground state is exactly 0 and below it positive. Pass
    ``allow_nonnegative=False`` to get :class:`NoNegativeRoot` instead.
    """
    if spec.L < 1.0:
        raise InvalidInput("transcendental solver requires L >= 1")
    L = spec.L
    neg = _negative_ground_state(spec)
    if neg is not None:
        k, res = neg
        lam1 = float(-k * k)
    else:
        if not allow_nonnegative:
            raise NoNegativeRoot(f"tanh(kL) = 2k has no root for L = {L} (needs L > 2)")
        if spec.bc == "D" and abs(L - 2.0) < 1e-12:
            lam1, res = 0.0, 0.0
        else:
            k = _positive_even_root(L, spec.bc, 0)
            lam1 = k * k
            res = abs(math.tan(k * L) - 2.0 * k) if spec.bc == "D" else abs(math.tan(k * L) + 0.5 / k)
    odd = (math.pi / L) ** 2 if spec.bc == "D" else (math.pi / (2.0 * L)) ** 2
    even2 = _positive_even_root(L, spec.bc, 1 if lam1 > 0.0 else 0) ** 2
    lam2 = min(odd, even2)
    return ModelSpectrum(lam1, lam2, "transcendental", res)


def interval_matrix(spec: IntervalDeltaSpec, n: int):
    """Symmetric tridiagonal (diag, offdiag) of the finite-difference operator.

    ``n`` (even) uniform intervals on [-L, L]; the node at 0 carries the
    ``-1/h`` point-interaction correction. Neumann ends use half-cell mass
    weights, symmetrized.
    """
    if n < 256 or n % 2:
        raise InvalidInput("n must be even and >= 256")
    h = 2.0 * spec.L / n
    if spec.bc == "D":
        m = n - 1
        diag = np.full(m, 2.0 / h**2)
        off = np.full(m - 1, -1.0 / h**2)
        diag[m // 2] -= 1.0 / h
        return diag, off
    m = n + 1
    diag = np.full(m, 2.0 / h**2)
    diag[0] = diag[-1] = 2.0 / h**2  # (1/h^2) / (1/2)
    off = np.full(m - 1, -1.0 / h**2)
    off[0] = off[-1] = -math.sqrt(2.0) / h**2
    diag[m // 2] -= 1.0 / h
    return diag, off


def _two_lowest(spec: IntervalDeltaSpec, n: int) -> np.ndarray:
    diag, off = interval_matrix(spec, n)
    try:
        return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 1))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def solve_finite_difference(spec: IntervalDeltaSpec, n: int = 4096, richardson: bool = True) -> ModelSpectrum:
    """Two lowest eigenvalues of the grid operator.

    With ``richardson`` the grids n and 2n are combined as ``(4 f - c)/3``;
    ``residual`` then holds the error estimate ``|f - c|/3`` for lambda1.
    """
    coarse = _two_lowest(spec, n)
    if not richardson:
        return ModelSpectrum(float(coarse[0]), float(coarse[1]), "finite_difference", float("nan"))
    fine = _two_lowest(spec, 2 * n)
    lam = (4.0 * fine - coarse) / 3.0
    return ModelSpectrum(float(lam[0]), float(lam[1]), "finite_difference", float(abs(fine[0] - coarse[0]) / 3.0))


def decay_fit(Ls, bc: str):
    """Least-squares fit of ``log|lambda1 + 1/4|`` against ``L``.

    Returns ``(slope, intercept, relative_residual)`` where the residual is the
    largest absolute deviation divided by the spread of the fitted values.
    """
    Ls = np.asarray(Ls, dtype=float)
    y = np.array([math.log(abs(solve_transcendental(IntervalDeltaSpec(L, bc)).lambda1 + 0.25)) for L in Ls])
    slope, intercept = np.polyfit(Ls, y, 1)
    fitted = slope * Ls + intercept
    spread = float(np.ptp(fitted))
    rel = float(np.max(np.abs(y - fitted)) / spread) if spread > 0 else float("inf")
    return float(slope), float(intercept), rel
