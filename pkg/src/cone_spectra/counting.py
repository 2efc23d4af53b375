"""Bound-state counting for half-line operators ``-u'' + (a/r^2 + b/r^3) u``.

Both counters work in the log-radius variable ``tau = ln r`` with
``u(r) = r**(1/2) w(tau)``, which turns the equation at energy ``-E`` into::

    w'' = (a + 1/4 + b exp(-tau) + E exp(2 tau)) w

so an inverse-square well becomes a constant-frequency oscillator and the
number of oscillations stays uniformly resolved over many decades of ``r``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidInput, StiffIntegration, WallTooClose

EXACT = "exact"
PLUS_MINUS_ONE = "±1"


@dataclass(frozen=True)
class HalfLineOperatorSpec:
    x0: float = 1.0
    bc: str = "D"
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not self.x0 > 0.0:
            raise InvalidInput(f"left endpoint must be positive, got {self.x0}")
        if self.bc not in ("D", "N"):
            raise InvalidInput(f"bc must be 'D' or 'N', got {self.bc!r}")

    @property
    def nonnegative(self) -> bool:
        """True when the potential is >= 0 on [x0, inf), so nothing lies below 0."""
        return self.a >= 0.0 and self.a * self.x0 + self.b >= 0.0

    def turning_radius(self, E: float) -> float:
        """Truncation radius: four times past the classical turning point."""
        return 4.0 * max(self.x0, math.sqrt(max(-self.a + 0.75, 1.0)) / math.sqrt(E))


@dataclass(frozen=True)
class Count:
    N: int
    uncertainty: str
    smooth: float  # Pruefer angle / pi at the classical turning point


def _pruefer_scale(spec: HalfLineOperatorSpec) -> float:
    return max(math.sqrt(abs(spec.a + 0.25)), 0.5)


def _pruefer_start(spec: HalfLineOperatorSpec, scale: float) -> float:
    if spec.bc == "D":
        return 0.0
    # u'(x0) = 0  <=>  w' = -w/2
    return math.atan2(1.0, -0.5 / scale)


def turning_tau(spec: HalfLineOperatorSpec, E: float) -> Optional[float]:
    """log of the radius where ``E r^2 = -(a + 1/4)``, or None without a well."""
    c = spec.a + 0.25
    if c >= 0.0:
        return None
    return 0.5 * math.log(-c / E)


def pruefer_phase(spec: HalfLineOperatorSpec, E: float, x_max: Optional[float] = None,
                  rtol: float = 1e-10):
    """Pruefer angle (in units of pi) of the solution at energy ``-E``.

    Returns ``(final, at_turning_point)``; the second equals the first when
    the inverse-square part has no well.
    """
    s = _pruefer_scale(spec)
    c = spec.a + 0.25
    b = spec.b

    def rhs(tau, y):
        phi = y[0]
        q = c + b * math.exp(-tau) + E * math.exp(2.0 * tau)
        sn, cs = math.sin(phi), math.cos(phi)
        return [s * cs * cs - (q / s) * sn * sn]

    tau0 = math.log(spec.x0)
    tau1 = math.log(x_max if x_max is not None else spec.turning_radius(E))
    tt = turning_tau(spec, E)
    tt = tau1 if tt is None else min(max(tt, tau0), tau1)
    sol = solve_ivp(rhs, (tau0, tau1), [_pruefer_start(spec, s)], method="RK45",
                    t_eval=[tt, tau1] if tt < tau1 else [tau1],
                    rtol=rtol, atol=1e-10, max_step=0.5 / s)
    if sol.status != 0:
        raise StiffIntegration(f"integration failed for {spec} at E={E}: {sol.message}")
    return float(sol.y[0, -1] / math.pi), float(sol.y[0, 0] / math.pi)


def count_below(spec: HalfLineOperatorSpec, E: float, x_max: Optional[float] = None) -> Count:
    """Number of eigenvalues below ``-E``, by counting zeros of the initial-value solution.

    The solution starts from the boundary condition at ``x0`` and is followed
    to ``x_max`` (default :meth:`HalfLineOperatorSpec.turning_radius`).
    Sturm oscillation theory makes the zero count exact for the half-line
    problem; the truncation and the endpoint leave an ambiguity of one.
    """
    if not E > 0.0:
        raise InvalidInput(f"E must be positive, got {E}")
    if spec.nonnegative:
        return Count(0, EXACT, 0.0)
    final, turning = pruefer_phase(spec, E, x_max)
    return Count(int(math.floor(final)), PLUS_MINUS_ONE, turning)


# ---------------------------------------------------------------------------
# Matrix oracle


def _sturm_negatives(diag: np.ndarray, off: np.ndarray) -> int:
    """Number of negative eigenvalues of a symmetric tridiagonal matrix (LDL^T inertia)."""
    count = 0
    d = float(diag[0])
    tiny = 1e-300
    if d < 0.0:
        count += 1
    for i in range(1, len(diag)):
        if d == 0.0:
            d = tiny
        d = float(diag[i]) - float(off[i - 1]) ** 2 / d
        if d < 0.0:
            count += 1
    return count


def log_grid_matrix(spec: HalfLineOperatorSpec, E: float, x_wall: float, step: float = 0.005):
    """Tridiagonal ``K + E W`` on a uniform ``tau`` grid over ``(x0, x_wall)``."""
    tau0 = math.log(spec.x0)
    tau1 = math.log(x_wall)
    nu = math.sqrt(abs(spec.a + 0.25))
    h = min(step, 0.05 / max(nu, 1.0))
    m = max(int(math.ceil((tau1 - tau0) / h)), 16)
    h = (tau1 - tau0) / m
    tau = tau0 + h * np.arange(m + 1)
    q = spec.a + 0.25 + spec.b * np.exp(-tau)
    weight = np.exp(2.0 * tau)
    diag = 2.0 / h + h * q + E * h * weight
    off = np.full(m, -1.0 / h)
    if spec.bc == "N":
        # natural condition of the log-variable form: boundary term -w(tau0)^2/2
        diag[0] = 1.0 / h + 0.5 * h * q[0] - 0.5 + 0.5 * E * h * weight[0]
        return diag[:-1], off[:-1]
    return diag[1:-1], off[1:-1]


def count_below_matrix(spec: HalfLineOperatorSpec, E: float, x_wall: Optional[float] = None,
                       check_wall: bool = True) -> int:
    """Independent count from the inertia of a finite-difference matrix with a wall."""
    if not E > 0.0:
        raise InvalidInput(f"E must be positive, got {E}")
    if x_wall is None:
        x_wall = 2.0 * spec.turning_radius(E)
    n = _sturm_negatives(*log_grid_matrix(spec, E, x_wall))
    if check_wall:
        n2 = _sturm_negatives(*log_grid_matrix(spec, E, 2.0 * x_wall))
        if n2 != n:
            raise WallTooClose(f"count changed {n} -> {n2} on doubling the wall at {x_wall:g}")
    return n


# ---------------------------------------------------------------------------
# Counting curves


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    n_points: int


@dataclass(frozen=True)
class CountingCurve:
    """Counts ``N`` below ``-E`` on an energy grid, with two slope fits.

    ``slope_fit`` regresses the smooth count (Pruefer phase at the turning
    point, within one of ``N``) on ``|ln E|``; ``integer_fit`` regresses the
    integer counts themselves, which carry a sawtooth bias when ``N`` moves by
    only a step or two across the grid.
    """

    E: np.ndarray
    N: np.ndarray
    uncertainty: tuple
    phase: np.ndarray
    slope_fit: SlopeFit
    integer_fit: SlopeFit
    label: str = ""
    reference: float = float("nan")
    specs: tuple = ()

    def rows(self):
        return list(zip(self.E.tolist(), self.N.tolist(), self.uncertainty))


def fit_slope(E: Sequence[float], y: Sequence[float], drop_decades: float = 1.0) -> SlopeFit:
    """Least squares ``y ~ slope * |ln E| + intercept`` without the largest decade of E.

    ``residual`` is the standard error of the fitted slope.
    """
    E = np.asarray(E, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = E <= E.max() / 10.0**drop_decades * (1.0 + 1e-12)
    x = np.abs(np.log(E[keep]))
    y = y[keep]
    if len(x) < 3:
        raise InvalidInput("need at least three energies below the dropped decade")
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ coef
    dof = max(len(x) - 2, 1)
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(float(r @ r) / dof / sxx) if sxx > 0 else float("inf")
    return SlopeFit(float(coef[0]), float(coef[1]), stderr, int(len(x)))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CONE_SPECTRA_THREADS", "1")))
    except ValueError:
        return 1


def counting_curve(specs: Sequence[HalfLineOperatorSpec], E_grid: Sequence[float], label: str = "",
                   reference: float = float("nan")) -> CountingCurve:
    """Sum of ``count_below`` over the given operators at each energy.

    Rows are sorted by increasing E. Counts are made non-increasing in E by
    taking the running maximum from the largest E downwards.
    """
    E = np.sort(np.asarray(E_grid, dtype=float))
    if np.any(E <= 0.0):
        raise InvalidInput("energies must be positive")
    specs = list(specs)

    def row(e):
        counts = [count_below(sp, e) for sp in specs]
        n = sum(c.N for c in counts)
        ph = sum(c.smooth for c in counts)
        unc = PLUS_MINUS_ONE if any(c.uncertainty != EXACT for c in counts) else EXACT
        return n, unc, ph

    workers = _threads()
    if workers > 1 and len(E) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row, E))
    else:
        results = [row(e) for e in E]
    N = np.array([r[0] for r in results], dtype=int)
    for i in range(len(N) - 2, -1, -1):
        N[i] = max(N[i], N[i + 1])
    unc = tuple(r[1] for r in results)
    phase = np.array([r[2] for r in results])
    return CountingCurve(E, N, unc, phase, fit_slope(E, phase), fit_slope(E, N), label, reference, tuple(specs))


def reconcile(specs: Sequence[HalfLineOperatorSpec], E_grid: Sequence[float]) -> int:
    """Largest per-operator gap between :func:`count_below` and the matrix oracle."""
    worst = 0
    for sp in specs:
        for e in E_grid:
            ode = count_below(sp, float(e)).N
            mat = count_below_matrix(sp, float(e), check_wall=False)
            worst = max(worst, abs(ode - mat))
    return worst


def slope_reference(potential_coeffs: Sequence[float]) -> float:
    """``(1/2pi) sum sqrt((-a - 1/4)_+)``: the asymptotic slope of a mode sum."""
    return sum(math.sqrt(max(-a - 0.25, 0.0)) for a in potential_coeffs) / (2.0 * math.pi)


def _contributing(lams: np.ndarray, shift: float, b: float, x0: float) -> np.ndarray:
    a = lams - shift
    keep = (a < 0.0) | (a * x0 + b < 0.0)
    if keep.all():
        raise InvalidInput("spectrum too short: its top mode still has a negative potential; "
                           "request more eigenvalues")
    return a[keep]


def predict_layer_counting(spectrum, b_D: float = 0.0, b_N: float = 0.0, x0: float = 1.0, E_grid=None):
    """Counting curves of the separated layer models ``sum_m N_{-E}(G^[m])``.

    Mode ``m`` is the half-line operator with potential
    ``(lam_m - 1/4)/r^2 + b/r^3`` on ``(x0, inf)``: Dirichlet with ``b = b_D``
    for the lower-bound model and Neumann with ``b = -b_N`` for the upper-bound
    model. Returns ``(dirichlet_curve, neumann_curve)``.
    """
    E_grid = default_energy_grid() if E_grid is None else E_grid
    lams = np.asarray(spectrum.eigenvalues, dtype=float)
    curves = []
    for bc, b in (("D", b_D), ("N", -b_N)):
        coeffs = _contributing(lams, 0.25, b, x0)
        specs = [HalfLineOperatorSpec(x0, bc, float(a), b) for a in coeffs]
        curves.append(counting_curve(specs, E_grid, f"layer-{bc}", slope_reference(coeffs)))
    return curves[0], curves[1]


def predict_delta_counting(spectrum, delta: float = 0.0, E_grid=None) -> CountingCurve:
    """Counting curve of the separated point-interaction model.

    Mode ``m`` has potential ``(lam_m - (1 - delta)/4)/r^2`` on ``(1, inf)``
    with a Dirichlet condition at 1.
    """
    if not 0.0 <= delta <= 0.1:
        raise InvalidInput(f"delta must lie in [0, 0.1], got {delta}")
    E_grid = default_energy_grid() if E_grid is None else E_grid
    lams = np.asarray(spectrum.eigenvalues, dtype=float)
    coeffs = _contributing(lams, (1.0 - delta) / 4.0, 0.0, 1.0)
    specs = [HalfLineOperatorSpec(1.0, "D", float(a), 0.0) for a in coeffs]
    return counting_curve(specs, E_grid, "delta", slope_reference(coeffs))


def default_energy_grid(emin: float = 1e-12, emax: float = 1e-4, per_decade: int = 6) -> np.ndarray:
    if not 0.0 < emin < emax:
        raise InvalidInput("need 0 < emin < emax")
    decades = math.log10(emax / emin)
    return np.logspace(math.log10(emin), math.log10(emax), int(round(decades * per_decade)) + 1)
