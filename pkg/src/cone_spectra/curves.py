"""Cross-section loops on the unit sphere and their geodesic curvature.

Loops are described in a raw parameter ``t`` over one period. Every loop is
reparametrized by arc length before anything curvature-related is computed,
so all frames returned here are with respect to arc length ``s``.

Orientation convention: the parametric families (``circle`` and ``fourier``)
run clockwise when seen from the north pole, which makes the geodesic
curvature of a geodesic circle of radius ``theta < pi/2`` equal to
``+cot(theta)`` and puts the cap on the side that ``-n`` points to.
Sampled loops keep the orientation of the supplied points.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator, make_interp_spline

from .errors import (
    FrameIdentityViolated,
    InvalidInput,
    NonInjectiveCurve,
    NonRegularCurve,
    OrientationAmbiguous,
    WindowOverlap,
)

TWO_PI = 2.0 * math.pi

# Gauss-Legendre nodes on [0, 1] for the cumulative-length table.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W

OVERSAMPLE = 16
FRAME_CHECK_MIN_N = 1024


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_grid_size(n: int) -> None:
    if not _is_power_of_two(n) or n < 64:
        raise InvalidInput(f"grid size must be a power of two >= 64, got {n}")


# ---------------------------------------------------------------------------
# Loops


@dataclass(frozen=True)
class SphericalLoop:
    """A closed regular curve on the unit sphere.

    Use :meth:`circle`, :meth:`fourier` or :meth:`samples` to build one.
    """

    kind: str
    theta0: float = 0.0
    coeffs: tuple = ()
    points: tuple = ()
    _spline: object = field(default=None, compare=False, repr=False, hash=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def circle(cls, theta: float) -> "SphericalLoop":
        """Geodesic circle of geodesic radius ``theta`` around the north pole."""
        if not 0.0 < theta < math.pi:
            raise InvalidInput(f"geodesic radius must lie in (0, pi), got {theta}")
        return cls(kind="circle", theta0=float(theta))

    @classmethod
    def fourier(cls, theta0: float, coeffs: Sequence[Sequence[float]]) -> "SphericalLoop":
        """Colatitude ``theta0 + sum_k a_k cos(k phi) + b_k sin(k phi)`` over azimuth."""
        cf = tuple((float(a), float(b)) for a, b in coeffs)
        amp = sum(abs(a) + abs(b) for a, b in cf)
        if not (0.0 < theta0 - amp and theta0 + amp < math.pi):
            # only a sufficient bound; the exact range is checked on the grid
            t = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
            th = _fourier_theta(float(theta0), cf, t)[0]
            if th.min() <= 0.0 or th.max() >= math.pi:
                raise NonInjectiveCurve("colatitude leaves (0, pi); the loop crosses a pole")
        return cls(kind="fourier", theta0=float(theta0), coeffs=cf)

    @classmethod
    def samples(cls, points: Sequence[Sequence[float]]) -> "SphericalLoop":
        """Closed loop through the given points, joined by a periodic quintic spline."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInput("samples must be a list of 3-vectors")
        if len(pts) > 1 and np.linalg.norm(pts[0] - pts[-1]) < 1e-12:
            pts = pts[:-1]
        if len(pts) < 8:
            raise InvalidInput("need at least 8 distinct sample points")
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-6:
            raise InvalidInput("sample points must lie on the unit sphere")
        pts = pts / norms[:, None]
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        np.fill_diagonal(d, np.inf)
        if d.min() < 1e-12:
            raise NonInjectiveCurve("repeated sample point")
        closed = np.vstack([pts, pts[:1]])
        chord = np.linalg.norm(np.diff(closed, axis=0), axis=1)
        knots = np.concatenate([[0.0], np.cumsum(chord)])
        spline = make_interp_spline(knots, closed, k=5, bc_type="periodic")
        return cls(kind="samples", points=tuple(map(tuple, pts)), _spline=spline)

    # -- raw parametrization ----------------------------------------------

    @property
    def period(self) -> float:
        if self.kind == "samples":
            return float(self._spline.t[-self._spline.k - 1])
        return TWO_PI

    def raw(self, t: np.ndarray):
        """Points and first two raw-parameter derivatives, each of shape (len(t), 3)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "samples":
            return _normalized_spline(self._spline, np.mod(t, self.period))
        th, th1, th2 = _fourier_theta(self.theta0, self.coeffs, t)
        return _colatitude_curve(th, th1, th2, t)

    def to_spec(self) -> dict:
        if self.kind == "circle":
            return {"kind": "circle", "theta": self.theta0}
        if self.kind == "fourier":
            return {"kind": "fourier", "theta0": self.theta0, "coeffs": [list(c) for c in self.coeffs]}
        return {"kind": "samples", "points": [list(p) for p in self.points]}


def _fourier_theta(theta0, coeffs, t):
    # azimuth runs as phi = -t (clockwise from above)
    th = np.full_like(t, theta0)
    th1 = np.zeros_like(t)
    th2 = np.zeros_like(t)
    for k, (a, b) in enumerate(coeffs, start=1):
        c, s = np.cos(k * t), np.sin(k * t)
        th += a * c - b * s
        th1 += -k * (a * s + b * c)
        th2 += -k * k * (a * c - b * s)
    return th, th1, th2


def _colatitude_curve(th, th1, th2, t):
    s, c = np.sin(th), np.cos(th)
    ct, st = np.cos(t), np.sin(t)
    p = np.stack([s * ct, -s * st, c], axis=-1)
    p1 = np.stack([c * th1 * ct - s * st, -c * th1 * st - s * ct, -s * th1], axis=-1)
    rad = -s * th1 * th1 + c * th2
    p2 = np.stack(
        [
            rad * ct - 2.0 * c * th1 * st - s * ct,
            -rad * st - 2.0 * c * th1 * ct + s * st,
            -c * th1 * th1 - s * th2,
        ],
        axis=-1,
    )
    return p, p1, p2


def _normalized_spline(spline, t):
    q = spline(t)
    q1 = spline(t, 1)
    q2 = spline(t, 2)
    g = np.einsum("ij,ij->i", q, q)
    g1 = 2.0 * np.einsum("ij,ij->i", q, q1)
    g2 = 2.0 * (np.einsum("ij,ij->i", q1, q1) + np.einsum("ij,ij->i", q, q2))
    f = g ** -0.5
    f1 = -0.5 * g ** -1.5 * g1
    f2 = 0.75 * g ** -2.5 * g1 * g1 - 0.5 * g ** -1.5 * g2
    p = f[:, None] * q
    p1 = f1[:, None] * q + f[:, None] * q1
    p2 = f2[:, None] * q + 2.0 * f1[:, None] * q1 + f[:, None] * q2
    return p, p1, p2


def check_injective(loop: SphericalLoop, resolution: int = 512) -> None:
    """Raise :class:`NonInjectiveCurve` if two non-neighbouring samples nearly coincide."""
    t = np.linspace(0.0, loop.period, resolution, endpoint=False)
    p = loop.raw(t)[0]
    step = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
    d = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
    idx = np.arange(resolution)
    gap = np.abs(idx[:, None] - idx[None, :])
    gap = np.minimum(gap, resolution - gap)
    far = gap > 2
    # two samples further apart along the curve than a few steps must stay
    # further apart in space than half a step
    if np.any(d[far] < 0.5 * step.min()):
        raise NonInjectiveCurve("loop self-intersects")


# ---------------------------------------------------------------------------
# Arc length


@dataclass(frozen=True)
class ArcLengthMap:
    """Cumulative arc length over the raw parameter and its inverse."""

    loop: SphericalLoop
    t_grid: np.ndarray
    cumulative: np.ndarray

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    @functools.cached_property
    def _inverse(self):
        return PchipInterpolator(self.cumulative, self.t_grid)

    def length_at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        h = self.t_grid[1] - self.t_grid[0]
        j = np.clip(np.floor(t / h).astype(int), 0, len(self.t_grid) - 2)
        t0 = self.t_grid[j]
        dt = t - t0
        nodes = t0[:, None] + dt[:, None] * _GL_X[None, :]
        sp = _speed(self.loop, nodes.ravel()).reshape(nodes.shape)
        return self.cumulative[j] + dt * (sp @ _GL_W)

    def param_at(self, s) -> np.ndarray:
        """Raw parameter at arc length ``s`` (Newton-polished to round-off)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = self._inverse(s)
        for _ in range(3):
            t = t - (self.length_at(t) - s) / _speed(self.loop, t)
        return t


def _speed(loop: SphericalLoop, t: np.ndarray) -> np.ndarray:
    return np.linalg.norm(loop.raw(t)[1], axis=-1)


@functools.lru_cache(maxsize=64)
def arc_length_reparametrize(loop: SphericalLoop, resolution: int = 1024) -> ArcLengthMap:
    """Tabulate arc length at ``OVERSAMPLE * resolution`` raw-parameter nodes."""
    m = OVERSAMPLE * resolution
    t = np.linspace(0.0, loop.period, m + 1)
    h = t[1] - t[0]
    nodes = t[:-1, None] + h * _GL_X[None, :]
    sp = _speed(loop, nodes.ravel()).reshape(nodes.shape)
    if sp.min() < 1e-8:
        raise NonRegularCurve("parametrization speed vanishes")
    cum = np.concatenate([[0.0], np.cumsum(h * (sp @ _GL_W))])
    return ArcLengthMap(loop=loop, t_grid=t, cumulative=cum)


def evaluate_frame(loop: SphericalLoop, s):
    """Return ``(G, dG, d2G, n)`` at arc length(s) ``s``, with ``n = G x dG``."""
    amap = arc_length_reparametrize(loop)
    scalar = np.ndim(s) == 0
    t = amap.param_at(np.mod(s, amap.length))
    p, p1, p2 = loop.raw(t)
    speed = np.linalg.norm(p1, axis=-1)
    if speed.min() < 1e-8:
        raise NonRegularCurve("parametrization speed vanishes")
    tan = p1 / speed[:, None]
    along = np.einsum("ij,ij->i", p2, tan)
    acc = (p2 - along[:, None] * tan) / (speed**2)[:, None]
    n = np.cross(p, tan)
    if scalar:
        return p[0], tan[0], acc[0], n[0]
    return p, tan, acc, n


# ---------------------------------------------------------------------------
# Curvature profiles


@dataclass(frozen=True)
class CurvatureProfile:
    """Geodesic curvature on a uniform arc-length grid of ``[0, length)``."""

    length: float
    s: np.ndarray
    kappa: np.ndarray
    source: str = "synthetic"
    sampler: Optional[Callable[[int], "CurvatureProfile"]] = field(
        default=None, compare=False, repr=False
    )

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def h(self) -> float:
        return self.length / self.n

    def resample(self, n: int) -> "CurvatureProfile":
        if n == self.n:
            return self
        if self.sampler is None:
            raise InvalidInput("profile has no sampler; cannot change its grid")
        return self.sampler(n)

    def integral(self, power: int = 1) -> float:
        """Periodic trapezoid rule for the integral of ``kappa**power``."""
        return float(np.sum(self.kappa**power) * self.h)

    def with_kappa(self, fn: Callable[[np.ndarray], np.ndarray]) -> "CurvatureProfile":
        """Profile with ``fn`` applied to the curvature values, on every grid."""
        inner = self.sampler

        def sampler(n):
            return inner(n).with_kappa(fn)

        return CurvatureProfile(
            self.length, self.s, np.asarray(fn(self.kappa), dtype=float), self.source,
            sampler if inner is not None else None,
        )


def _spectral_derivative(values: np.ndarray, length: float) -> np.ndarray:
    n = values.shape[0]
    k = np.fft.fftfreq(n, d=length / n) * TWO_PI
    ik = 1j * k
    if n % 2 == 0:
        ik[n // 2] = 0.0
    return np.real(np.fft.ifft(ik[:, None] * np.fft.fft(values, axis=0), axis=0))


def frame_residual(loop: SphericalLoop, n: int) -> float:
    """max |n'(s) - kappa(s) G'(s)| with n' from spectral differentiation of n."""
    amap = arc_length_reparametrize(loop)
    s = np.arange(n) * (amap.length / n)
    g, g1, g2, nv = evaluate_frame(loop, s)
    kappa = np.einsum("ij,ij->i", np.cross(g, g2), g1)
    dn = _spectral_derivative(nv, amap.length)
    return float(np.max(np.linalg.norm(dn - kappa[:, None] * g1, axis=1)))


def geodesic_curvature(loop: SphericalLoop, n: int = 2048, check: bool = True) -> CurvatureProfile:
    """Sample ``kappa = (G x G'') . G'`` on ``n`` uniform arc-length nodes."""
    _check_grid_size(n)
    amap = arc_length_reparametrize(loop)
    ell = amap.length
    s = np.arange(n) * (ell / n)
    g, g1, g2, _ = evaluate_frame(loop, s)
    kappa = np.einsum("ij,ij->i", np.cross(g, g2), g1)
    if check:
        if np.max(np.abs(np.linalg.norm(g, axis=1) - 1.0)) > 1e-10:
            raise NonRegularCurve("frame left the unit sphere")
        m = max(n, FRAME_CHECK_MIN_N)
        res = frame_residual(loop, m)
        if res > 1e-6 * (1.0 + np.max(np.abs(kappa))):
            raise FrameIdentityViolated(f"n' - kappa G' residual {res:.3e}")

    def sampler(m: int) -> CurvatureProfile:
        return geodesic_curvature(loop, m, check=False)

    return CurvatureProfile(ell, s, kappa, "from_curve", sampler)


def constant_profile(length: float, value: float, n: int = 2048) -> CurvatureProfile:
    """Synthetic profile with constant curvature ``value``."""
    _check_grid_size(n)
    s = np.arange(n) * (length / n)

    def sampler(m):
        return constant_profile(length, value, m)

    return CurvatureProfile(float(length), s, np.full(n, float(value)), "synthetic", sampler)


def _smoothstep5(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


def synthetic_profile(
    length: float, m: int, eps: float, baseline: float = 0.0, n: int = 2048
) -> CurvatureProfile:
    """Curvature ``cot(eps)`` on ``m`` windows of half-width ``eps`` centred at ``j*length/m``.

    Outside the windows the curvature equals ``baseline``; the two levels are
    joined by a quintic smoothstep over a distance ``eps/2``.
    """
    _check_grid_size(n)
    if m < 1 or eps <= 0.0 or length <= 0.0:
        raise InvalidInput("need m >= 1, eps > 0, length > 0")
    if 3.0 * eps * m >= length:
        raise WindowOverlap(f"{m} windows of half-width {eps} (plus transitions) overlap on length {length}")
    plateau = 1.0 / math.tan(eps)
    period = length / m
    s = np.arange(n) * (length / n)
    d = np.abs(np.mod(s + 0.5 * period, period) - 0.5 * period)
    w = np.where(d < eps, 1.0, _smoothstep5(1.0 - (d - eps) / (0.5 * eps)))
    kappa = baseline + (plateau - baseline) * w
    kappa[d < eps] = plateau

    def sampler(k):
        return synthetic_profile(length, m, eps, baseline, k)

    return CurvatureProfile(float(length), s, kappa, "synthetic", sampler)


# ---------------------------------------------------------------------------
# Area


def _rotation_to_pole(c: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping unit vector ``c`` to +z."""
    z = c / np.linalg.norm(c)
    a = np.array([1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    x = a - (a @ z) * z
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.stack([x, y, z])


def enclosed_area(loop: SphericalLoop, pole: Optional[Sequence[float]] = None, resolution: int = 16384) -> float:
    """Area of the region bounded by the loop on the side that ``-n`` points to.

    The region is swept as a fan of infinitesimal spherical triangles from
    ``pole``, which requires the loop to be star-shaped with respect to that
    pole. The default pole is the north pole for the parametric families (they
    are graphs over the azimuth) and the normalized centroid for samples.
    """
    t = np.linspace(0.0, loop.period, resolution, endpoint=False)
    p, p1, _ = loop.raw(t)
    if pole is None and loop.kind != "samples":
        pole = (0.0, 0.0, 1.0)
    if pole is None:
        c = np.mean(p, axis=0)
        if np.linalg.norm(c) < 1e-8:
            # planar loop through the origin (great circle): use the mean normal
            c = np.mean(np.cross(p, p1) / np.linalg.norm(p1, axis=1)[:, None], axis=0)
    else:
        c = np.asarray(pole, dtype=float)
    if np.linalg.norm(c) < 1e-8:
        raise OrientationAmbiguous("centroid at the origin; supply a pole")
    rot = _rotation_to_pole(c)
    q = p @ rot.T
    q1 = p1 @ rot.T
    x, y, z = q.T
    if z.min() <= -1.0 + 1e-9:
        raise OrientationAmbiguous("loop passes through the antipode of the pole")
    cross = x * q1[:, 1] - y * q1[:, 0]
    if not (np.all(cross > 0.0) or np.all(cross < 0.0)):
        raise OrientationAmbiguous("loop is not star-shaped about the pole; supply another pole")
    swept = float(np.sum(cross / (1.0 + z)) * (loop.period / resolution))
    # n points toward the pole for a counter-clockwise sweep
    return 4.0 * math.pi - swept if swept > 0.0 else -swept
