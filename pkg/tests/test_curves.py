import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cone_spectra.curves import (
    SphericalLoop,
    arc_length_reparametrize,
    check_injective,
    constant_profile,
    enclosed_area,
    evaluate_frame,
    frame_residual,
    geodesic_curvature,
    synthetic_profile,
)
from cone_spectra.errors import InvalidInput, NonInjectiveCurve, WindowOverlap


def adaptive_simpson(f, a, b, tol=1e-13):
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left, right = simpson(fa, flm, fm, a, m), simpson(fm, frm, fb, m, b)
        if depth > 40 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, tol / 2, depth + 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth + 1)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def raw_speed(loop):
    return lambda t: float(np.linalg.norm(loop.raw(np.array([t]))[1][0]))


WOBBLY = SphericalLoop.fourier(math.pi / 3, [(0.05, 0.0), (0.0, 0.03), (0.01, -0.02)])


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4, math.pi / 3, 2.0])
def test_circle_length_and_curvature(theta):
    prof = geodesic_curvature(SphericalLoop.circle(theta), 256)
    assert prof.length == pytest.approx(2 * math.pi * math.sin(theta), abs=1e-11)
    assert np.allclose(prof.kappa, 1 / math.tan(theta), atol=1e-10)


def test_length_matches_adaptive_simpson():
    # periodic integrand, so split at a few points to keep Simpson honest
    edges = np.linspace(0, 2 * math.pi, 9)
    want = sum(adaptive_simpson(raw_speed(WOBBLY), a, b) for a, b in zip(edges[:-1], edges[1:]))
    assert arc_length_reparametrize(WOBBLY).length == pytest.approx(want, abs=1e-10)


def test_arc_length_parametrization_has_unit_speed():
    amap = arc_length_reparametrize(WOBBLY)
    s = np.linspace(0, amap.length, 97, endpoint=False)
    _, dG, _, _ = evaluate_frame(WOBBLY, s)
    assert np.max(np.abs(np.linalg.norm(dG, axis=1) - 1.0)) < 1e-9


def test_frame_identity_against_high_order_differences():
    prof = geodesic_curvature(WOBBLY, 512)
    h = 1e-3
    s = prof.s[::16]
    normals = [evaluate_frame(WOBBLY, np.mod(s + k * h, prof.length))[3] for k in (-2, -1, 1, 2)]
    dn = (normals[0] - 8 * normals[1] + 8 * normals[2] - normals[3]) / (12 * h)
    _, dG, _, _ = evaluate_frame(WOBBLY, s)
    assert np.max(np.abs(dn - prof.kappa[::16, None] * dG)) < 1e-7
    assert frame_residual(WOBBLY, 1024) < 1e-8


def test_gauss_bonnet_for_perturbed_circle():
    prof = geodesic_curvature(WOBBLY, 1024)
    assert prof.integral(1) + enclosed_area(WOBBLY) == pytest.approx(2 * math.pi, abs=1e-10)


def test_orientation_makes_small_caps_positive():
    prof = geodesic_curvature(SphericalLoop.circle(0.3), 128)
    assert prof.kappa.min() > 0
    assert enclosed_area(SphericalLoop.circle(0.3)) == pytest.approx(2 * math.pi * (1 - math.cos(0.3)), abs=1e-10)


def test_great_circle_has_zero_curvature_and_half_sphere():
    loop = SphericalLoop.circle(math.pi / 2)
    assert np.max(np.abs(geodesic_curvature(loop, 128).kappa)) < 1e-12
    assert enclosed_area(loop) == pytest.approx(2 * math.pi, abs=1e-10)


def test_sampled_circle_reproduces_circle():
    th = math.pi / 4
    phi = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    pts = np.stack([math.sin(th) * np.cos(phi), math.sin(th) * np.sin(phi), np.full_like(phi, math.cos(th))], 1)
    loop = SphericalLoop.samples(pts)
    prof = geodesic_curvature(loop, 256)
    assert prof.length == pytest.approx(2 * math.pi * math.sin(th), rel=1e-6)
    # counter-clockwise samples: the area is measured on the other side
    assert abs(abs(prof.kappa.mean()) - 1.0) < 1e-4
    assert prof.integral(1) + enclosed_area(loop) == pytest.approx(2 * math.pi, abs=1e-6)


def test_repeated_sample_point_rejected():
    pts = [[math.cos(t), math.sin(t), 0.0] for t in np.linspace(0, 2 * math.pi, 10, endpoint=False)]
    with pytest.raises(NonInjectiveCurve):
        SphericalLoop.samples(pts + [pts[3]])


def test_bad_samples_rejected():
    with pytest.raises(InvalidInput):
        SphericalLoop.samples([[1, 0, 0]] * 3)
    with pytest.raises(InvalidInput):
        SphericalLoop.samples([[2.0 * math.cos(t), 2.0 * math.sin(t), 0] for t in np.linspace(0, 6, 10)])


def test_loop_through_pole_rejected():
    with pytest.raises(NonInjectiveCurve):
        SphericalLoop.fourier(0.2, [(0.5, 0.0)])


def test_check_injective_passes_for_simple_loop():
    check_injective(WOBBLY)


@pytest.mark.parametrize("n", [100, 32, 1000])
def test_grid_must_be_power_of_two(n):
    with pytest.raises(InvalidInput):
        geodesic_curvature(SphericalLoop.circle(1.0), n)


def test_synthetic_plateaus():
    eps = 0.02
    prof = synthetic_profile(2 * math.pi, 5, eps, 0.0, 2048)
    assert prof.kappa.max() == pytest.approx(1 / math.tan(eps), rel=1e-12)
    # each plateau holds at least a couple of grid points
    assert np.sum(np.isclose(prof.kappa, 1 / math.tan(eps))) >= 5 * 2
    assert prof.kappa.min() == 0.0


def test_synthetic_overlap_rejected():
    with pytest.raises(WindowOverlap):
        synthetic_profile(1.0, 20, 0.05)


def test_constant_profile_resamples():
    prof = constant_profile(3.0, 0.7, 128)
    fine = prof.resample(512)
    assert fine.n == 512 and np.all(fine.kappa == 0.7)


fourier_coeffs = st.lists(st.tuples(st.floats(-0.1, 0.1), st.floats(-0.1, 0.1)), min_size=1, max_size=3)


@settings(max_examples=25, deadline=None)
@given(theta0=st.floats(math.pi / 6, math.pi / 2), coeffs=fourier_coeffs)
def test_spherical_isoperimetric_inequality(theta0, coeffs):
    loop = SphericalLoop.fourier(theta0, coeffs)
    ell = arc_length_reparametrize(loop).length
    A = enclosed_area(loop)
    assert (2 * math.pi - A) ** 2 >= 4 * math.pi**2 - ell**2 - 1e-9
