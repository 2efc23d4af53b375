import math

import pytest

from cone_spectra import asymptotics as A
from cone_spectra.curves import SphericalLoop, arc_length_reparametrize


def test_random_loops_are_seeded_and_short():
    a = A.random_fourier_loops(12, seed=3)
    b = A.random_fourier_loops(12, seed=3)
    assert a == b
    assert a != A.random_fourier_loops(12, seed=4)
    for loop in a:
        assert math.pi / 6 <= loop.theta0 <= math.pi / 2
        assert all(abs(c) <= 0.1 for pair in loop.coeffs for c in pair)
        assert arc_length_reparametrize(loop).length <= 2 * math.pi + 1e-12


def test_isoperimetric_bound_at_circle():
    th = 0.8
    assert A.isoperimetric_bound(2 * math.pi * math.sin(th)) == pytest.approx(1 / math.tan(th) / (4 * math.pi))


def test_curvature_scaling_breaks_closed_forms():
    rep = A.check_circle_closed_forms(n=256, kappa_hook=lambda k: 2 * k)
    assert rep.status == A.FAIL


def test_sign_flip_breaks_gauss_bonnet():
    loops = A.random_fourier_loops(3)
    assert A.check_gauss_bonnet(loops, 256).status == A.PASS
    assert A.check_gauss_bonnet(loops, 256, surveys={"hook": lambda k: -k}).status == A.FAIL


def test_coarse_grid_is_never_a_false_fail():
    loops = [SphericalLoop.circle(math.pi / 4)] + A.random_fourier_loops(8)
    rep = A.check_isoperimetric(loops, n=64)
    assert rep.status != A.FAIL
    assert all(e["status"] != A.FAIL for e in rep.entries)


def test_quick_suite_has_no_failures():
    reports = A.run_suite(seed=A.DEFAULT_SEED, quick=True)
    assert [r.check for r in reports] == [
        "circle_closed_forms", "minmax_upper_bound", "isoperimetric", "gauss_bonnet", "interval_models",
        "slope_law", "reduced_model_slopes", "multiplicity_growth", "oracle_consistency",
    ]
    assert all(r.status != A.FAIL for r in reports), [(r.check, r.status) for r in reports]


def test_hooked_suite_reports_failure():
    reports = A.run_suite(quick=True, kappa_hook=lambda k: -k)
    status = {r.check: r.status for r in reports}
    assert status["gauss_bonnet"] == A.FAIL


def test_report_serializes():
    rep = A.ValidationReport("x", A.PASS, {"a": 1.0}, {"abs": 1e-6}, "note", [{"status": A.PASS}])
    assert rep.to_dict()["entries"][0]["status"] == "pass"
