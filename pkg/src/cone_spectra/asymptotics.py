"""Numerical checks of the closed forms, inequalities and slope laws.

Each ``check_*`` function returns a :class:`ValidationReport`; failures are
report entries, never exceptions. :func:`run_suite` runs the whole
acceptance set in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import counting, models
from .curves import SphericalLoop, enclosed_area, geodesic_curvature, synthetic_profile
from .errors import ConeSpectraError, NearZeroEigenvalue, WallTooClose
from .operator import accumulation_constant, minmax_upper_bound, spectrum_below

PASS, FAIL, INCONCLUSIVE, SKIPPED = "pass", "fail", "inconclusive", "skipped"
DEFAULT_SEED = 7


@dataclass
class ValidationReport:
    check: str
    status: str
    measured: Dict = field(default_factory=dict)
    tolerances: Dict = field(default_factory=dict)
    notes: str = ""
    entries: List[Dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _overall(entries: Sequence[dict], max_inconclusive: float = 0.0) -> str:
    statuses = [e["status"] for e in entries if e["status"] != SKIPPED]
    if any(s == FAIL for s in statuses):
        return FAIL
    if not statuses:
        return INCONCLUSIVE
    frac = sum(s == INCONCLUSIVE for s in statuses) / len(statuses)
    if frac > max_inconclusive:
        return INCONCLUSIVE
    return PASS


# ---------------------------------------------------------------------------
# Loops and per-loop survey


def random_fourier_loops(count: int, seed: int = DEFAULT_SEED, max_order: int = 4) -> List[SphericalLoop]:
    """Seeded perturbed circles with length at most 2 pi.

    ``theta0`` is uniform on [pi/6, pi/2]; each coefficient is N(0, 0.05^2)
    clipped to [-0.1, 0.1]. Coefficients are halved until the length is at
    most 2 pi.
    """
    rng = np.random.default_rng(seed)
    loops = []
    while len(loops) < count:
        theta0 = rng.uniform(math.pi / 6.0, math.pi / 2.0)
        coeffs = np.clip(rng.normal(0.0, 0.05, size=(max_order, 2)), -0.1, 0.1)
        for _ in range(60):
            try:
                loop = SphericalLoop.fourier(theta0, coeffs)
                ell = _length(loop)
            except ConeSpectraError:
                break
            if ell <= 2.0 * math.pi:
                loops.append(loop)
                break
            coeffs = 0.5 * coeffs
    return loops


def _length(loop: SphericalLoop) -> float:
    from .curves import arc_length_reparametrize

    return arc_length_reparametrize(loop).length


@dataclass
class LoopSurvey:
    loop: SphericalLoop
    length: float
    area: float
    kappa_integral: float
    bound_minmax: float
    lambda1: float
    lambda1_error: float
    k_S: Optional[float]
    k_S_error: float
    near_zero: bool
    constant_kappa: bool


def survey_loop(loop: SphericalLoop, n: int = 2048,
                kappa_hook: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> LoopSurvey:
    profile = geodesic_curvature(loop, n)
    if kappa_hook is not None:
        profile = profile.with_kappa(kappa_hook)
    spec = spectrum_below(profile, 0.0)
    try:
        ac = accumulation_constant(spec, strict=True)
        ks, kerr, near = ac.k_S, ac.error, False
    except NearZeroEigenvalue:
        ac = accumulation_constant(spec, strict=False)
        ks, kerr, near = ac.k_S, ac.error, True
    kap = profile.kappa
    return LoopSurvey(
        loop=loop,
        length=profile.length,
        area=enclosed_area(loop),
        kappa_integral=profile.integral(1),
        bound_minmax=minmax_upper_bound(profile),
        lambda1=float(spec.eigenvalues[0]),
        lambda1_error=float(spec.richardson_error[0]),
        k_S=ks,
        k_S_error=kerr,
        near_zero=near,
        constant_kappa=bool(np.ptp(kap) <= 1e-12 * (1.0 + np.max(np.abs(kap)))),
    )


def isoperimetric_bound(length: float) -> float:
    return math.sqrt(4.0 * math.pi**2 - length**2) / (4.0 * math.pi * length)


# ---------------------------------------------------------------------------
# Checks


def check_circle_closed_forms(thetas=(math.pi / 6, math.pi / 4, math.pi / 3), n: int = 2048,
                              tol: float = 1e-6, kappa_hook=None) -> ValidationReport:
    entries = []
    for th in thetas:
        profile = geodesic_curvature(SphericalLoop.circle(th), n)
        if kappa_hook is not None:
            profile = profile.with_kappa(kappa_hook)
        spec = spectrum_below(profile, 0.0)
        ks = accumulation_constant(spec, strict=False).k_S
        want = (-1.0 / math.tan(th) ** 2 / 4.0, (4.0 - math.cos(th) ** 2) / (4.0 * math.sin(th) ** 2),
                1.0 / math.tan(th) / (4.0 * math.pi))
        got = (float(spec.eigenvalues[0]), float(spec.eigenvalues[1]), ks)
        dev = [abs(g - w) for g, w in zip(got, want)]
        entries.append({"theta": th, "lambda1": got[0], "lambda2": got[1], "k_S": ks,
                        "deviations": dev, "status": PASS if max(dev) <= tol else FAIL})
    return ValidationReport("circle_closed_forms", _overall(entries), {"max_deviation": max(max(e["deviations"]) for e in entries)},
                            {"abs": tol}, "lambda1, lambda2 and k_S of circular cones", entries)


def check_minmax(loops: Sequence[SphericalLoop], n: int = 2048, tol: float = 1e-8,
                 surveys: Optional[dict] = None) -> ValidationReport:
    entries = []
    for i, loop in enumerate(loops):
        sv = _get_survey(loop, n, surveys)
        ok = sv.lambda1 <= sv.bound_minmax + tol and (sv.k_S or 0.0) > 0.0
        entries.append({"loop": i, "lambda1": sv.lambda1, "bound": sv.bound_minmax, "k_S": sv.k_S,
                        "status": PASS if ok else FAIL})
    return ValidationReport("minmax_upper_bound", _overall(entries), {"loops": len(entries)},
                            {"abs": tol}, "lambda1 <= -(1/4l) int kappa^2 and k_S > 0", entries)


def check_isoperimetric(loops: Sequence[SphericalLoop], n: int = 2048, tol: float = 1e-8,
                        equality_tol: float = 1e-6, max_inconclusive: float = 0.05,
                        surveys: Optional[dict] = None) -> ValidationReport:
    """k_S against sqrt(4 pi^2 - l^2) / (4 pi l) for loops of length <= 2 pi."""
    entries = []
    for i, loop in enumerate(loops):
        ell = _length(loop)
        if ell > 2.0 * math.pi:
            entries.append({"loop": i, "length": ell, "status": SKIPPED, "note": "length exceeds 2 pi"})
            continue
        sv = _get_survey(loop, n, surveys)
        bound = isoperimetric_bound(sv.length)
        gap = sv.k_S - bound
        err = sv.k_S_error
        if gap < -tol - err:
            status = FAIL
        elif sv.constant_kappa:
            if err > equality_tol:
                status = INCONCLUSIVE
            else:
                status = PASS if abs(gap) <= equality_tol else FAIL
        elif sv.near_zero or gap <= err or gap < -tol:
            status = INCONCLUSIVE
        else:
            status = PASS
        entries.append({"loop": i, "kind": loop.kind, "length": sv.length, "k_S": sv.k_S, "bound": bound,
                        "gap": gap, "error": err, "status": status})
    incon = sum(e["status"] == INCONCLUSIVE for e in entries)
    return ValidationReport("isoperimetric", _overall(entries, max_inconclusive),
                            {"loops": len(entries), "inconclusive": incon,
                             "min_gap": min((e["gap"] for e in entries if "gap" in e), default=None)},
                            {"abs": tol, "equality": equality_tol, "max_inconclusive_fraction": max_inconclusive},
                            "k_S >= sqrt(4 pi^2 - l^2)/(4 pi l), equality for circles", entries)


def check_gauss_bonnet(loops: Sequence[SphericalLoop], n: int = 2048, tol: float = 1e-6,
                       surveys: Optional[dict] = None) -> ValidationReport:
    entries = []
    for i, loop in enumerate(loops):
        sv = _get_survey(loop, n, surveys)
        res = sv.kappa_integral + sv.area - 2.0 * math.pi
        entries.append({"loop": i, "area": sv.area, "kappa_integral": sv.kappa_integral, "residual": res,
                        "status": PASS if abs(res) <= tol else FAIL})
    return ValidationReport("gauss_bonnet", _overall(entries),
                            {"max_residual": max(abs(e["residual"]) for e in entries)},
                            {"abs": tol}, "int kappa ds + A = 2 pi", entries)


def check_interval_models(Ls=(2.0, 5.0, 10.0, 20.0), n: int = 4096, tol: float = 1e-6,
                          fit_Ls=(5.0, 10.0, 15.0, 20.0), fit_tol: float = 0.05) -> ValidationReport:
    entries = []
    for bc in ("D", "N"):
        for L in Ls:
            spec = models.IntervalDeltaSpec(L, bc)
            tr = models.solve_transcendental(spec)
            fd = models.solve_finite_difference(spec, n)
            dev = max(abs(tr.lambda1 - fd.lambda1), abs(tr.lambda2 - fd.lambda2))
            sandwich = tr.lambda1 <= -0.25 if bc == "N" else tr.lambda1 >= -0.25
            ok = dev <= tol and sandwich and tr.lambda2 >= 0.0
            entries.append({"bc": bc, "L": L, "lambda1": tr.lambda1, "lambda2": tr.lambda2,
                            "lambda1_fd": fd.lambda1, "deviation": dev, "sandwich": sandwich,
                            "status": PASS if ok else FAIL})
        slope, intercept, rel = models.decay_fit(fit_Ls, bc)
        entries.append({"bc": bc, "decay_slope": slope, "decay_intercept": intercept, "fit_residual": rel,
                        "status": PASS if rel <= fit_tol and slope < 0.0 else FAIL})
    return ValidationReport("interval_models", _overall(entries), {"max_deviation": max(e.get("deviation", 0.0) for e in entries)},
                            {"abs": tol, "fit_residual": fit_tol},
                            "transcendental vs finite differences; sandwich around -1/4; exponential approach", entries)


def check_slope_law(a_values=(-0.5, -1.0, -2.0, -5.0), E_grid=None, rel_tol: float = 0.10,
                    bounded_a: float = -0.2, bounded_E: float = 1e-8) -> ValidationReport:
    E_grid = counting.default_energy_grid() if E_grid is None else E_grid
    entries = []
    for a in a_values:
        ref = counting.slope_reference([a])
        curves = {bc: counting.counting_curve([counting.HalfLineOperatorSpec(1.0, bc, a, 0.0)], E_grid)
                  for bc in ("D", "N")}
        d, nn = curves["D"].slope_fit, curves["N"].slope_fit
        rel = {bc: c.slope_fit.slope / ref - 1.0 for bc, c in curves.items()}
        agree = abs(d.slope - nn.slope) <= d.residual + nn.residual
        ok = all(abs(r) <= rel_tol for r in rel.values()) and agree
        entries.append({"a": a, "reference": ref, "slope_D": d.slope, "slope_N": nn.slope,
                        "rel_error_D": rel["D"], "rel_error_N": rel["N"],
                        "residual_D": d.residual, "residual_N": nn.residual, "bc_agree": agree,
                        "integer_slope_D": curves["D"].integer_fit.slope,
                        "integer_slope_N": curves["N"].integer_fit.slope,
                        "status": PASS if ok else FAIL})
    bounded = counting.count_below(counting.HalfLineOperatorSpec(1.0, "D", bounded_a, 0.0), bounded_E)
    entries.append({"a": bounded_a, "E": bounded_E, "N": bounded.N,
                    "status": PASS if bounded.N <= 1 else FAIL})
    return ValidationReport("slope_law", _overall(entries),
                            {"max_rel_error": max(max(abs(e["rel_error_D"]), abs(e["rel_error_N"])) for e in entries if "reference" in e)},
                            {"rel": rel_tol}, "counting slope (1/2pi) sqrt(-a - 1/4) for a/r^2 wells", entries)


def check_reduced_model_slopes(theta: float = math.pi / 4, n: int = 2048, E_grid=None,
                               rel_tol: float = 0.15) -> ValidationReport:
    E_grid = counting.default_energy_grid() if E_grid is None else E_grid
    profile = geodesic_curvature(SphericalLoop.circle(theta), n)
    spec = spectrum_below(profile, 0.5)
    ks = accumulation_constant(spec).k_S
    layer_d, layer_n = counting.predict_layer_counting(spec, 0.0, 0.0, 1.0, E_grid)
    delta = counting.predict_delta_counting(spec, 0.0, E_grid)
    entries = []
    for c in (layer_d, layer_n, delta):
        rel = c.slope_fit.slope / ks - 1.0
        entries.append({"model": c.label, "slope": c.slope_fit.slope, "residual": c.slope_fit.residual,
                        "integer_slope": c.integer_fit.slope, "k_S": ks, "rel_error": rel,
                        "status": PASS if abs(rel) <= rel_tol else FAIL})
    return ValidationReport("reduced_model_slopes", _overall(entries),
                            {"k_S": ks, "max_rel_error": max(abs(e["rel_error"]) for e in entries)},
                            {"rel": rel_tol}, f"circle theta={theta}: layer-D, layer-N and delta slopes vs k_S",
                            entries)


def check_multiplicity_growth(m: int = 5, eps_list=(0.05, 0.025, 0.02, 0.0125), length: float = 2.0 * math.pi,
                              n: int = 2048, baseline: float = 0.0) -> ValidationReport:
    """Negative-eigenvalue count and k_S for ``m`` curvature plateaus as eps shrinks."""
    entries = []
    for eps in eps_list:
        profile = synthetic_profile(length, m, eps, baseline, n)
        spec = spectrum_below(profile, 0.0, start=max(8, 2 * m))
        ac = accumulation_constant(spec, strict=False)
        entries.append({"eps": eps, "negatives": len(ac.negative_eigenvalues), "k_S": ac.k_S,
                        "k_S_error": ac.error, "status": PASS})
    threshold = None
    for e in entries:
        if e["negatives"] >= m:
            threshold = e["eps"]
            break
    ks = [e["k_S"] for e in entries]
    increasing = all(b > a for a, b in zip(ks, ks[1:]))
    reached = threshold is not None and all(e["negatives"] >= m for e in entries if e["eps"] <= threshold)
    if not increasing:
        status = FAIL
    elif reached:
        status = PASS
    else:
        status = INCONCLUSIVE
    return ValidationReport("multiplicity_growth", status,
                            {"threshold_eps": threshold, "k_S_increasing": increasing},
                            {"min_negatives": m}, f"{m} curvature plateaus cot(eps) on length {length}", entries)


def random_halfline_specs(count: int, seed: int = DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        spec = counting.HalfLineOperatorSpec(1.0, str(rng.choice(["D", "N"])),
                                             float(rng.uniform(-5.0, 0.5)), float(rng.uniform(-2.0, 2.0)))
        out.append((spec, float(10.0 ** rng.uniform(-10.0, -2.0))))
    return out


def check_oracle_consistency(count: int = 50, seed: int = DEFAULT_SEED) -> ValidationReport:
    entries = []
    for spec, E in random_halfline_specs(count, seed):
        ode = counting.count_below(spec, E).N
        x_max = spec.turning_radius(E)
        ode2 = counting.count_below(spec, E, 2.0 * x_max).N
        mat = counting.count_below_matrix(spec, E, 2.0 * x_max, check_wall=False)
        mat2 = counting.count_below_matrix(spec, E, 4.0 * x_max, check_wall=False)
        ok = abs(ode - mat) <= 1 and abs(ode2 - ode) <= 1 and abs(mat2 - mat) <= 1
        entries.append({"bc": spec.bc, "a": spec.a, "b": spec.b, "E": E, "ode": ode, "matrix": mat,
                        "ode_wall2": ode2, "matrix_wall2": mat2, "status": PASS if ok else FAIL})
    return ValidationReport("oracle_consistency", _overall(entries),
                            {"specs": len(entries),
                             "max_disagreement": max(abs(e["ode"] - e["matrix"]) for e in entries)},
                            {"count": 1}, "Pruefer count vs Sturm-sequence count; wall doubling", entries)


def _get_survey(loop, n, surveys):
    if surveys is None:
        return survey_loop(loop, n)
    key = (id(loop), n)
    if key not in surveys:
        surveys[key] = survey_loop(loop, n, surveys.get("hook"))
    return surveys[key]


def run_suite(seed: int = DEFAULT_SEED, n: int = 2048, quick: bool = False,
                    kappa_hook: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                    progress: Optional[Callable[[str], None]] = None) -> List[ValidationReport]:
    """Run every acceptance check; the order of the returned reports is fixed.

    ``quick`` shrinks grids and sample counts (entries may turn inconclusive).
    ``kappa_hook`` is applied to every curve-derived curvature profile; it
    exists to confirm that a corrupted curvature is caught.
    """
    if quick:
        n = min(n, 256)
    n_random = 10 if quick else 100
    per_decade = 3 if quick else 6
    E_grid = counting.default_energy_grid(1e-12, 1e-4, per_decade)
    circles = [SphericalLoop.circle(t) for t in (math.pi / 6, math.pi / 4, math.pi / 3)]
    randoms = random_fourier_loops(n_random, seed)
    surveys: dict = {"hook": kappa_hook}

    steps = [
        ("circle_closed_forms", lambda: check_circle_closed_forms(n=n, kappa_hook=kappa_hook)),
        ("minmax_upper_bound", lambda: check_minmax(randoms[:20], n, surveys=surveys)),
        ("isoperimetric", lambda: check_isoperimetric(circles + randoms, n, surveys=surveys)),
        ("gauss_bonnet", lambda: check_gauss_bonnet(circles + randoms, n, surveys=surveys)),
        ("interval_models", lambda: check_interval_models(n=1024 if quick else 4096)),
        ("slope_law", lambda: check_slope_law(E_grid=E_grid)),
        ("reduced_model_slopes", lambda: check_reduced_model_slopes(n=n, E_grid=E_grid)),
        ("multiplicity_growth", lambda: check_multiplicity_growth(n=max(n, 2048))),
        ("oracle_consistency", lambda: check_oracle_consistency(10 if quick else 50, seed)),
    ]
    reports = []
    for name, fn in steps:
        if progress:
            progress(name)
        try:
            reports.append(fn())
        except ConeSpectraError as exc:
            reports.append(ValidationReport(name, FAIL, notes=f"{type(exc).__name__}: {exc}"))
    return reports
