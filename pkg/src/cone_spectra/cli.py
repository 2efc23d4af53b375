"""``cone-spectra`` command line.

Exit codes: 0 success, 2 bad input, 3 geometry failure, 4 ambiguous
negative-eigenvalue count, 5 counting oracle disagreement, 1 failed validation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import asymptotics, counting, models
from .curves import check_injective, enclosed_area
from .errors import ConeSpectraError, InvalidInput, OracleDisagreement
from .io import (
    atomic_write,
    csv_text,
    dumps,
    loop_from_spec,
    parse_spec,
    profile_csv,
    profile_from_spec,
)
from .operator import accumulation_constant, k_s, spectrum_below

log = logging.getLogger("cone_spectra")

CURVE_KINDS = ("circle", "fourier", "samples")


def _read_spec(args) -> dict:
    if args.spec and args.input:
        raise InvalidInput("give either --spec or --in, not both")
    if args.spec:
        return parse_spec(args.spec)
    if args.input:
        try:
            return parse_spec(Path(args.input).read_text())
        except OSError as exc:
            raise InvalidInput(f"cannot read {args.input}: {exc}") from exc
    raise InvalidInput("a curve spec is required (--spec or --in)")


def _check_n(n: int) -> int:
    if n < 64 or n & (n - 1):
        raise InvalidInput(f"--n must be a power of two >= 64, got {n}")
    return n


def _out(args, name: str) -> Path:
    return Path(args.out) / name


def _emit(args, doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True))


def cmd_curve(args) -> int:
    spec = _read_spec(args)
    n = _check_n(args.n)
    summary = {"kind": spec["kind"], "n": n}
    if spec["kind"] in CURVE_KINDS:
        loop = loop_from_spec(spec)
        check_injective(loop)
        profile = profile_from_spec(spec, n)
        area = enclosed_area(loop)
        summary.update(length=profile.length, area=area,
                       gauss_bonnet_residual=profile.integral(1) + area - 2.0 * math.pi)
    else:
        profile = profile_from_spec(spec, n)
        summary.update(length=profile.length)
    summary.update(kappa_min=float(profile.kappa.min()), kappa_max=float(profile.kappa.max()),
                   kappa_mean=float(profile.kappa.mean()))
    if args.format == "json":
        atomic_write(_out(args, "profile.json"), dumps({"s": profile.s, "kappa": profile.kappa}))
    else:
        atomic_write(_out(args, "profile.csv"), profile_csv(profile))
    atomic_write(_out(args, "curve_summary.json"), dumps(summary))
    _emit(args, summary)
    return 0


def _spectrum_doc(profile, spectrum, ac) -> dict:
    return {"length": profile.length, "eigenvalues": spectrum.eigenvalues, "errors": spectrum.richardson_error,
            "grid_sizes": list(spectrum.grid_sizes_used), "k_S": ac.k_S, "k_S_error": ac.error,
            "negative": list(ac.negative_eigenvalues)}


def cmd_ks(args) -> int:
    spec = _read_spec(args)
    profile = profile_from_spec(spec, _check_n(args.n))
    spectrum = spectrum_below(profile, 0.0)
    if not np.any(profile.kappa):
        print("warning: kappa vanishes identically; the cross-section is a great circle "
              "(the cone is a plane) and k_S = 0", file=sys.stderr)
        ac = k_s(profile)
    else:
        ac = accumulation_constant(spectrum, strict=True)
    doc = _spectrum_doc(profile, spectrum, ac)
    if spec["kind"] in CURVE_KINDS and profile.length <= 2.0 * math.pi:
        doc["isoperimetric_bound"] = asymptotics.isoperimetric_bound(profile.length)
    atomic_write(_out(args, "spectrum.json"), dumps(doc))
    _emit(args, {k: doc[k] for k in ("length", "k_S", "negative")})
    return 0


def cmd_count(args) -> int:
    spec = _read_spec(args)
    profile = profile_from_spec(spec, _check_n(args.n))
    E_grid = counting.default_energy_grid(args.emin, args.emax, args.per_decade)
    if not np.any(profile.kappa):
        curve = counting.CountingCurve(np.sort(E_grid), np.zeros(len(E_grid), dtype=int),
                                       tuple([counting.EXACT] * len(E_grid)), np.zeros(len(E_grid)),
                                       counting.SlopeFit(0.0, 0.0, 0.0, len(E_grid)),
                                       counting.SlopeFit(0.0, 0.0, 0.0, len(E_grid)), args.model, 0.0)
        ks = 0.0
    else:
        b = args.b if args.b is not None else 0.0
        ceiling = 0.25 + abs(b) + 1.0
        spectrum = spectrum_below(profile, ceiling)
        ks = accumulation_constant(spectrum, strict=False).k_S
        if args.model in ("layer-D", "layer-N"):
            d, nn = counting.predict_layer_counting(spectrum, b, b, 1.0, E_grid)
            curve = d if args.model == "layer-D" else nn
        else:
            curve = counting.predict_delta_counting(spectrum, args.delta, E_grid)
        worst = counting.reconcile(curve.specs, curve.E)
        if worst > 1:
            raise OracleDisagreement(f"ODE and matrix counts differ by {worst}")
    rows = curve.rows()
    if args.format == "json":
        atomic_write(_out(args, "counting.json"),
                     dumps({"E": curve.E, "N": curve.N, "uncertainty": list(curve.uncertainty)}))
    else:
        atomic_write(_out(args, "counting.csv"), csv_text(["E", "N", "uncertainty"], rows))
    slope = {"model": args.model, "slope": curve.slope_fit.slope, "intercept": curve.slope_fit.intercept,
             "residual": curve.slope_fit.residual, "k_S_reference": ks,
             "integer_slope": curve.integer_fit.slope, "integer_residual": curve.integer_fit.residual}
    atomic_write(_out(args, "slope.json"), dumps(slope))
    _emit(args, slope)
    return 0


def cmd_model1d(args) -> int:
    spec = models.IntervalDeltaSpec(args.L, args.bc)
    tr = models.solve_transcendental(spec)
    fd = models.solve_finite_difference(spec, args.n if args.n >= 256 else 4096)
    doc = {"L": args.L, "bc": args.bc, "lambda1": tr.lambda1, "lambda2": tr.lambda2, "method": tr.method,
           "residual": tr.residual,
           "finite_difference": {"lambda1": fd.lambda1, "lambda2": fd.lambda2, "error": fd.residual}}
    atomic_write(_out(args, "model1d.json"), dumps(doc))
    _emit(args, doc)
    return 0


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    reports = asymptotics.run_suite(seed=args.seed, n=_check_n(args.n), quick=args.quick,
                                          progress=lambda name: log.info("running %s", name))
    lines = "".join(json.dumps(_report_line(r), sort_keys=True) + "\n" for r in reports)
    atomic_write(_out(args, "reports.jsonl"), lines)
    rows = [(r.check, r.status, json.dumps(r.measured, sort_keys=True)) for r in reports]
    atomic_write(_out(args, "summary.csv"), csv_text(["check", "status", "measured"], rows))
    width = max(len(r.check) for r in reports)
    for r in reports:
        print(f"{r.check:<{width}}  {r.status:<12}  {json.dumps(r.measured, sort_keys=True)}")
    print(f"({time.perf_counter() - t0:.1f} s)")
    return 1 if any(r.status == asymptotics.FAIL for r in reports) else 0


def _report_line(report) -> dict:
    from .io import _jsonable

    body = {"schema": 1}
    body.update(_jsonable(report.to_dict()))
    return body


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cone-spectra", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("--spec", help="curve spec as inline JSON")
            sp.add_argument("--in", dest="input", help="path to a curve spec JSON file")
        sp.add_argument("--out", default=".", help="output directory (default: .)")
        sp.add_argument("--n", type=int, default=2048, help="grid size, power of two (default 2048)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=asymptotics.DEFAULT_SEED)

    sp = sub.add_parser("curve", help="curvature profile and geometry summary")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("ks", help="spectrum of the cross-section operator and k_S")
    common(sp)
    sp.set_defaults(func=cmd_ks)

    sp = sub.add_parser("count", help="counting curve of a reduced model")
    common(sp)
    sp.add_argument("--model", choices=("layer-D", "layer-N", "delta"), default="layer-D")
    sp.add_argument("--emin", type=float, default=1e-12)
    sp.add_argument("--emax", type=float, default=1e-4)
    sp.add_argument("--per-decade", type=int, default=6)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=None, help="1/r^3 coefficient of the layer models")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("model1d", help="interval operator with a point interaction")
    common(sp, spec=False)
    sp.add_argument("--L", type=float, required=True)
    sp.add_argument("--bc", choices=("D", "N"), default="D")
    sp.set_defaults(func=cmd_model1d, n=4096)

    sp = sub.add_parser("validate", help="run the full check suite")
    common(sp, spec=False)
    sp.add_argument("--quick", action="store_true", help="reduced grids; entries may be inconclusive")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConeSpectraError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
