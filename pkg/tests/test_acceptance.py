"""Acceptance criteria at full size, one test each.

Every test records a PASS/FAIL line; ``conftest.py`` prints them at the end
of the run. ``python3 tests/test_acceptance.py`` runs them without pytest.
"""

import functools
import math
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest

from cone_spectra import asymptotics as A
from cone_spectra.curves import SphericalLoop

RESULTS = {}
SEED = A.DEFAULT_SEED
_surveys = {"hook": None}


def record(number, title, ok, detail, elapsed, limit=None):
    within = limit is None or elapsed <= limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:.0f} s)" if limit else ""
    line = f"criterion {number:>2} {status}  {title}: {detail}  [{elapsed:.1f} s{budget}]"
    RESULTS[number] = line
    print(line)
    assert ok, line
    assert within, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def circles():
    return tuple(SphericalLoop.circle(t) for t in (math.pi / 6, math.pi / 4, math.pi / 3))


@functools.lru_cache(maxsize=None)
def randoms():
    return tuple(A.random_fourier_loops(100, SEED))


def test_criterion_01_circle_closed_forms():
    rep, dt = timed(lambda: A.check_circle_closed_forms(n=2048))
    record(1, "circular-cone closed forms", rep.status == A.PASS,
           f"max deviation {rep.measured['max_deviation']:.2e} (tol 1e-6)", dt, 30)


def test_criterion_02_minmax():
    rep, dt = timed(lambda: A.check_minmax(list(randoms()[:20]), 2048, surveys=_surveys))
    record(2, "min-max upper bound, k_S > 0", rep.status == A.PASS, f"{len(rep.entries)} loops", dt, 60)


def test_criterion_03_isoperimetric():
    rep, dt = timed(lambda: A.check_isoperimetric(list(circles() + randoms()), 2048, surveys=_surveys))
    inconclusive = rep.measured["inconclusive"] / rep.measured["loops"]
    record(3, "isoperimetric lower bound", rep.status == A.PASS and inconclusive <= 0.05,
           f"{rep.measured['loops']} loops, {rep.measured['inconclusive']} inconclusive, "
           f"min gap {rep.measured['min_gap']:.2e}", dt, 300)


def test_criterion_04_gauss_bonnet():
    rep, dt = timed(lambda: A.check_gauss_bonnet(list(circles() + randoms()), 2048, surveys=_surveys))
    record(4, "Gauss-Bonnet", rep.status == A.PASS,
           f"max residual {rep.measured['max_residual']:.2e} (tol 1e-6)", dt)


def test_criterion_05_interval_models():
    rep, dt = timed(lambda: A.check_interval_models(n=4096))
    fits = [e["fit_residual"] for e in rep.entries if "fit_residual" in e]
    record(5, "interval delta models", rep.status == A.PASS,
           f"max deviation {rep.measured['max_deviation']:.2e}, fit residuals {max(fits):.3f}", dt, 60)


def test_criterion_06_slope_law():
    rep, dt = timed(lambda: A.check_slope_law())
    bounded = rep.entries[-1]["N"]
    record(6, "inverse-square slope law", rep.status == A.PASS,
           f"max rel error {rep.measured['max_rel_error']:.3f} (tol 0.10), a=-0.2 gives N={bounded}", dt, 300)


def test_criterion_07_reduced_model_slopes():
    rep, dt = timed(lambda: A.check_reduced_model_slopes(n=2048))
    slopes = ", ".join(f"{e['model']} {e['slope']:.4f}" for e in rep.entries)
    record(7, "reduced-model slopes vs k_S", rep.status == A.PASS,
           f"k_S {rep.measured['k_S']:.4f}; {slopes}; max rel error {rep.measured['max_rel_error']:.3f} (tol 0.15)",
           dt, 600)


def test_criterion_08_multiplicity_growth():
    rep, dt = timed(lambda: A.check_multiplicity_growth(5, (0.05, 0.025, 0.02, 0.0125)))
    by_eps = {e["eps"]: e for e in rep.entries}
    ks = [by_eps[e]["k_S"] for e in (0.05, 0.025, 0.0125)]
    ok = by_eps[0.02]["negatives"] >= 5 and ks[0] < ks[1] < ks[2]
    record(8, "plateau multiplicity", ok,
           f"{by_eps[0.02]['negatives']} negatives at eps=0.02; k_S {ks[0]:.3f} < {ks[1]:.3f} < {ks[2]:.3f}", dt, 60)


def test_criterion_09_oracle_consistency():
    rep, dt = timed(lambda: A.check_oracle_consistency(50, SEED))
    record(9, "Pruefer vs matrix counts", rep.status == A.PASS,
           f"{rep.measured['specs']} specs, max disagreement {rep.measured['max_disagreement']}", dt, 300)


def test_criterion_10_determinism():
    def once(out):
        return subprocess.run([sys.executable, "-m", "cone_spectra", "validate", "--seed", str(SEED), "--out", out],
                              capture_output=True, text=True)

    with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
        (p1, p2), dt = timed(lambda: (once(d1), once(d2)))
        names = ("reports.jsonl", "summary.csv")
        same = all((Path(d1) / n).read_bytes() == (Path(d2) / n).read_bytes() for n in names)
        ok = p1.returncode == 0 and p2.returncode == 0 and same
        record(10, "validate --seed 7 determinism", ok,
               f"exit codes {p1.returncode}/{p2.returncode}, report files identical: {same}", dt)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
