"""File formats: curve specs, profile/counting CSV, spectrum/slope JSON.

Every JSON document carries ``"schema": 1``; every CSV starts with a
``# schema=1`` comment line ahead of its header. Readers reject other majors.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .curves import CurvatureProfile, SphericalLoop, constant_profile, geodesic_curvature, synthetic_profile
from .errors import InvalidInput

SCHEMA = 1


def atomic_write(path: Union[str, Path], text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(doc: dict) -> str:
    body = {"schema": SCHEMA}
    body.update(_jsonable(doc))
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    check_schema(doc.get("schema"))
    return doc


def check_schema(value) -> None:
    try:
        major = int(str(value).split(".")[0])
    except (TypeError, ValueError):
        raise InvalidInput(f"missing or malformed schema field: {value!r}")
    if major != SCHEMA:
        raise InvalidInput(f"unsupported schema major {major} (expected {SCHEMA})")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_csv(text: str):
    """Return ``(header, rows)`` after checking the schema comment."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise InvalidInput("CSV lacks a '# schema=' line")
    check_schema(lines[0].split("=", 1)[1].strip())
    reader = csv.reader(lines[1:])
    header = next(reader)
    return header, [row for row in reader]


# ---------------------------------------------------------------------------
# Curve specs


def parse_spec(spec: Union[str, dict]) -> dict:
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"curve spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("curve spec must be an object with a 'kind' field")
    return spec


def loop_from_spec(spec: Union[str, dict]) -> SphericalLoop:
    spec = parse_spec(spec)
    kind = spec["kind"]
    try:
        if kind == "circle":
            return SphericalLoop.circle(float(spec["theta"]))
        if kind == "fourier":
            return SphericalLoop.fourier(float(spec["theta0"]), spec.get("coeffs", []))
        if kind == "samples":
            return SphericalLoop.samples(spec["points"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed {kind} spec: {exc}") from exc
    raise InvalidInput(f"unknown curve kind {kind!r}")


def profile_from_spec(spec: Union[str, dict], n: int = 2048) -> CurvatureProfile:
    """Curvature profile for any spec kind, including ``synthetic`` and ``constant``."""
    spec = parse_spec(spec)
    kind = spec["kind"]
    try:
        if kind == "synthetic":
            win = spec.get("windows", {})
            return synthetic_profile(float(spec["length"]), int(win["m"]), float(win["eps"]),
                                     float(spec.get("baseline", 0.0)), n)
        if kind == "constant":
            return constant_profile(float(spec["length"]), float(spec["kappa"]), n)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed {kind} spec: {exc}") from exc
    return geodesic_curvature(loop_from_spec(spec), n)


def profile_csv(profile: CurvatureProfile) -> str:
    return csv_text(["s", "kappa"], zip(profile.s.tolist(), profile.kappa.tolist()))
