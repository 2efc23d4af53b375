"""Curvature-induced spectra of conical surfaces.

The pipeline runs from a closed loop on the unit sphere to its geodesic
curvature, the periodic operator ``-d^2/ds^2 - kappa^2/4``, the accumulation
constant ``k_S``, and eigenvalue counting for the reduced radial models.
"""

from .counting import (
    Count,
    CountingCurve,
    HalfLineOperatorSpec,
    count_below,
    count_below_matrix,
    predict_delta_counting,
    predict_layer_counting,
)
from .curves import (
    CurvatureProfile,
    SphericalLoop,
    arc_length_reparametrize,
    enclosed_area,
    geodesic_curvature,
    synthetic_profile,
)
from .errors import ConeSpectraError
from .models import IntervalDeltaSpec, solve_finite_difference, solve_transcendental
from .operator import accumulation_constant, assemble, eigenvalues, k_s, spectrum_below

__version__ = "0.1.0"

__all__ = [
    "ConeSpectraError",
    "Count",
    "CountingCurve",
    "CurvatureProfile",
    "HalfLineOperatorSpec",
    "IntervalDeltaSpec",
    "SphericalLoop",
    "accumulation_constant",
    "arc_length_reparametrize",
    "assemble",
    "count_below",
    "count_below_matrix",
    "eigenvalues",
    "enclosed_area",
    "geodesic_curvature",
    "k_s",
    "predict_delta_counting",
    "predict_layer_counting",
    "solve_finite_difference",
    "solve_transcendental",
    "spectrum_below",
    "synthetic_profile",
]
