"""Recurrence sets of hyperbolic toral endomorphisms.

Exact spectral data and periodic points, component geometry, closed-form
dimension values, covering sums and empirical estimators for the sets of
points whose orbits return within ``exp(-n tau)`` of themselves.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .dimension import DimensionValue, dim_2d, dim_3d_example, generic_upper_bound, hausdorff_partial_sum
from .errors import HyperbolicityError, TorrecError
from .periodic import brute_force_periodic, enumerate_periodic
from .spectral import IntMatrix, eigen_data, parse_matrix, validate_hyperbolic
from .surd import QuadraticSurd

__all__ = [
    "DimensionValue",
    "HyperbolicityError",
    "IntMatrix",
    "QuadraticSurd",
    "TorrecError",
    "__version__",
    "brute_force_periodic",
    "dim_2d",
    "dim_3d_example",
    "eigen_data",
    "enumerate_periodic",
    "generic_upper_bound",
    "hausdorff_partial_sum",
    "parse_matrix",
    "validate_hyperbolic",
]
