"""Entanglement harvesting around the static BTZ black hole and its RP2 geon:
closed-form detector observables, a brute-force oracle, shadow-boundary
root finding, and a sweep CLI."""

__version__ = "0.1.0"

from .geometry import (
    DetectorConfig,
    DetectorPair,
    Family,
    SpacetimeParams,
    detector_at_distance,
    horizon_radius,
    pair_at_distances,
    proper_distance,
    radius_from_distance,
    redshift,
)
from .observables import (
    HarvestResult,
    SeriesControl,
    concurrence,
    concurrence_from_density_matrix,
    harvest,
    nonlocal_correlation,
    transition_probability,
)
from .quadrature import QuadratureSpec, QuadResult, QuadratureError
from .shadow import CrossoverResult, ShadowQuery, ShadowResult, crossover_gap, d_death
from .wightman import SpacetimeEvent, ImageSumControl, truncation_bound, wightman

__all__ = [
    "__version__",
    "DetectorConfig",
    "DetectorPair",
    "Family",
    "SpacetimeParams",
    "detector_at_distance",
    "horizon_radius",
    "pair_at_distances",
    "proper_distance",
    "radius_from_distance",
    "redshift",
    "HarvestResult",
    "SeriesControl",
    "concurrence",
    "concurrence_from_density_matrix",
    "harvest",
    "nonlocal_correlation",
    "transition_probability",
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "CrossoverResult",
    "ShadowQuery",
    "ShadowResult",
    "crossover_gap",
    "d_death",
    "SpacetimeEvent",
    "ImageSumControl",
    "truncation_bound",
    "wightman",
]
