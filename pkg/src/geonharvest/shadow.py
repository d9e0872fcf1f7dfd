"""Root-finding on top of the harvesting observables: the entanglement
shadow boundary (innermost horizon distance at which the pair can first
become entangled) and the energy gap at which the geon overtakes the BTZ
spacetime in harvested concurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Family, SpacetimeParams, pair_at_distances
from .observables import SeriesControl, harvest
from .quadrature import QuadratureSpec

__all__ = [
    "ShadowQuery",
    "ShadowResult",
    "CrossoverResult",
    "d_death",
    "crossover_gap",
    "NOISE_FLOOR",
]

# concurrence differences below this (per squared coupling) are treated as
# zero, consistent with the quadrature error budget
NOISE_FLOOR = 1e-6

FULLY_SHADOWED = "fully_shadowed"
NO_SHADOW = "no_shadow"
BOUNDARY_FOUND = "boundary_found"


@dataclass(frozen=True)
class ShadowQuery:
    """Scan definition for the shadow boundary at fixed pair separation.

    The boundary is located as the innermost transition of the concurrence
    from zero to positive while moving detector A outward from the horizon,
    the separation held fixed; ``scan_points`` logarithmically spaced
    samples bracket it and bisection refines to ``bisect_tol``.
    """

    spacetime: SpacetimeParams
    separation: float
    gap: float
    scan_min: float = 0.02
    scan_max: float = 15.0
    scan_points: int = 40
    bisect_tol: float = 1e-3

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("separation must be positive")
        if not 0 < self.scan_min < self.scan_max <= 20.0:
            raise ValueError("scan range must satisfy 0 < scan_min < scan_max <= 20")
        if self.scan_points < 4:
            raise ValueError("scan_points must be at least 4")
        if not self.bisect_tol > 0:
            raise ValueError("bisect_tol must be positive")


@dataclass(frozen=True)
class ShadowResult:
    status: str
    d_death: float | None
    bracket: tuple[float, float] | None
    evaluations: int

    @property
    def found(self) -> bool:
        return self.status == BOUNDARY_FOUND


@dataclass(frozen=True)
class CrossoverResult:
    gap_star: float | None
    bracket: tuple[float, float] | None
    crossings: int
    evaluations: int


def _concurrence_at(
    distance_a: float,
    query: ShadowQuery,
    quad: QuadratureSpec | None,
    series: SeriesControl | None,
) -> float:
    pair = pair_at_distances(query.spacetime, distance_a, query.separation, query.gap)
    return harvest(pair, query.spacetime, quad, series).concurrence


def d_death(
    query: ShadowQuery,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ShadowResult:
    """Locate the shadow boundary for one spacetime and detector setup.

    Returns ``fully_shadowed`` when the concurrence is zero over the whole
    scan range, and ``no_shadow`` (with the range minimum) when it is
    already positive at the innermost scan point.
    """
    grid = np.geomspace(query.scan_min, query.scan_max, query.scan_points)
    values = []
    evals = 0
    first_positive = None
    for i, d in enumerate(grid):
        c = _concurrence_at(float(d), query, quad, series)
        evals += 1
        values.append(c)
        if c > NOISE_FLOOR:
            first_positive = i
            break
    if first_positive is None:
        return ShadowResult(FULLY_SHADOWED, None, None, evals)
    if first_positive == 0:
        return ShadowResult(NO_SHADOW, float(grid[0]), None, evals)

    lo = float(grid[first_positive - 1])
    hi = float(grid[first_positive])
    while hi - lo > query.bisect_tol:
        mid = 0.5 * (lo + hi)
        evals += 1
        if _concurrence_at(mid, query, quad, series) > NOISE_FLOOR:
            hi = mid
        else:
            lo = mid
    return ShadowResult(BOUNDARY_FOUND, 0.5 * (lo + hi), (lo, hi), evals)


def crossover_gap(
    spacetime: SpacetimeParams,
    distance_a: float,
    separation: float,
    gap_min: float = 0.01,
    gap_max: float = 2.0,
    scan_points: int = 40,
    gap_tol: float = 5e-3,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> CrossoverResult:
    """Gap at which the geon starts out-harvesting the BTZ black hole.

    Scans the concurrence difference C_geon - C_BTZ over a linear gap grid
    and bisects the lowest sign change from negative to positive;
    differences inside the noise floor count as zero.  Returns no gap when
    the difference never turns positive (for example at large mass, where
    the two spacetimes are numerically indistinguishable).
    """
    btz = spacetime.with_family(Family.BTZ)
    geon = spacetime.with_family(Family.GEON)

    def diff(gap: float) -> float:
        pb = pair_at_distances(btz, distance_a, separation, gap)
        pg = pair_at_distances(geon, distance_a, separation, gap)
        d = (
            harvest(pg, geon, quad, series).concurrence
            - harvest(pb, btz, quad, series).concurrence
        )
        return 0.0 if abs(d) < NOISE_FLOOR else d

    grid = np.linspace(gap_min, gap_max, scan_points)
    values = [diff(float(g)) for g in grid]
    evals = len(values)

    brackets = []
    for i in range(len(grid) - 1):
        if values[i] < 0.0 and values[i + 1] > 0.0:
            brackets.append(i)
    if not brackets:
        return CrossoverResult(None, None, 0, evals)

    i = brackets[0]
    lo, hi = float(grid[i]), float(grid[i + 1])
    while hi - lo > gap_tol:
        mid = 0.5 * (lo + hi)
        evals += 1
        if diff(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return CrossoverResult(0.5 * (lo + hi), (lo, hi), len(brackets), evals)
