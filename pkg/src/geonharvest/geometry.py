"""Static exterior geometry of the non-rotating BTZ black hole and its RP2 geon.

The geon is exterior-isometric to BTZ, so a single set of geometric helpers
serves both spacetimes; the family tag only matters once Wightman functions
are built.

Conventions
-----------
- All lengths and times are expressed in units of the detector switching
  width sigma, which is fixed to 1.  Energy gaps are in units of 1/sigma.
- The metric is ds^2 = -f(r) dt^2 + dr^2/f(r) + r^2 dphi^2 with
  f(r) = (r^2 - r_h^2)/ell^2 and horizon radius r_h = ell*sqrt(M).
- A static detector at radius R has redshift factor
  gamma = sqrt(R^2 - r_h^2)/ell, so its proper time is tau = gamma * t.
- Radial proper distance on a constant-t slice integrates 1/sqrt(f):
  d(R_a, R_b) = ell * log[(R_b + sqrt(R_b^2 - r_h^2)) /
                          (R_a + sqrt(R_a^2 - r_h^2))],
  equivalently d(r_h, R) = ell * arccosh(R/r_h) from the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Family",
    "SpacetimeParams",
    "DetectorConfig",
    "DetectorPair",
    "horizon_radius",
    "redshift",
    "proper_distance",
    "radius_from_distance",
    "detector_at_distance",
    "pair_at_distances",
]

_VALID_ZETA = (-1, 0, 1)


class Family(Enum):
    """Spacetime family: the BTZ black hole or its RP2 geon quotient."""

    BTZ = "btz"
    GEON = "geon"

    @classmethod
    def parse(cls, name: str | "Family") -> "Family":
        if isinstance(name, Family):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown spacetime family {name!r}; expected 'btz' or 'geon'") from None


@dataclass(frozen=True)
class SpacetimeParams:
    """Parameters fixing the background spacetime.

    Parameters
    ----------
    mass : float
        Dimensionless black hole mass M > 0.
    ads_length : float
        AdS length ell in units of sigma, ell > 0.
    zeta : int
        Boundary condition of the conformal scalar at spatial infinity:
        -1 (Neumann), 0 (transparent) or +1 (Dirichlet).
    family : Family
        BTZ or GEON.
    """

    mass: float
    ads_length: float
    zeta: int = 1
    family: Family = Family.BTZ

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.ads_length > 0:
            raise ValueError(f"ads_length must be positive, got {self.ads_length}")
        if self.zeta not in _VALID_ZETA:
            raise ValueError(f"zeta must be one of {_VALID_ZETA}, got {self.zeta}")
        object.__setattr__(self, "family", Family.parse(self.family))

    @property
    def horizon_radius(self) -> float:
        """Horizon radius r_h = ell * sqrt(M)."""
        return self.ads_length * math.sqrt(self.mass)

    def with_family(self, family: Family | str) -> "SpacetimeParams":
        return SpacetimeParams(self.mass, self.ads_length, self.zeta, Family.parse(family))


def horizon_radius(mass: float, ads_length: float) -> float:
    """Horizon radius r_h = ell * sqrt(M) of the static BTZ black hole.

    Raises
    ------
    ValueError
        If mass or ads_length is not strictly positive.
    """
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    if not ads_length > 0:
        raise ValueError(f"ads_length must be positive, got {ads_length}")
    return ads_length * math.sqrt(mass)


def redshift(radius: float, params: SpacetimeParams) -> float:
    """Redshift factor gamma = sqrt(R^2 - r_h^2)/ell of a static detector.

    Strictly increasing in R; tends to 0 at the horizon and to R/ell far away.

    Raises
    ------
    ValueError
        If the detector is not strictly outside the horizon.
    """
    rh = params.horizon_radius
    if not radius > rh:
        raise ValueError(f"detector radius {radius} must exceed the horizon radius {rh}")
    return math.sqrt(radius * radius - rh * rh) / params.ads_length


def proper_distance(r_a: float, r_b: float, params: SpacetimeParams) -> float:
    """Radial proper distance between radii r_a <= r_b on a constant-t slice.

    The horizon itself is an allowed lower endpoint (r_a = r_h), in which
    case the result reduces to ell * arccosh(r_b/r_h).

    Raises
    ------
    ValueError
        If the ordering r_h <= r_a <= r_b is violated.
    """
    rh = params.horizon_radius
    if not (rh <= r_a <= r_b):
        raise ValueError(
            f"radial ordering violated: need r_h <= r_a <= r_b, got r_h={rh}, r_a={r_a}, r_b={r_b}"
        )
    ell = params.ads_length

    def chi(r: float) -> float:
        return r + math.sqrt(max(r * r - rh * rh, 0.0))

    return ell * math.log(chi(r_b) / chi(r_a))


def radius_from_distance(distance: float, params: SpacetimeParams) -> float:
    """Radius of the point at given proper distance from the horizon.

    Inverse of ``proper_distance(r_h, R)``: returns R = r_h * cosh(d/ell).

    Raises
    ------
    ValueError
        If distance is negative.
    """
    if distance < 0:
        raise ValueError(f"distance must be nonnegative, got {distance}")
    return params.horizon_radius * math.cosh(distance / params.ads_length)


@dataclass(frozen=True)
class DetectorConfig:
    """A static pointlike two-level detector.

    Parameters
    ----------
    radius : float
        Radial coordinate R of the detector, R > r_h.
    gap : float
        Energy gap Omega in units of 1/sigma.
    angle : float
        Angular position Phi in [0, 2*pi).
    switching_width : float
        Width sigma of the Gaussian switching function exp(-tau^2/2 sigma^2).
        Fixed to 1: sigma is the global unit of time.
    coupling : float
        Dimensionless coupling lambda*sqrt(sigma).  All reported observables
        are normalized per coupling^2, so this is bookkeeping only.
    """

    radius: float
    gap: float
    angle: float = 0.0
    switching_width: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.switching_width != 1.0:
            raise ValueError(
                "switching_width is the unit of time and must be 1.0; "
                "rescale the other parameters instead"
            )
        if not 0.0 <= self.angle < 2.0 * math.pi:
            raise ValueError(f"angle must lie in [0, 2*pi), got {self.angle}")


@dataclass(frozen=True)
class DetectorPair:
    """Two identical detectors at the same angle, ordered by radius.

    Detector ``a`` is the one closer to the horizon.  Both detectors share
    the energy gap and the angular position; those are the configurations
    for which the closed-form observables hold.
    """

    a: DetectorConfig
    b: DetectorConfig

    def __post_init__(self):
        if not self.b.radius > self.a.radius:
            raise ValueError(
                f"detector b must sit strictly outside detector a "
                f"(got radii {self.a.radius} and {self.b.radius})"
            )
        if self.a.gap != self.b.gap:
            raise ValueError("detectors must share the energy gap")
        if self.a.angle != self.b.angle:
            raise ValueError("detectors must share the angular position")

    @property
    def gap(self) -> float:
        return self.a.gap


def detector_at_distance(
    params: SpacetimeParams, distance: float, gap: float, angle: float = 0.0
) -> DetectorConfig:
    """Place a detector at a prescribed proper distance from the horizon."""
    if not distance > 0:
        raise ValueError(f"proper distance from the horizon must be positive, got {distance}")
    return DetectorConfig(radius=radius_from_distance(distance, params), gap=gap, angle=angle)


def pair_at_distances(
    params: SpacetimeParams,
    distance_a: float,
    separation: float,
    gap: float,
    angle: float = 0.0,
) -> DetectorPair:
    """Place a detector pair by horizon distance of A and proper separation.

    Radial proper distances from the horizon are additive, so detector B
    sits at distance ``distance_a + separation``.
    """
    if not separation > 0:
        raise ValueError(f"separation must be positive, got {separation}")
    return DetectorPair(
        a=detector_at_distance(params, distance_a, gap, angle),
        b=detector_at_distance(params, distance_a + separation, gap, angle),
    )
