"""Image-sum Wightman functions of a conformally coupled scalar in the
Hartle-Hawking vacuum, evaluated pointwise between static exterior events.

The BTZ two-point function is a sum over angular images of the AdS3
correlator; the geon adds a second sum over the images generated by the
quotient involution, which shifts the angular winding by a half turn and
couples to t + t' instead of t - t'.  Terms fall off like exp(-pi sqrt(M) n),
so small masses need long sums; ``truncation_bound`` encodes that rate.

These pointwise evaluations feed the brute-force oracle integrals and the
cross-checks of the closed-form observables; the closed forms themselves
never evaluate the Wightman function on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Family, SpacetimeParams

__all__ = [
    "SpacetimeEvent",
    "ImageSumControl",
    "ImageSumEvaluator",
    "btz_image_separation",
    "geon_image_separation",
    "wightman",
    "truncation_bound",
    "MAX_IMAGE_TERMS",
]

MAX_IMAGE_TERMS = 500


@dataclass(frozen=True)
class SpacetimeEvent:
    """An event (t, r, phi) in the exterior Schwarzschild-like chart."""

    time: float
    radius: float
    angle: float = 0.0


@dataclass(frozen=True)
class ImageSumControl:
    """Truncation policy for the image sums.

    With ``auto`` set (the default), the number of retained images is chosen
    from the exp(-pi sqrt(M) n) decay so the dropped tail stays below
    ``tol``; otherwise ``n_max`` is used as given.
    """

    n_max: int | None = None
    auto: bool = True
    tol: float = 1e-10

    def resolve(self, params: SpacetimeParams) -> int:
        if not self.auto:
            if self.n_max is None or self.n_max < 0:
                raise ValueError("manual ImageSumControl requires n_max >= 0")
            return self.n_max
        return truncation_bound(params.mass, params.ads_length, self.tol)


def truncation_bound(
    mass: float, ads_length: float, target_tol: float, first_term: float = 1.0
) -> int:
    """Smallest image index n with first_term * exp(-pi sqrt(M) n) < target_tol.

    The decay rate follows from the horizon-to-AdS-length ratio
    r_h/ell = sqrt(M): each extra angular winding costs a factor
    exp(-2 pi sqrt(M)) inside the cosh arguments, hence exp(-pi sqrt(M)) on
    the inverse square roots.  Monotone decreasing in the mass.

    Raises
    ------
    ValueError
        If the bound exceeds ``MAX_IMAGE_TERMS``; retry with a looser
        target tolerance (the sums converge, just slowly).
    """
    if not target_tol > 0:
        raise ValueError("target_tol must be positive")
    if not first_term > 0:
        raise ValueError("first_term must be positive")
    rate = math.pi * horizon_ratio(mass, ads_length)
    n = 1 + max(0, math.ceil(math.log(first_term / target_tol) / rate))
    if n > MAX_IMAGE_TERMS:
        raise ValueError(
            f"image sum needs {n} terms at tolerance {target_tol:g} for mass {mass:g}; "
            f"cap is {MAX_IMAGE_TERMS}. Use a looser tolerance."
        )
    return n


def horizon_ratio(mass: float, ads_length: float) -> float:
    """r_h / ell = sqrt(M); the ads_length cancels but is validated."""
    if not mass > 0 or not ads_length > 0:
        raise ValueError("mass and ads_length must be positive")
    return math.sqrt(mass)


def _check_exterior(event: SpacetimeEvent, params: SpacetimeParams) -> None:
    if not event.radius > params.horizon_radius:
        raise ValueError(
            f"event radius {event.radius} is not outside the horizon "
            f"{params.horizon_radius}"
        )


def btz_image_separation(
    x: SpacetimeEvent,
    xp: SpacetimeEvent,
    n: int,
    params: SpacetimeParams,
    eps: float = 0.0,
) -> complex:
    """Squared-separation function of the n-th angular image (BTZ sum).

    For eps > 0 the time difference acquires the retarded regularization
    t - t' -> t - t' - i eps inside the cosh, moving null-separated image
    pairs off the real axis.  Real (and possibly negative) when eps = 0.
    """
    _check_exterior(x, params)
    _check_exterior(xp, params)
    rh = params.horizon_radius
    ell = params.ads_length
    dphi = x.angle - xp.angle
    dt = x.time - xp.time
    radial = (
        math.sqrt(x.radius**2 - rh**2) * math.sqrt(xp.radius**2 - rh**2) / rh**2
    )
    angular = (x.radius * xp.radius / rh**2) * math.cosh(
        (rh / ell) * (dphi - 2.0 * math.pi * n)
    )
    return angular - 1.0 - radial * np.cosh((rh / ell**2) * dt - 1j * eps)


def geon_image_separation(
    x: SpacetimeEvent,
    xp: SpacetimeEvent,
    n: int,
    params: SpacetimeParams,
    eps: float = 0.0,
) -> float:
    """Squared-separation function of the n-th twisted image (geon sum).

    The involution shifts the winding by a half turn and flips one Kruskal
    null coordinate, so the time dependence enters through t + t' with a
    plus sign on the radial term.  For exterior events the result is
    bounded below by r r'/r_h^2 - 1 > 0, hence never singular: the ``eps``
    argument is accepted for signature symmetry and ignored.

    Raises
    ------
    ValueError
        If a non-positive value is ever produced (outside the validated
        regime; no regularization is applied to twisted images).
    """
    del eps
    _check_exterior(x, params)
    _check_exterior(xp, params)
    rh = params.horizon_radius
    ell = params.ads_length
    dphi = x.angle - xp.angle
    radial = (
        math.sqrt(x.radius**2 - rh**2) * math.sqrt(xp.radius**2 - rh**2) / rh**2
    )
    val = (
        (x.radius * xp.radius / rh**2)
        * math.cosh((rh / ell) * (dphi - 2.0 * math.pi * (n + 0.5)))
        - 1.0
        + radial * math.cosh((rh / ell**2) * (x.time + xp.time))
    )
    if not val > 0.0:
        raise ValueError(
            f"twisted image separation is non-positive ({val}); "
            "configuration outside the validated exterior regime"
        )
    return val


class ImageSumEvaluator:
    """Precomputed image-sum state for one pair of static exterior radii.

    Repeated Wightman evaluations along static trajectories share all the
    per-image angular factors; precomputing them makes the oracle's nested
    quadratures tractable.  The BTZ sum runs over n in [-N, N]; the geon
    sum over n in [-N, N-1], which pairs the half-shifted windings
    symmetrically (n <-> -1-n).
    """

    def __init__(
        self,
        params: SpacetimeParams,
        r1: float,
        r2: float,
        dphi: float = 0.0,
        control: ImageSumControl = ImageSumControl(),
    ):
        _check_exterior(SpacetimeEvent(0.0, r1), params)
        _check_exterior(SpacetimeEvent(0.0, r2), params)
        self.params = params
        rh = params.horizon_radius
        ell = params.ads_length
        self._time_rate = rh / ell**2
        self._prefactor = 1.0 / (4.0 * math.pi * math.sqrt(2.0) * ell)
        self._radial = math.sqrt(r1**2 - rh**2) * math.sqrt(r2**2 - rh**2) / rh**2
        n = control.resolve(params)
        self.n_images = n
        windings = np.arange(-n, n + 1)
        self._angular = (r1 * r2 / rh**2) * np.cosh(
            (rh / ell) * (dphi - 2.0 * math.pi * windings)
        ) - 1.0
        if params.family is Family.GEON:
            twisted = np.arange(-n, n) + 0.5
            self._angular_twisted = (r1 * r2 / rh**2) * np.cosh(
                (rh / ell) * (dphi - 2.0 * math.pi * twisted)
            ) - 1.0
        else:
            self._angular_twisted = None

    def _kernel(self, sep: np.ndarray) -> complex | float:
        inv = 1.0 / np.sqrt(sep)
        if self.params.zeta:
            inv = inv - self.params.zeta / np.sqrt(sep + 2.0)
        return self._prefactor * inv.sum()

    def btz_part(self, t1: float, t2: float, eps: float) -> complex:
        sep = self._angular - self._radial * np.cosh(
            self._time_rate * (t1 - t2) - 1j * eps
        )
        return self._kernel(sep)

    def geon_part(self, t1: float, t2: float) -> float:
        sep = self._angular_twisted + self._radial * math.cosh(
            self._time_rate * (t1 + t2)
        )
        if np.any(sep <= 0.0):
            raise ValueError("twisted image separation non-positive; outside validated regime")
        return self._kernel(sep).real

    def __call__(self, t1: float, t2: float, eps: float) -> complex:
        value = self.btz_part(t1, t2, eps)
        if self._angular_twisted is not None:
            value = value + self.geon_part(t1, t2)
        return value


def wightman(
    x: SpacetimeEvent,
    xp: SpacetimeEvent,
    params: SpacetimeParams,
    eps: float = 0.0,
    control: ImageSumControl = ImageSumControl(),
) -> complex:
    """Wightman function W(x, x') between two exterior events.

    Sums (1/(4 pi sqrt(2) ell)) * [sep_n^(-1/2) - zeta (sep_n + 2)^(-1/2)]
    over angular images, plus the twisted-image sum for the geon family.
    Square roots are principal with the cut on the negative real axis, so
    timelike-related images are reached through the ``eps`` regularization;
    pass eps > 0 whenever the events can be null related.
    """
    evaluator = ImageSumEvaluator(
        params, x.radius, xp.radius, dphi=x.angle - xp.angle, control=control
    )
    return evaluator(x.time, xp.time, eps)
