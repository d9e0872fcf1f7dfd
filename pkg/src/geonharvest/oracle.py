"""Brute-force evaluation of the pair observables straight from their
defining double integrals over the detectors' proper times, against the
pointwise image-sum Wightman function.

This is the ground truth for the closed-form series: slow, independent and
method-orthogonal.  The double integrals are iterated one-dimensional
adaptive Gauss-Kronrod quadratures (scipy) in the rotated frame
(u, v) = (tau - tau', tau + tau'), which aligns the regularized light-cone
singularities with the inner variable; the distributional limit is reached
by evaluating at a decreasing sequence of regulators eps and Richardson
extrapolating the leading O(eps) error to zero.

Exact reflection symmetries of the defining integrals (u -> -u for the
transition probability, (u, v) -> (-u, -v) for the time-ordered pair
integral) are used to halve the integration domain; they hold for any
static trajectories with even switching functions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .geometry import DetectorConfig, DetectorPair, Family, SpacetimeParams, redshift
from .observables import PTermParams, XTermParams
from .wightman import ImageSumControl, ImageSumEvaluator

__all__ = [
    "OracleSpec",
    "OracleEstimate",
    "OracleConvergenceError",
    "transition_probability_direct",
    "nonlocal_correlation_direct",
    "total_correlation_direct",
    "density_matrix_direct",
]


class OracleConvergenceError(RuntimeError):
    """Raised when the regulator extrapolation is not Cauchy."""


@dataclass(frozen=True)
class OracleSpec:
    """Controls for the brute-force integrals.

    ``epsilon_sequence`` must be strictly decreasing; with three or more
    entries the successive raw estimates must contract by at least a factor
    two per step or ``OracleConvergenceError`` is raised.  ``tau_max`` is
    the half-width of the proper-time window per detector; the Gaussian
    switching makes anything past 5 sigma irrelevant.
    """

    epsilon_sequence: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    tau_max: float = 6.0
    quad_rel_tol: float = 1e-7
    quad_abs_tol: float = 1e-12
    image_tol: float = 1e-9
    subdivision_limit: int = 300

    def __post_init__(self):
        eps = tuple(self.epsilon_sequence)
        if len(eps) < 2:
            raise ValueError("need at least two regulator values to extrapolate")
        if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon_sequence must be positive and strictly decreasing")
        if not self.tau_max >= 5.0:
            raise ValueError("tau_max below 5 sigma truncates the switching tails")


@dataclass
class OracleEstimate:
    """Extrapolated value plus the raw per-regulator estimates."""

    value: complex | float
    epsilons: tuple[float, ...]
    raw: tuple[complex, ...] = field(repr=False)

    @property
    def extrapolation_residual(self) -> float:
        """Magnitude of the last Richardson update, a convergence indicator."""
        return abs(self.raw[-1] - complex(self.value))


def _extrapolate(raw: list[complex], eps: tuple[float, ...]) -> complex:
    """Linear-in-eps Richardson extrapolation through the last two points,
    after checking the sequence contracts when it is long enough."""
    if len(raw) >= 3:
        steps = [abs(b - a) for a, b in zip(raw, raw[1:])]
        for wide, narrow in zip(steps, steps[1:]):
            if narrow > 0.5 * wide and narrow > 1e-12:
                raise OracleConvergenceError(
                    f"regulator sequence not Cauchy: successive differences {steps}"
                )
    e1, e2 = eps[-2], eps[-1]
    return raw[-1] + (raw[-1] - raw[-2]) * e2 / (e1 - e2)


def _quad(f, a, b, spec, points=None):
    with warnings.catch_warnings():
        # the regularized light-cone spikes trip scipy's slow-convergence
        # heuristic; accuracy is controlled by the Richardson Cauchy check
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(
            f,
            a,
            b,
            points=points,
            limit=spec.subdivision_limit,
            epsabs=spec.quad_abs_tol,
            epsrel=spec.quad_rel_tol,
        )
    return value


def _null_time_offsets(pt, time_rate: float, count: int = 4) -> list[float]:
    """Coordinate-time differences at which the first few images go null."""
    offsets = [0.0]
    for n in range(count):
        for sign in (-1, +1):
            alpha = pt.alpha(n, sign)
            if alpha > 0.0 and math.isfinite(alpha):
                offsets.append(alpha / time_rate)
    return offsets


def transition_probability_direct(
    detector: DetectorConfig,
    params: SpacetimeParams,
    spec: OracleSpec | None = None,
) -> OracleEstimate:
    """Transition probability per squared coupling by double integration.

    Integrates exp(-(tau^2 + tau'^2)/2) e^(-i gap (tau - tau')) W along the
    static trajectory.  The u -> -u reflection maps the integrand to its
    conjugate, so only the real part is accumulated and the result is real.
    """
    spec = spec or OracleSpec()
    gamma = redshift(detector.radius, params)
    gap = detector.gap
    evaluator = ImageSumEvaluator(
        params,
        detector.radius,
        detector.radius,
        control=ImageSumControl(tol=spec.image_tol),
    )
    time_rate = params.horizon_radius / params.ads_length**2
    pt = PTermParams.from_detector(params, detector)
    half_width = 2.0 * spec.tau_max
    u_points = sorted(
        {
            s * gamma * off
            for off in _null_time_offsets(pt, time_rate)
            for s in (-1.0, 1.0)
            if abs(gamma * off) < half_width
        }
    )

    def value_at(eps: float) -> float:
        def inner(v):
            def f(u):
                t1 = (v + u) / (2.0 * gamma)
                t2 = (v - u) / (2.0 * gamma)
                w = evaluator(t1, t2, eps)
                return math.exp(-(u * u + v * v) / 4.0) * (
                    complex(math.cos(gap * u), -math.sin(gap * u)) * w
                ).real

            return _quad(f, -half_width, half_width, spec, points=u_points)

        # BTZ part is v-independent and the twisted part is even in v
        return 0.5 * 2.0 * _quad(inner, 0.0, half_width, spec)

    raw = [value_at(e) for e in spec.epsilon_sequence]
    value = _extrapolate(raw, spec.epsilon_sequence).real
    return OracleEstimate(value, tuple(spec.epsilon_sequence), tuple(raw))


def _pair_frame(pair: DetectorPair, params: SpacetimeParams):
    ga = redshift(pair.a.radius, params)
    gb = redshift(pair.b.radius, params)
    cu = 0.5 * (1.0 / ga + 1.0 / gb)
    cv = 0.5 * (1.0 / ga - 1.0 / gb)
    return ga, gb, cu, cv


def nonlocal_correlation_direct(
    pair: DetectorPair,
    params: SpacetimeParams,
    spec: OracleSpec | None = None,
) -> OracleEstimate:
    """Time-ordered pair element per squared coupling, complex.

    The later field operator sits in the second Wightman slot; for static
    trajectories the coordinate-time order decides the proper-time order.
    The joint reflection (u, v) -> (-u, -v) leaves the kernel invariant and
    conjugates the phase, folding the v integral onto [0, inf) with
    2 cos(gap * v).
    """
    spec = spec or OracleSpec()
    ga, gb, cu, cv = _pair_frame(pair, params)
    gap = pair.gap
    ctl = ImageSumControl(tol=spec.image_tol)
    w_ab = ImageSumEvaluator(params, pair.a.radius, pair.b.radius, control=ctl)
    w_ba = ImageSumEvaluator(params, pair.b.radius, pair.a.radius, control=ctl)
    time_rate = params.horizon_radius / params.ads_length**2
    xt = XTermParams.from_pair(params, pair)
    half_width = 2.0 * spec.tau_max
    null_dts = _null_time_offsets(xt, time_rate)

    def value_at(eps: float) -> complex:
        def kernel(u, v):
            ta = (v + u) / (2.0 * ga)
            tb = (v - u) / (2.0 * gb)
            if tb >= ta:
                return w_ab(ta, tb, eps)
            return w_ba(tb, ta, eps)

        def inner(v):
            pts = set()
            for dt in null_dts:
                for s in (-1.0, 1.0):
                    u = (s * dt - cv * v) / cu
                    if -half_width < u < half_width:
                        pts.add(u)

            def f_re(u):
                return math.exp(-(u * u + v * v) / 4.0) * kernel(u, v).real

            def f_im(u):
                return math.exp(-(u * u + v * v) / 4.0) * kernel(u, v).imag

            pts = sorted(pts)
            re = _quad(f_re, -half_width, half_width, spec, points=pts)
            im = _quad(f_im, -half_width, half_width, spec, points=pts)
            return complex(re, im)

        re = _quad(lambda v: 2.0 * math.cos(gap * v) * inner(v).real, 0.0, half_width, spec)
        im = _quad(lambda v: 2.0 * math.cos(gap * v) * inner(v).imag, 0.0, half_width, spec)
        return 0.5 * complex(re, im)

    raw = [value_at(e) for e in spec.epsilon_sequence]
    value = _extrapolate(raw, spec.epsilon_sequence)
    return OracleEstimate(value, tuple(spec.epsilon_sequence), tuple(raw))


def total_correlation_direct(
    pair: DetectorPair,
    params: SpacetimeParams,
    spec: OracleSpec | None = None,
) -> OracleEstimate:
    """Unordered pair element (total correlations) per squared coupling.

    Phase e^(-i gap (tau_A - tau_B)) with the plain Wightman kernel
    W(x_A, x_B); integrated over the full plane without symmetry folding
    since it only feeds density-matrix cross-checks.
    """
    spec = spec or OracleSpec()
    ga, gb, cu, cv = _pair_frame(pair, params)
    gap = pair.gap
    w_ab = ImageSumEvaluator(
        params, pair.a.radius, pair.b.radius, control=ImageSumControl(tol=spec.image_tol)
    )
    time_rate = params.horizon_radius / params.ads_length**2
    xt = XTermParams.from_pair(params, pair)
    half_width = 2.0 * spec.tau_max
    null_dts = _null_time_offsets(xt, time_rate)

    def value_at(eps: float) -> complex:
        def inner(v):
            pts = set()
            for dt in null_dts:
                for s in (-1.0, 1.0):
                    u = (s * dt - cv * v) / cu
                    if -half_width < u < half_width:
                        pts.add(u)

            def make(part):
                def f(u):
                    ta = (v + u) / (2.0 * ga)
                    tb = (v - u) / (2.0 * gb)
                    w = w_ab(ta, tb, eps)
                    phase = complex(math.cos(gap * u), -math.sin(gap * u))
                    return math.exp(-(u * u + v * v) / 4.0) * getattr(phase * w, part)

                return f

            pts = sorted(pts)
            re = _quad(make("real"), -half_width, half_width, spec, points=pts)
            im = _quad(make("imag"), -half_width, half_width, spec, points=pts)
            return complex(re, im)

        re = _quad(lambda v: inner(v).real, -half_width, half_width, spec)
        im = _quad(lambda v: inner(v).imag, -half_width, half_width, spec)
        return 0.5 * complex(re, im)

    raw = [value_at(e) for e in spec.epsilon_sequence]
    value = _extrapolate(raw, spec.epsilon_sequence)
    return OracleEstimate(value, tuple(spec.epsilon_sequence), tuple(raw))


def density_matrix_direct(
    pair: DetectorPair,
    params: SpacetimeParams,
    spec: OracleSpec | None = None,
    coupling: float = 0.05,
) -> np.ndarray:
    """Assemble the leading-order pair density matrix at a nominal coupling.

    Layout in the basis (gg, ge, eg, ee):

        [[1 - P_A - P_B, 0,    0,    X*],
         [0,             P_B,  C*,   0 ],
         [0,             C,    P_A,  0 ],
         [X,             0,    0,    0 ]]

    with every element scaled by coupling^2.  The ee element vanishes at
    this order, so the matrix is positive only up to O(coupling^4) terms.
    """
    spec = spec or OracleSpec()
    p_a = transition_probability_direct(pair.a, params, spec).value * coupling**2
    p_b = transition_probability_direct(pair.b, params, spec).value * coupling**2
    x = nonlocal_correlation_direct(pair, params, spec).value * coupling**2
    c = total_correlation_direct(pair, params, spec).value * coupling**2
    return np.array(
        [
            [1.0 - p_a - p_b, 0.0, 0.0, np.conj(x)],
            [0.0, p_b, np.conj(c), 0.0],
            [0.0, c, p_a, 0.0],
            [x, 0.0, 0.0, 0.0],
        ],
        dtype=complex,
    )
