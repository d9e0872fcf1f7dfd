"""Closed-form harvesting observables: transition probabilities, nonlocal
correlations and concurrence for a static detector pair, per squared
coupling.

For static trajectories with Gaussian switching, each image term of the
Wightman function integrates to a single one-dimensional integral: the
zero-winding term of the transition probability becomes a Fermi-factor
convolution at the local KMS temperature, every other angular image becomes
a damped oscillatory integral across the branch point of
(cosh(alpha_n) - cosh(y))^(-1/2), and the twisted (geon) images produce
smooth kernels (Z_n + cosh(y))^(-1/2).  This module assembles those series;
the ``oracle`` module provides the same quantities by brute-force double
integration for cross-checking.

All values are reported per squared dimensionless coupling, i.e. divided by
(lambda sqrt(sigma))^2; the physical observables scale with that factor by
definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DetectorConfig, DetectorPair, Family, SpacetimeParams, redshift
from .quadrature import (
    QuadratureSpec,
    integrate_branchcut,
    integrate_branchcut_cos,
    integrate_finite,
    integrate_semi_infinite,
)
from .wightman import MAX_IMAGE_TERMS

__all__ = [
    "SeriesControl",
    "ObservableSum",
    "PTermParams",
    "XTermParams",
    "HarvestErrors",
    "HarvestResult",
    "btz_transition_probability",
    "geon_transition_correction",
    "transition_probability",
    "btz_nonlocal_correlation",
    "geon_nonlocal_correction",
    "nonlocal_correlation",
    "concurrence",
    "concurrence_from_density_matrix",
    "harvest",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class SeriesControl:
    """Stopping policy for the image-term series.

    Summation stops once two consecutive terms fall below
    ``rel_term_tol`` times the magnitude of the running total (a two-term
    window guards against accidental small terms), or at ``max_terms``.
    A geometric bound on the dropped tail is folded into the error
    estimate.  The default keeps truncation well below the quadrature
    tolerances so it never dominates the error budget.
    """

    rel_term_tol: float = 1e-6
    max_terms: int = MAX_IMAGE_TERMS

    def __post_init__(self):
        if not 0 < self.rel_term_tol < 1:
            raise ValueError("rel_term_tol must lie in (0, 1)")
        if self.max_terms < 3:
            raise ValueError("max_terms must be at least 3")


@dataclass
class ObservableSum:
    """One assembled observable: value per squared coupling plus diagnostics.

    ``n_terms`` is the largest image index that entered the sum,
    ``integral_count`` the number of one-dimensional quadratures performed
    (boundary-condition terms included, which is what makes the zeta = 0
    term-count check exact), and ``err`` the accumulated quadrature error
    plus the geometric truncation-tail bound.
    """

    value: complex | float
    err: float
    n_terms: int
    integral_count: int
    evaluations: int

    def __add__(self, other: "ObservableSum") -> "ObservableSum":
        return ObservableSum(
            self.value + other.value,
            self.err + other.err,
            max(self.n_terms, other.n_terms),
            self.integral_count + other.integral_count,
            self.evaluations + other.evaluations,
        )


def _stable_arccosh(q: float) -> float:
    """arccosh(q) via log1p, accurate next to q = 1 and for huge q."""
    if q < 1.0:
        if q > 1.0 - 1e-12:
            return 0.0
        raise ValueError(f"arccosh argument {q} below 1")
    if q > 1e150:
        return math.log(2.0) + math.log(q)
    d = q - 1.0
    return math.log1p(d + math.sqrt(d * (d + 2.0)))


def _cosh_or_inf(w: float) -> float:
    return math.cosh(w) if w < 700.0 else math.inf


@dataclass(frozen=True)
class PTermParams:
    """Per-detector parameter block of the transition-probability series.

    ``temperature`` is the dimensionless local KMS temperature
    r_h sigma / (2 pi ell^2 gamma), ``damping`` and ``oscillation`` the
    Gaussian-damping and frequency parameters of the image integrals, and
    ``alpha``/``z`` the per-winding branch points and smooth-kernel offsets
    for the ordinary and twisted images respectively.
    """

    temperature: float
    damping: float
    oscillation: float
    winding_step: float   # 2 pi r_h / ell per unit winding
    scale: float          # r_h^2 / (gamma^2 ell^2)
    ratio: float          # R^2 / r_h^2

    @classmethod
    def from_detector(cls, params: SpacetimeParams, det: DetectorConfig) -> "PTermParams":
        gamma = redshift(det.radius, params)
        rh = params.horizon_radius
        ell = params.ads_length
        return cls(
            temperature=rh / (2.0 * math.pi * ell**2 * gamma),
            damping=gamma**2 * ell**4 / (4.0 * rh**2),
            oscillation=gamma * det.gap * ell**2 / rh,
            winding_step=2.0 * math.pi * rh / ell,
            scale=rh**2 / (gamma**2 * ell**2),
            ratio=det.radius**2 / rh**2,
        )

    def alpha(self, n: int, sign: int) -> float:
        """Branch point of the n-th ordinary image, sign -1 or +1.

        alpha(0, -1) vanishes identically (the coincidence image); its
        series term is the thermal Fermi integral instead.
        """
        if n == 0 and sign < 0:
            return 0.0
        w = abs(n) * self.winding_step
        if w > 350.0:
            return w + math.log(self.scale * self.ratio)
        return _stable_arccosh(self.scale * (self.ratio * math.cosh(w) + sign))

    def z(self, n: int, sign: int) -> float:
        """Smooth-kernel offset of the n-th twisted image; z(n, -1) >= 1."""
        w = abs(n + 0.5) * self.winding_step
        return self.scale * (self.ratio * _cosh_or_inf(w) + sign)


@dataclass(frozen=True)
class XTermParams:
    """Per-pair parameter block of the nonlocal-correlation series.

    ``redshift_fraction`` is gamma_A gamma_B / (gamma_A^2 + gamma_B^2),
    bounded by 1/2 with saturation only at equal radii; it controls the
    Gaussian gap suppression of the ordinary (+) and twisted (-) pieces.
    """

    redshift_fraction: float
    damping: float
    oscillation_minus: float
    oscillation_plus: float
    winding_step: float
    scale: float          # r_h^2 / (gamma_A gamma_B ell^2)
    ratio: float          # R_A R_B / r_h^2
    _alpha0: float        # exact branch point of the zero-winding image

    @classmethod
    def from_pair(cls, params: SpacetimeParams, pair: DetectorPair) -> "XTermParams":
        return cls.from_radii(
            params,
            pair.a.radius,
            pair.b.radius,
            redshift(pair.a.radius, params),
            redshift(pair.b.radius, params),
            pair.gap,
        )

    @classmethod
    def from_radii(
        cls,
        params: SpacetimeParams,
        ra: float,
        rb: float,
        ga: float,
        gb: float,
        gap: float,
    ) -> "XTermParams":
        """Build from explicit radii and redshifts; exchanging the two
        detectors only flips ``oscillation_minus``, which enters through an
        even cosine, making the label-swap invariance structural."""
        rh = params.horizon_radius
        ell = params.ads_length
        frac = ga * gb / (ga**2 + gb**2)
        if frac > 0.5 + 1e-12:
            raise ValueError("redshift fraction exceeded 1/2; inconsistent pair geometry")
        gg_ell2 = ga * gb * ell**2
        # alpha(0, -1) suffers catastrophic cancellation for close radii;
        # (ra rb - rh^2)^2 - (gg_ell2)^2 = rh^2 (rb - ra)^2 gives it exactly.
        delta = (rh * (rb - ra)) ** 2 / (gg_ell2 * (ra * rb - rh**2 + gg_ell2))
        alpha0 = math.log1p(delta + math.sqrt(delta * (delta + 2.0)))
        return cls(
            redshift_fraction=frac,
            damping=0.5 * (ga * gb) ** 2 / (ga**2 + gb**2) * ell**4 / rh**2,
            oscillation_minus=gap * frac * (ga - gb) * ell**2 / rh,
            oscillation_plus=gap * frac * (ga + gb) * ell**2 / rh,
            winding_step=2.0 * math.pi * rh / ell,
            scale=rh**2 / gg_ell2,
            ratio=ra * rb / rh**2,
            _alpha0=alpha0,
        )

    def alpha(self, n: int, sign: int) -> float:
        if n == 0 and sign < 0:
            return self._alpha0
        w = abs(n) * self.winding_step
        if w > 350.0:
            return w + math.log(self.scale * self.ratio)
        return _stable_arccosh(self.scale * (self.ratio * math.cosh(w) + sign))

    def z(self, n: int, sign: int) -> float:
        w = abs(n + 0.5) * self.winding_step
        return self.scale * (self.ratio * _cosh_or_inf(w) + sign)


def _sum_image_series(term_fn, start, params, control):
    """Sum term_fn(n) for n >= start until two consecutive terms are
    negligible relative to the running total (seeded totals included by the
    caller through closure state).  Returns (total, err, n_reached,
    integral_count, evaluations) with a geometric tail bound in err.
    """
    ratio = math.exp(-math.pi * math.sqrt(params.mass))
    total = 0.0
    err = 0.0
    count = 0
    evals = 0
    mags = []
    n = start
    while True:
        value, terr, tcount, tevals = term_fn(n)
        total = total + value
        err += terr
        count += tcount
        evals += tevals
        mags.append(abs(value))
        scale = abs(total)
        if len(mags) >= 2 and scale > 0.0:
            if mags[-1] <= control.rel_term_tol * scale and mags[-2] <= control.rel_term_tol * scale:
                break
        if n - start + 1 >= control.max_terms:
            break
        n += 1
    err += mags[-1] * ratio / (1.0 - ratio)
    return total, err, n, count, evals


def _fermi_gaussian(gap: float, temperature: float, quad: QuadratureSpec):
    """int_R exp(-(gap - y)^2) / (e^(y/T) + 1) dy, split at the Fermi edge."""

    def f(y):
        return np.exp(-((gap - y) ** 2)) * 0.5 * (1.0 - np.tanh(y / (2.0 * temperature)))

    span = 2.0 * math.sqrt(-math.log(quad.abs_tol) + 2.0)
    lo, hi = gap - span, gap + span
    if lo < 0.0 < hi:
        return integrate_finite(f, lo, 0.0, quad) + integrate_finite(f, 0.0, hi, quad)
    return integrate_finite(f, lo, hi, quad)


def btz_transition_probability(
    detector: DetectorConfig,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Transition probability of one detector in the BTZ spacetime.

    Assembles (1/sqrt(2 pi)) * [ sqrt(pi/2) * thermal term
    - (zeta/2) * branch integral at alpha(0, +)
    + sum_{n>=1} (branch integral at alpha(n, -) - zeta * ... at alpha(n, +)) ],
    where the n >= 1 terms already account for the +-n image pairing.
    """
    quad = quad or QuadratureSpec()
    series = series or SeriesControl()
    pt = PTermParams.from_detector(params, detector)
    zeta = params.zeta

    thermal = _fermi_gaussian(detector.gap, pt.temperature, quad)
    seed = math.sqrt(math.pi / 2.0) * thermal.value
    seed_err = math.sqrt(math.pi / 2.0) * thermal.err_estimate
    seed_count = 1
    seed_evals = thermal.evaluations
    if zeta:
        bc0 = integrate_branchcut(pt.alpha(0, +1), pt.damping, pt.oscillation, quad)
        seed -= 0.5 * zeta * bc0.value
        seed_err += 0.5 * bc0.err_estimate
        seed_count += 1
        seed_evals += bc0.evaluations

    def term(n):
        res = integrate_branchcut(pt.alpha(n, -1), pt.damping, pt.oscillation, quad)
        value, terr, tcount, tevals = res.value, res.err_estimate, 1, res.evaluations
        if zeta:
            resp = integrate_branchcut(pt.alpha(n, +1), pt.damping, pt.oscillation, quad)
            value -= zeta * resp.value
            terr += resp.err_estimate
            tcount += 1
            tevals += resp.evaluations
        return value, terr, tcount, tevals

    # the stopping scale must include the seeded thermal and boundary terms,
    # so the generic series helper is not reused here
    ratio = math.exp(-math.pi * math.sqrt(params.mass))
    total = seed
    err = seed_err
    count = seed_count
    evals = seed_evals
    mags = []
    n = 1
    while True:
        value, terr, tcount, tevals = term(n)
        total += value
        err += terr
        count += tcount
        evals += tevals
        mags.append(abs(value))
        if len(mags) >= 2:
            scale = abs(total)
            if mags[-1] <= series.rel_term_tol * scale and mags[-2] <= series.rel_term_tol * scale:
                break
        if n >= series.max_terms:
            break
        n += 1
    err += mags[-1] * ratio / (1.0 - ratio)
    return ObservableSum(total / _SQRT_2PI, err / _SQRT_2PI, n, count, evals)


def geon_transition_correction(
    detector: DetectorConfig,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Twisted-image correction to the transition probability.

    The twisted images pair as n <-> -1-n, so the two-sided sum is twice
    the n >= 0 sum.  Termwise positive for zeta = 1 since z(n, -) < z(n, +).
    """
    quad = quad or QuadratureSpec()
    series = series or SeriesControl()
    pt = PTermParams.from_detector(params, detector)
    zeta = params.zeta

    def smooth(zoff):
        # full-line integral of an even integrand, folded onto [0, inf)
        def f(y):
            return np.exp(-pt.damping * y * y) / np.sqrt(zoff + np.cosh(y))

        res = integrate_semi_infinite(f, 0.0, pt.damping, quad, linear_decay_rate=0.5)
        res.value *= 2.0
        res.err_estimate *= 2.0
        return res

    def term(n):
        # factor 2 pairs the twisted windings n and -1-n
        res = smooth(pt.z(n, -1))
        value, terr, tcount, tevals = 2.0 * res.value, 2.0 * res.err_estimate, 1, res.evaluations
        if zeta:
            resp = smooth(pt.z(n, +1))
            value -= 2.0 * zeta * resp.value
            terr += 2.0 * resp.err_estimate
            tcount += 1
            tevals += resp.evaluations
        return value, terr, tcount, tevals

    total, err, n_reached, count, evals = _sum_image_series(term, 0, params, series)
    pref = math.exp(-detector.gap**2) / (4.0 * _SQRT_2PI)
    return ObservableSum(pref * total, pref * err, n_reached, count, evals)


def transition_probability(
    detector: DetectorConfig,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Transition probability in the spacetime selected by ``params.family``."""
    base = btz_transition_probability(detector, params, quad, series)
    if params.family is Family.BTZ:
        return base
    return base + geon_transition_correction(detector, params, quad, series)


def btz_nonlocal_correlation(
    pair: DetectorPair,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Nonlocal correlation (the off-diagonal pair element) in BTZ, complex.

    Each image term is the complex branch-point integral with cosine
    numerator; its imaginary part is the continuation past the branch
    point, which the brute-force integrals confirm is physical.  The sum
    runs over all windings, folded as term(0) + 2 sum_{n>=1} by evenness.
    """
    xt = XTermParams.from_pair(params, pair)
    return _btz_nonlocal_from_terms(xt, pair.gap, params, quad, series)


def _btz_nonlocal_from_terms(
    xt: XTermParams,
    gap: float,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    quad = quad or QuadratureSpec()
    series = series or SeriesControl()
    zeta = params.zeta

    def term(n):
        weight = 1.0 if n == 0 else 2.0
        res = integrate_branchcut_cos(xt.alpha(n, -1), xt.damping, xt.oscillation_minus, quad)
        value = weight * res.value
        terr = weight * res.err_estimate
        tcount = 1
        tevals = res.evaluations
        if zeta:
            resp = integrate_branchcut_cos(xt.alpha(n, +1), xt.damping, xt.oscillation_minus, quad)
            value -= weight * zeta * resp.value
            terr += weight * resp.err_estimate
            tcount += 1
            tevals += resp.evaluations
        return value, terr, tcount, tevals

    total, err, n_reached, count, evals = _sum_image_series(term, 0, params, series)
    pref = -(1.0 / (2.0 * _SQRT_PI)) * math.sqrt(xt.redshift_fraction) * math.exp(
        -gap**2 * (0.5 + xt.redshift_fraction)
    )
    return ObservableSum(pref * total, abs(pref) * err, n_reached, count, evals)


def geon_nonlocal_correction(
    pair: DetectorPair,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Twisted-image correction to the nonlocal correlation, real valued.

    Carries exp[-gap^2 (1/2 - redshift_fraction)]: the redshift fraction
    enters with the opposite sign to the BTZ piece, so large gaps suppress
    this correction less, which is what drives the geon advantage at
    large energy gap.
    """
    quad = quad or QuadratureSpec()
    series = series or SeriesControl()
    xt = XTermParams.from_pair(params, pair)
    zeta = params.zeta

    def smooth(zoff):
        def f(y):
            return (
                np.exp(-xt.damping * y * y)
                * np.cos(xt.oscillation_plus * y)
                / np.sqrt(zoff + np.cosh(y))
            )

        return integrate_semi_infinite(f, 0.0, xt.damping, quad, linear_decay_rate=0.5)

    def term(n):
        # half-line kernels as printed; factor 2 pairs windings n and -1-n
        res = smooth(xt.z(n, -1))
        value, terr, tcount, tevals = 2.0 * res.value, 2.0 * res.err_estimate, 1, res.evaluations
        if zeta:
            resp = smooth(xt.z(n, +1))
            value -= 2.0 * zeta * resp.value
            terr += 2.0 * resp.err_estimate
            tcount += 1
            tevals += resp.evaluations
        return value, terr, tcount, tevals

    total, err, n_reached, count, evals = _sum_image_series(term, 0, params, series)
    pref = -(1.0 / (2.0 * _SQRT_PI)) * math.sqrt(xt.redshift_fraction) * math.exp(
        -pair.gap**2 * (0.5 - xt.redshift_fraction)
    )
    return ObservableSum(pref * total, abs(pref) * err, n_reached, count, evals)


def nonlocal_correlation(
    pair: DetectorPair,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> ObservableSum:
    """Nonlocal correlation in the spacetime selected by ``params.family``."""
    base = btz_nonlocal_correlation(pair, params, quad, series)
    if params.family is Family.BTZ:
        return base
    return base + geon_nonlocal_correction(pair, params, quad, series)


def concurrence(p_a: float, p_b: float, x_abs: float, negative_tol: float = 1e-8) -> float:
    """Concurrence 2 max(0, |X| - sqrt(P_A P_B)) of the harvested pair state.

    Raises
    ------
    ValueError
        If a transition probability is negative beyond ``negative_tol``,
        which signals a quadrature failure upstream.
    """
    if p_a < -negative_tol or p_b < -negative_tol:
        raise ValueError(
            f"negative transition probability beyond tolerance: p_a={p_a}, p_b={p_b}"
        )
    if x_abs < 0:
        raise ValueError(f"|X| must be nonnegative, got {x_abs}")
    return 2.0 * max(0.0, x_abs - math.sqrt(max(p_a, 0.0) * max(p_b, 0.0)))


def concurrence_from_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10) -> float:
    """Two-qubit concurrence from the spin-flip eigenvalue construction.

    Computes the square roots w_1 >= ... >= w_4 of the eigenvalues of
    rho (sigma_y x sigma_y) rho* (sigma_y x sigma_y) and returns
    max(0, w_1 - w_2 - w_3 - w_4).  Works for any two-qubit state; for the
    perturbative pair state it reduces to ``concurrence``.

    Raises
    ------
    ValueError
        If rho is not 4x4 Hermitian with unit trace (to tolerance).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    scale = max(np.abs(rho).max(), 1e-300)
    if np.abs(rho - rho.conj().T).max() > herm_tol * scale:
        raise ValueError("density matrix is not Hermitian to tolerance")
    if abs(np.trace(rho).real - 1.0) > 1e-6 or abs(np.trace(rho).imag) > 1e-9:
        raise ValueError(f"density matrix trace {np.trace(rho)} differs from 1")
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    flip = np.kron(sy, sy)
    product = rho @ flip @ rho.conj() @ flip
    evals = np.linalg.eigvals(product)
    w = np.sqrt(np.clip(evals.real, 0.0, None))
    w.sort()
    return float(max(0.0, w[3] - w[2] - w[1] - w[0]))


@dataclass(frozen=True)
class HarvestErrors:
    p_a: float
    p_b: float
    x_abs: float
    concurrence: float


@dataclass(frozen=True)
class HarvestResult:
    """All pair observables per squared coupling, with error estimates."""

    p_a: float
    p_b: float
    x_abs: float
    concurrence: float
    x_value: complex
    err: HarvestErrors
    n_max: int

    def as_dict(self) -> dict:
        return {
            "p_a": self.p_a,
            "p_b": self.p_b,
            "x_abs": self.x_abs,
            "concurrence": self.concurrence,
            "x_real": self.x_value.real,
            "x_imag": self.x_value.imag,
            "err_p_a": self.err.p_a,
            "err_p_b": self.err.p_b,
            "err_x_abs": self.err.x_abs,
            "err_concurrence": self.err.concurrence,
            "n_max": self.n_max,
        }


def harvest(
    pair: DetectorPair,
    params: SpacetimeParams,
    quad: QuadratureSpec | None = None,
    series: SeriesControl | None = None,
) -> HarvestResult:
    """Evaluate both transition probabilities, |X| and the concurrence."""
    pa = transition_probability(pair.a, params, quad, series)
    pb = transition_probability(pair.b, params, quad, series)
    x = nonlocal_correlation(pair, params, quad, series)
    x_abs = abs(x.value)
    conc = concurrence(pa.value, pb.value, x_abs)
    pa_v = max(pa.value, 0.0)
    pb_v = max(pb.value, 0.0)
    if pa_v > 0.0 and pb_v > 0.0:
        err_c = 2.0 * (
            x.err
            + 0.5 * (math.sqrt(pb_v / pa_v) * pa.err + math.sqrt(pa_v / pb_v) * pb.err)
        )
    else:
        err_c = 2.0 * x.err
    return HarvestResult(
        p_a=pa.value,
        p_b=pb.value,
        x_abs=x_abs,
        concurrence=conc,
        x_value=complex(x.value),
        err=HarvestErrors(pa.err, pb.err, x.err, err_c),
        n_max=max(pa.n_terms, pb.n_terms, x.n_terms),
    )
