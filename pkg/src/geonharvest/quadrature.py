"""Tanh-sinh (double-exponential) quadrature for the three integrand families
that appear in the harvesting observables:

1. smooth Gaussian-damped kernels on finite or semi-infinite intervals,
2. inverse-square-root endpoint singularities, and
3. the half-line oscillatory integrals across the branch point of
   (cosh(alpha) - cosh(y))^(-1/2), split analytically into their real
   sub-integrands on [0, alpha] and (alpha, inf).

Endpoint singularities and float64
----------------------------------
Nodes of the tanh-sinh rule approach the interval endpoints double
exponentially, far below the float64 spacing around the endpoint value.
An integrand that needs the distance to a singular endpoint therefore
cannot recover it from the node coordinate alone.  Following the usual
double-argument convention of production tanh-sinh implementations, an
integrand for a declared singular endpoint is called as ``f(y, d)`` where
``d`` is the distance to that endpoint, computed in exact form from the
node transform.  Smooth integrands are called as ``f(y)``.  All integrands
must accept numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_branchcut",
    "integrate_branchcut_cos",
]

# Nodes with |t| beyond this carry weight*f below ~1e-290 even against an
# inverse-square-root endpoint blowup, so they can never matter in float64.
_T_MAX = 4.8
_BASE_STEP = 1.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and refinement limits for the tanh-sinh engine.

    ``err_estimate`` of a result is the absolute difference between the
    last two refinement levels; convergence requires it to fall below
    ``max(abs_tol, rel_tol * |value|)``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_levels: int = 12
    tail_cutoff: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_levels < 3:
            raise ValueError("max_levels must be at least 3")
        if self.tail_cutoff is not None and not self.tail_cutoff > 0:
            raise ValueError("tail_cutoff must be positive when given")


@dataclass
class QuadResult:
    """Value, level-difference error estimate and integrand evaluation count."""

    value: float
    err_estimate: float
    evaluations: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.err_estimate + other.err_estimate,
            self.evaluations + other.evaluations,
        )


class QuadratureError(RuntimeError):
    """Raised when refinement is exhausted; carries the best estimate."""

    def __init__(self, message: str, best: float = math.nan, err_estimate: float = math.inf,
                 evaluations: int = 0):
        super().__init__(message)
        self.best = best
        self.err_estimate = err_estimate
        self.evaluations = evaluations


def _one_plus_tanh(z: np.ndarray) -> np.ndarray:
    """1 + tanh(z), accurate for z -> -inf where the naive form cancels."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 2.0 / (1.0 + np.exp(-2.0 * z[pos]))
    ez = np.exp(2.0 * z[~pos])
    out[~pos] = 2.0 * ez / (1.0 + ez)
    return out


@lru_cache(maxsize=64)
def _level_nodes(level: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """New abscissa data introduced at a refinement level.

    Returns (u, w, d_minus, d_plus) on the reference interval [-1, 1]:
    u = tanh((pi/2) sinh t), the weight w without the step factor, and the
    exact distances d_minus = 1 + u, d_plus = 1 - u to the endpoints.
    """
    h = _BASE_STEP * 0.5**level
    if level == 0:
        k = np.arange(-math.floor(_T_MAX / h), math.floor(_T_MAX / h) + 1)
        t = k * h
    else:
        k = np.arange(1, math.floor(_T_MAX / h) + 1, 2)
        t = np.concatenate([-k[::-1], k]) * h
    z = 0.5 * math.pi * np.sinh(t)
    d_plus = _one_plus_tanh(-z)   # 1 - u
    d_minus = _one_plus_tanh(z)   # 1 + u
    u = np.tanh(z)
    az = np.abs(z)
    sech = 2.0 * np.exp(-az) / (1.0 + np.exp(-2.0 * az))
    w = 0.5 * math.pi * np.cosh(t) * sech * sech
    keep = w > 1e-290
    return u[keep], w[keep], d_minus[keep], d_plus[keep]


def _tanh_sinh(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec,
    singular: str | None,
) -> QuadResult:
    if not b > a:
        if b == a:
            return QuadResult(0.0, 0.0, 0)
        raise ValueError(f"need a < b, got a={a}, b={b}")
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)

    running = 0.0
    evals = 0
    prev_value = None
    value = None
    err = math.inf
    for level in range(spec.max_levels + 1):
        u, w, d_minus, d_plus = _level_nodes(level)
        y = mid + half * u
        if singular == "right":
            fy = f(y, half * d_plus)
        elif singular == "left":
            fy = f(y, half * d_minus)
        else:
            fy = f(y)
        fy = np.asarray(fy, dtype=float)
        if not np.all(np.isfinite(fy)):
            raise QuadratureError(
                f"integrand returned non-finite values on [{a}, {b}]",
                best=value if value is not None else math.nan,
                err_estimate=err,
                evaluations=evals,
            )
        evals += y.size
        h = _BASE_STEP * 0.5**level
        running = (running * 0.5 if level > 0 else 0.0) + h * float(w @ fy)
        prev_value, value = value, half * running
        if prev_value is not None:
            err = abs(value - prev_value)
            if level >= 2 and err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
                return QuadResult(value, err, evals)
    raise QuadratureError(
        f"tanh-sinh did not converge in {spec.max_levels} levels on [{a}, {b}] "
        f"(last level difference {err:.3e})",
        best=value,
        err_estimate=err,
        evaluations=evals,
    )


def integrate_finite(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    singular: str | None = None,
) -> QuadResult:
    """Integrate f over [a, b] with the tanh-sinh rule.

    Parameters
    ----------
    f : callable
        Vectorized integrand.  Called as ``f(y)`` unless ``singular`` names
        an endpoint, in which case it is called as ``f(y, d)`` with ``d``
        the distance to that endpoint (see module docstring).
    a, b : float
        Finite limits, a <= b.
    spec : QuadratureSpec, optional
    singular : {'left', 'right', None}
        Endpoint at which f may blow up no worse than an inverse square root.

    Raises
    ------
    QuadratureError
        If the level differences have not met the tolerance after
        ``spec.max_levels`` refinements; the best estimate is attached.
    """
    if singular not in (None, "left", "right"):
        raise ValueError(f"singular must be 'left', 'right' or None, got {singular!r}")
    return _tanh_sinh(f, a, b, spec or QuadratureSpec(), singular)


def _decay_cutoff(gaussian_rate: float, linear_rate: float, abs_tol: float) -> float:
    """Distance s beyond which exp(-g s^2 - l s) < abs_tol, doubled as a guard."""
    budget = -math.log(abs_tol) + 2.0
    if gaussian_rate > 0:
        s = (-linear_rate + math.sqrt(linear_rate**2 + 4.0 * gaussian_rate * budget)) / (
            2.0 * gaussian_rate
        )
    elif linear_rate > 0:
        s = budget / linear_rate
    else:
        raise ValueError("integrand must decay: give a positive gaussian or linear rate")
    return 2.0 * s


def integrate_semi_infinite(
    f: Callable,
    a: float,
    gaussian_decay_rate: float,
    spec: QuadratureSpec | None = None,
    *,
    center: float = 0.0,
    linear_decay_rate: float = 0.0,
) -> QuadResult:
    """Integrate a Gaussian-damped integrand over [a, inf) (or all of R).

    The envelope is assumed bounded by ``exp(-g (y-center)^2 - l (y-center))``
    away from ``center`` with g = ``gaussian_decay_rate`` and
    l = ``linear_decay_rate``.  The interval is truncated where the envelope
    falls below ``spec.abs_tol``, with the cutoff distance doubled as a
    guard; ``spec.tail_cutoff`` overrides the computed distance.  Pass
    ``a = -inf`` for an integral over the whole real line.
    """
    spec = spec or QuadratureSpec()
    if spec.tail_cutoff is not None:
        s = spec.tail_cutoff
    else:
        s = _decay_cutoff(gaussian_decay_rate, linear_decay_rate, spec.abs_tol)
    hi = max(a, center) + s if not math.isinf(a) else center + s
    lo = a if not math.isinf(a) else center - s
    return _tanh_sinh(f, lo, hi, spec, None)


def _branch_kernel(y: np.ndarray, d: np.ndarray, alpha: float) -> np.ndarray:
    """|cosh(alpha) - cosh(y)|^(-1/2) with d = |y - alpha| supplied exactly.

    Uses cosh(a) - cosh(y) = 2 sinh((a+y)/2) sinh((a-y)/2), which stays
    accurate arbitrarily close to the branch point.
    """
    return 1.0 / np.sqrt(2.0 * np.sinh(0.5 * (alpha + y)) * np.sinh(0.5 * d))


def _branch_pieces(alpha, damping, oscillation, spec, want_sin, want_cos):
    """Sub-integrals of the damped oscillatory branch-point integral.

    Returns (inner, tail_sin, tail_cos, evaluations) where
    inner    = int_0^alpha  cos(b y) e^(-a y^2) (cosh alpha - cosh y)^(-1/2)
    tail_sin = int_alpha^oo sin(b y) e^(-a y^2) (cosh y - cosh alpha)^(-1/2)
    tail_cos = same with cos, each requested piece only.
    """
    if not alpha > 0:
        raise ValueError(
            f"branch point alpha must be positive, got {alpha}; "
            "the degenerate alpha = 0 kernel has no branch-cut form"
        )
    if not damping > 0:
        raise ValueError(f"gaussian damping must be positive, got {damping}")
    b = oscillation

    def inner_f(y, d):
        return np.cos(b * y) * np.exp(-damping * y * y) * _branch_kernel(y, d, alpha)

    inner = integrate_finite(inner_f, 0.0, alpha, spec, singular="right")
    evals = inner.evaluations

    # past the branch point the kernel itself decays like exp(-(y-alpha)/2)
    s = _decay_cutoff(damping, 2.0 * damping * alpha + 0.5, (spec or QuadratureSpec()).abs_tol)

    tail_sin = tail_cos = None
    for trig, wanted in ((np.sin, want_sin), (np.cos, want_cos)):
        if not wanted:
            continue

        def tail_f(y, d, trig=trig):
            return trig(b * y) * np.exp(-damping * y * y) * _branch_kernel(y, d, alpha)

        res = integrate_finite(tail_f, alpha, alpha + s, spec, singular="left")
        evals += res.evaluations
        if trig is np.sin:
            tail_sin = res
        else:
            tail_cos = res
    return inner, tail_sin, tail_cos, evals


def integrate_branchcut(
    alpha: float,
    damping: float,
    oscillation: float,
    spec: QuadratureSpec | None = None,
) -> QuadResult:
    """Re of int_0^inf e^(-a y^2) e^(-i b y) (cosh alpha - cosh y)^(-1/2) dy.

    The principal square root (branch cut on the negative real axis,
    approached from the retarded side of the time regularization) turns the
    integrand past y = alpha into -sin(b y) (cosh y - cosh alpha)^(-1/2), so
    the value is computed as the cosine piece on [0, alpha] minus the sine
    tail, each with a singularity-tolerant rule at y = alpha.

    Raises
    ------
    ValueError
        If alpha <= 0 (the degenerate term is a thermal integral, handled
        by the caller) or the damping is not positive.
    """
    spec = spec or QuadratureSpec()
    inner, tail_sin, _, evals = _branch_pieces(alpha, damping, oscillation, spec, True, False)
    return QuadResult(
        inner.value - tail_sin.value,
        inner.err_estimate + tail_sin.err_estimate,
        evals,
    )


def integrate_branchcut_cos(
    alpha: float,
    damping: float,
    oscillation: float,
    spec: QuadratureSpec | None = None,
) -> QuadResult:
    """int_0^inf e^(-a y^2) cos(b y) (cosh alpha - cosh y)^(-1/2) dy, complex.

    With a cosine numerator the continuation past y = alpha is purely
    imaginary: the principal square root of the negative argument maps the
    tail to +i cos(b y) (cosh y - cosh alpha)^(-1/2).  This is the kernel of
    the time-ordered (nonlocal-correlation) integrals, which are genuinely
    complex; only the modulus of their sum is observable, so the overall
    sign convention of the imaginary part is immaterial.
    """
    spec = spec or QuadratureSpec()
    inner, _, tail_cos, evals = _branch_pieces(alpha, damping, oscillation, spec, False, True)
    return QuadResult(
        inner.value + 1j * tail_cos.value,
        inner.err_estimate + tail_cos.err_estimate,
        evals,
    )
