"""Parameter sweeps over mass, gap or detector distance, with the figure
presets used for the standard plots, a process worker pool, and
deterministic CSV output.

CSV contract
------------
UTF-8, LF line endings.  Metadata lines prefixed with ``#`` (key: value),
then a header row naming every column, then one row per grid point per
family in a fixed order: fixed-parameter combinations first (mass-major,
gap-minor), then the axis grid, then the family (btz before geon).  Reals
are written in scientific notation with 12 significant digits; fields that
do not apply to a row are empty.  Per-point failures are recorded in the
``error`` column and do not abort the run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from . import __version__
from .geometry import Family, SpacetimeParams, detector_at_distance, pair_at_distances
from .observables import SeriesControl, harvest, transition_probability
from .quadrature import QuadratureSpec
from .shadow import ShadowQuery, d_death

__all__ = ["SweepSpec", "PRESETS", "preset_spec", "sweep_rows", "write_csv",
           "PAIR_COLUMNS", "DETECTOR_COLUMNS", "SHADOW_COLUMNS"]

PAIR_COLUMNS = (
    "preset", "family", "mass", "ads_length", "zeta", "gap", "dist_a", "sep",
    "p_a", "p_b", "x_abs", "concurrence",
    "err_p_a", "err_p_b", "err_x_abs", "err_concurrence", "n_max", "error",
)
DETECTOR_COLUMNS = PAIR_COLUMNS
SHADOW_COLUMNS = (
    "preset", "family", "mass", "ads_length", "zeta", "gap", "sep",
    "d_death", "status", "bracket_lo", "bracket_hi", "error",
)

_FAMILY_ORDER = (Family.BTZ, Family.GEON)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an axis grid crossed with fixed parameter combinations.

    ``quantity`` selects what is evaluated per point: ``pair`` runs the
    full harvesting observables, ``detector`` only the single-detector
    transition probability, ``shadow`` the shadow-boundary search.
    The tuple fields hold the fixed values iterated in addition to the
    axis; the field matching ``axis`` is ignored.
    """

    preset: str
    quantity: str          # pair | detector | shadow
    axis: str              # mass | gap | distance
    scale: str             # log | linear
    lo: float
    hi: float
    points: int
    families: tuple[str, ...] = ("btz", "geon")
    masses: tuple[float, ...] = (1.0,)
    gaps: tuple[float, ...] = (0.1,)
    dist_a: float = 1.0
    sep: float = 0.5
    ads_length: float = 10.0
    zeta: int = 1

    def __post_init__(self):
        if self.quantity not in ("pair", "detector", "shadow"):
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.axis not in ("mass", "gap", "distance"):
            raise ValueError(f"unknown axis {self.axis!r}")
        if self.scale not in ("log", "linear"):
            raise ValueError(f"unknown scale {self.scale!r}")
        if not 2 <= self.points <= 10000:
            raise ValueError("points must lie in [2, 10000]")
        if self.scale == "log" and not (self.lo > 0 and self.hi > 0):
            raise ValueError("log grids require positive bounds")
        if not self.hi > self.lo:
            raise ValueError("grid upper bound must exceed lower bound")
        for fam in self.families:
            Family.parse(fam)

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def columns(self) -> tuple[str, ...]:
        return SHADOW_COLUMNS if self.quantity == "shadow" else PAIR_COLUMNS


PRESETS: dict[str, SweepSpec] = {
    # transition probability against horizon distance, two masses, three gaps
    "fig2": SweepSpec("fig2", "detector", "distance", "log", 0.05, 10.0, 30,
                      masses=(1.0, 0.01), gaps=(0.01, 0.1, 1.0)),
    # |X| against mass at fixed placement
    "fig3": SweepSpec("fig3", "pair", "mass", "log", 1e-4, 10.0, 33,
                      gaps=(0.1,), dist_a=1.0, sep=0.5),
    # concurrence against mass for three gaps
    "fig4": SweepSpec("fig4", "pair", "mass", "log", 1e-4, 10.0, 33,
                      gaps=(0.01, 0.1, 1.0), dist_a=1.0, sep=0.5),
    # concurrence against gap for three masses (crossover lives here)
    "fig5": SweepSpec("fig5", "pair", "gap", "linear", 0.01, 2.0, 40,
                      masses=(1.0, 0.1, 0.01), dist_a=1.0, sep=0.5),
    # concurrence against horizon distance at small mass
    "fig6": SweepSpec("fig6", "pair", "distance", "log", 0.05, 10.0, 30,
                      masses=(0.01,), gaps=(0.01, 0.1, 1.0), sep=0.5),
    # shadow boundary against mass
    "fig7": SweepSpec("fig7", "shadow", "mass", "log", 1e-3, 2.0, 13,
                      gaps=(0.01,), sep=0.5),
}


def preset_spec(name: str, **overrides) -> SweepSpec:
    """A preset spec with any field overridden (points, gaps, bounds, ...)."""
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(base, **overrides)


def _tasks(spec: SweepSpec) -> list[dict]:
    """Expand the spec into per-row tasks in the canonical order."""
    masses = (None,) if spec.axis == "mass" else spec.masses
    gaps = (None,) if spec.axis == "gap" else spec.gaps
    axis_values = [float(v) for v in spec.grid()]
    tasks = []
    for mass, gap in product(masses, gaps):
        for value in axis_values:
            for family in spec.families:
                task = {
                    "preset": spec.preset,
                    "quantity": spec.quantity,
                    "family": Family.parse(family).value,
                    "mass": value if spec.axis == "mass" else mass,
                    "gap": value if spec.axis == "gap" else gap,
                    "dist_a": value if spec.axis == "distance" else spec.dist_a,
                    "sep": spec.sep,
                    "ads_length": spec.ads_length,
                    "zeta": spec.zeta,
                }
                tasks.append(task)
    return tasks


def _evaluate_task(task: dict) -> dict:
    """Worker entry point; never raises, failures land in the error column."""
    row = {
        "preset": task["preset"],
        "family": task["family"],
        "mass": task["mass"],
        "ads_length": task["ads_length"],
        "zeta": task["zeta"],
        "gap": task["gap"],
        "dist_a": task["dist_a"],
        "sep": task["sep"],
        "error": "",
    }
    quad = QuadratureSpec()
    series = SeriesControl()
    try:
        params = SpacetimeParams(task["mass"], task["ads_length"], task["zeta"],
                                 Family.parse(task["family"]))
        if task["quantity"] == "detector":
            det = detector_at_distance(params, task["dist_a"], task["gap"])
            p = transition_probability(det, params, quad, series)
            row.update(p_a=p.value, err_p_a=p.err, n_max=p.n_terms,
                       sep="", p_b="", x_abs="", concurrence="",
                       err_p_b="", err_x_abs="", err_concurrence="")
        elif task["quantity"] == "pair":
            pair = pair_at_distances(params, task["dist_a"], task["sep"], task["gap"])
            res = harvest(pair, params, quad, series)
            row.update(res.as_dict())
            row.pop("x_real", None)
            row.pop("x_imag", None)
        else:  # shadow
            query = ShadowQuery(params, task["sep"], task["gap"])
            res = d_death(query, quad, series)
            row.pop("dist_a", None)
            row.update(
                status=res.status,
                d_death=res.d_death if res.d_death is not None else "",
                bracket_lo=res.bracket[0] if res.bracket else "",
                bracket_hi=res.bracket[1] if res.bracket else "",
            )
    except Exception as exc:  # per-point isolation is the contract
        row["error"] = f"{type(exc).__name__}: {exc}"
        for col in ("p_a", "p_b", "x_abs", "concurrence", "err_p_a", "err_p_b",
                    "err_x_abs", "err_concurrence", "n_max", "d_death", "status",
                    "bracket_lo", "bracket_hi"):
            row.setdefault(col, "")
    return row


def sweep_rows(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Evaluate all grid points, in deterministic order regardless of pool size."""
    tasks = _tasks(spec)
    if workers <= 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=1))


def _format_value(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.11e}"


def write_csv(path, rows: list[dict], spec: SweepSpec, extra_metadata: dict | None = None) -> None:
    """Write rows under a ``#`` metadata block; byte-stable for a given spec."""
    columns = spec.columns()
    meta = {
        "tool": f"geonharvest {__version__}",
        "preset": spec.preset,
        "quantity": spec.quantity,
        "axis": f"{spec.axis} ({spec.scale}) in [{spec.lo:g}, {spec.hi:g}], {spec.points} points",
        "families": ",".join(spec.families),
        "masses": ",".join(f"{m:g}" for m in spec.masses),
        "gaps": ",".join(f"{g:g}" for g in spec.gaps),
        "dist_a": f"{spec.dist_a:g}",
        "sep": f"{spec.sep:g}",
        "ads_length": f"{spec.ads_length:g}",
        "zeta": str(spec.zeta),
        "quadrature": f"rel_tol={QuadratureSpec().rel_tol:g} abs_tol={QuadratureSpec().abs_tol:g}",
        "series": f"rel_term_tol={SeriesControl().rel_term_tol:g}",
        "ordering": "fixed parameters (mass, gap), then axis grid, then family",
        "units": "lengths and times in switching widths; observables per squared coupling",
    }
    if extra_metadata:
        meta.update(extra_metadata)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(row.get(col, "")) for col in columns) + "\n")
