"""Command-line front end: single-point evaluation, parameter sweeps,
shadow-boundary searches and oracle validation.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

from . import __version__
from .geometry import Family, SpacetimeParams, pair_at_distances, redshift
from .observables import SeriesControl, harvest, transition_probability
from .oracle import OracleSpec, nonlocal_correlation_direct, transition_probability_direct
from .quadrature import QuadratureSpec
from .shadow import ShadowQuery, crossover_gap, d_death
from .sweep import PRESETS, SweepSpec, preset_spec, sweep_rows, write_csv

USAGE_EXIT = 1
NUMERICAL_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _read_config(path: str) -> dict:
    """Flat KEY=VALUE file mirroring the long flag names; '#' comments."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected KEY=VALUE, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, config: dict, name: str, default, cast):
    """Flag beats config file beats default."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in config:
        return cast(config[name])
    return default


def _common_physics_flags(p: argparse.ArgumentParser, pair: bool = True):
    p.add_argument("--mass", type=float, help="black hole mass M (default 1)")
    p.add_argument("--ads-length", type=float, help="AdS length in switching widths (default 10)")
    p.add_argument("--zeta", type=int, choices=(-1, 0, 1), help="boundary condition (default 1)")
    p.add_argument("--gap", type=float, help="energy gap in inverse switching widths (default 0.1)")
    if pair:
        p.add_argument("--dist-a", type=float,
                       help="proper distance of detector A from the horizon (default 1)")
        p.add_argument("--sep", type=float, help="proper A-B separation (default 0.5)")
    p.add_argument("--config", help="flat KEY=VALUE file; flags override its entries")


def _build_parser() -> _Parser:
    parser = _Parser(prog="geonharvest",
                     description="Harvesting observables outside BTZ black holes and geons")
    parser.add_argument("--version", action="version", version=f"geonharvest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one detector-pair configuration")
    p_eval.add_argument("--family", choices=("btz", "geon"), help="spacetime family (default btz)")
    _common_physics_flags(p_eval)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS) + ["custom"], default="custom")
    p_sweep.add_argument("--quantity", choices=("pair", "detector", "shadow"))
    p_sweep.add_argument("--axis", choices=("mass", "gap", "distance"))
    p_sweep.add_argument("--scale", choices=("log", "linear"))
    p_sweep.add_argument("--min", dest="lo", type=float, help="axis lower bound")
    p_sweep.add_argument("--max", dest="hi", type=float, help="axis upper bound")
    p_sweep.add_argument("--points", type=int, help="axis point count")
    p_sweep.add_argument("--families", help="comma list, e.g. btz,geon")
    p_sweep.add_argument("--masses", help="comma list of fixed masses")
    p_sweep.add_argument("--gaps", help="comma list of fixed gaps")
    p_sweep.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--timing", action="store_true",
                         help="report total wall time on stderr (kept out of the CSV "
                              "so repeated runs stay byte-identical)")
    _common_physics_flags(p_sweep)

    p_shadow = sub.add_parser("shadow", help="shadow boundary and optional crossover gap")
    p_shadow.add_argument("--family", choices=("btz", "geon", "both"), default="both")
    p_shadow.add_argument("--scan-min", type=float)
    p_shadow.add_argument("--scan-max", type=float)
    p_shadow.add_argument("--scan-points", type=int)
    p_shadow.add_argument("--bisect-tol", type=float)
    p_shadow.add_argument("--crossover", action="store_true",
                          help="also locate the gap where the geon overtakes BTZ")
    p_shadow.add_argument("--mass-sweep", action="store_true",
                          help="emit a d_death-vs-mass CSV instead of JSON")
    p_shadow.add_argument("--mass-min", type=float, default=1e-3)
    p_shadow.add_argument("--mass-max", type=float, default=2.0)
    p_shadow.add_argument("--points", type=int, default=13)
    p_shadow.add_argument("--workers", type=int, default=1)
    p_shadow.add_argument("--out", help="CSV path (mass-sweep mode)")
    _common_physics_flags(p_shadow)

    p_val = sub.add_parser("validate", help="oracle-equivalence and invariant checks")
    p_val.add_argument("--tier", choices=("quick", "full"), default="quick")
    return parser


def _params_from(args, config, family_default="btz") -> tuple[SpacetimeParams, dict]:
    mass = _resolve(args, config, "mass", 1.0, float)
    ell = _resolve(args, config, "ads_length", 10.0, float)
    zeta = _resolve(args, config, "zeta", 1, int)
    family = _resolve(args, config, "family", family_default, str)
    resolved = {
        "mass": mass,
        "ads_length": ell,
        "zeta": zeta,
        "family": family,
        "gap": _resolve(args, config, "gap", 0.1, float),
        "dist_a": _resolve(args, config, "dist_a", 1.0, float),
        "sep": _resolve(args, config, "sep", 0.5, float),
    }
    # "both" is a shadow-command pseudo-family; the handler re-tags per family
    concrete = "btz" if family == "both" else family
    params = SpacetimeParams(mass, ell, zeta, Family.parse(concrete))
    return params, resolved


def _cmd_eval(args) -> int:
    config = _read_config(args.config) if args.config else {}
    params, resolved = _params_from(args, config)
    pair = pair_at_distances(params, resolved["dist_a"], resolved["sep"], resolved["gap"])
    result = harvest(pair, params)
    payload = dict(resolved)
    payload.update(result.as_dict())
    canonical = json.dumps(resolved, sort_keys=True).encode()
    payload["provenance"] = {
        "version": __version__,
        "param_hash": hashlib.sha256(canonical).hexdigest()[:16],
        "quadrature_rel_tol": QuadratureSpec().rel_tol,
        "series_rel_term_tol": SeriesControl().rel_term_tol,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_sweep(args) -> int:
    config = _read_config(args.config) if args.config else {}

    def listarg(name, cast):
        raw = _resolve(args, config, name, None, str)
        if raw is None:
            return None
        if isinstance(raw, str):
            return tuple(cast(v) for v in raw.split(",") if v)
        return raw

    overrides = dict(
        lo=_resolve(args, config, "lo", None, float),
        hi=_resolve(args, config, "hi", None, float),
        points=_resolve(args, config, "points", None, int),
        families=listarg("families", str),
        masses=listarg("masses", float),
        gaps=listarg("gaps", float),
        dist_a=_resolve(args, config, "dist_a", None, float),
        sep=_resolve(args, config, "sep", None, float),
        ads_length=_resolve(args, config, "ads_length", None, float),
        zeta=_resolve(args, config, "zeta", None, int),
    )
    if args.preset == "custom":
        required = {"quantity": args.quantity, "axis": args.axis, "scale": args.scale,
                    "min": overrides["lo"], "max": overrides["hi"],
                    "points": overrides["points"]}
        missing = [k for k, v in required.items() if v is None]
        if missing:
            print(f"geonharvest sweep: error: custom sweeps need --{', --'.join(missing)}",
                  file=sys.stderr)
            return USAGE_EXIT
        gap = _resolve(args, config, "gap", None, float)
        if gap is not None and overrides["gaps"] is None:
            overrides["gaps"] = (gap,)
    try:
        if args.preset != "custom":
            spec = preset_spec(args.preset, **overrides)
        else:
            spec = SweepSpec(preset="custom", quantity=args.quantity, axis=args.axis,
                             scale=args.scale, lo=overrides["lo"], hi=overrides["hi"],
                             points=overrides["points"],
                             **{k: v for k, v in overrides.items()
                                if k not in ("lo", "hi", "points") and v is not None})
    except ValueError as exc:
        print(f"geonharvest sweep: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    started = time.monotonic()
    rows = sweep_rows(spec, workers=max(1, args.workers))
    write_csv(args.out, rows, spec)
    failures = sum(1 for r in rows if r.get("error"))
    if args.timing:
        print(f"sweep wall time: {time.monotonic() - started:.1f} s", file=sys.stderr)
    if failures:
        print(f"{failures}/{len(rows)} grid points failed; see the error column",
              file=sys.stderr)
    return 0


def _cmd_shadow(args) -> int:
    config = _read_config(args.config) if args.config else {}
    params, resolved = _params_from(args, config, family_default="both")
    families = ("btz", "geon") if resolved["family"] == "both" else (resolved["family"],)

    if args.mass_sweep:
        if not args.out:
            print("geonharvest shadow: error: --mass-sweep requires --out", file=sys.stderr)
            return USAGE_EXIT
        spec = preset_spec(
            "fig7", lo=args.mass_min, hi=args.mass_max, points=args.points,
            gaps=(resolved["gap"],), sep=resolved["sep"],
            ads_length=resolved["ads_length"], zeta=resolved["zeta"],
            families=families,
        )
        rows = sweep_rows(spec, workers=max(1, args.workers))
        write_csv(args.out, rows, spec)
        return 0

    query_kwargs = {}
    for name, cast in (("scan_min", float), ("scan_max", float),
                       ("scan_points", int), ("bisect_tol", float)):
        value = _resolve(args, config, name, None, cast)
        if value is not None:
            query_kwargs[name] = value
    payload = {"mass": resolved["mass"], "gap": resolved["gap"], "sep": resolved["sep"],
               "ads_length": resolved["ads_length"], "zeta": resolved["zeta"],
               "bisect_tol": query_kwargs.get("bisect_tol", ShadowQuery.bisect_tol),
               "results": {}}
    for family in families:
        fam_params = params.with_family(family)
        res = d_death(ShadowQuery(fam_params, resolved["sep"], resolved["gap"], **query_kwargs))
        payload["results"][family] = {
            "status": res.status,
            "d_death": res.d_death,
            "bracket": list(res.bracket) if res.bracket else None,
        }
    if args.crossover:
        cross = crossover_gap(params, resolved["dist_a"], resolved["sep"])
        payload["crossover"] = {
            "gap_star": cross.gap_star,
            "bracket": list(cross.bracket) if cross.bracket else None,
            "crossings": cross.crossings,
        }
    print(json.dumps(payload, indent=2))
    return 0


def _validate_checks(tier: str):
    """Yield (name, passed, detail) for the requested tier."""
    quad = QuadratureSpec()
    series = SeriesControl()

    # invariant suite (fast)
    from .geometry import proper_distance, radius_from_distance
    p = SpacetimeParams(0.01, 10.0)
    r = radius_from_distance(1.0, p)
    round_trip = abs(proper_distance(p.horizon_radius, r, p) - 1.0)
    yield "geometry round trip", round_trip < 1e-10, f"|d - 1| = {round_trip:.2e}"

    params = SpacetimeParams(0.01, 10.0, 1, Family.BTZ)
    pair = pair_at_distances(params, 1.0, 0.5, 0.1)
    from .observables import (
        XTermParams,
        _btz_nonlocal_from_terms,
        geon_transition_correction,
    )
    ga, gb = redshift(pair.a.radius, params), redshift(pair.b.radius, params)
    xt_ab = XTermParams.from_radii(params, pair.a.radius, pair.b.radius, ga, gb, 0.1)
    xt_ba = XTermParams.from_radii(params, pair.b.radius, pair.a.radius, gb, ga, 0.1)
    x_ab = _btz_nonlocal_from_terms(xt_ab, 0.1, params, quad, series).value
    x_ba = _btz_nonlocal_from_terms(xt_ba, 0.1, params, quad, series).value
    swap_dev = abs(abs(x_ab) - abs(x_ba))
    yield "|X| swap symmetry", swap_dev < 1e-12, f"deviation {swap_dev:.2e}"

    dp = geon_transition_correction(pair.a, params, quad, series).value
    yield "geon transition correction positive", dp > 0.0, f"value {dp:.3e}"

    grid = {"quick": [(1.0, "btz", 0.1), (0.01, "btz", 0.1)],
            "full": [(m, f, g) for m in (1.0, 0.01) for f in ("btz", "geon")
                     for g in (0.1, 1.0)]}[tier]
    oracle_spec = OracleSpec(epsilon_sequence=(1e-2, 1e-3)) if tier == "quick" else OracleSpec()
    x_grid = grid if tier == "quick" else [(m, f, 0.1) for m in (1.0, 0.01)
                                           for f in ("btz", "geon")]
    for mass, family, gap in grid:
        pr = SpacetimeParams(mass, 10.0, 1, Family.parse(family))
        pa = pair_at_distances(pr, 1.0, 0.5, gap)
        closed = transition_probability(pa.a, pr, quad, series).value
        direct = transition_probability_direct(pa.a, pr, oracle_spec).value
        rel = abs(closed - direct) / abs(direct)
        yield (f"P vs oracle (M={mass}, {family}, gap={gap})", rel < 0.01,
               f"rel dev {rel:.2e}")
    for mass, family, gap in x_grid:
        pr = SpacetimeParams(mass, 10.0, 1, Family.parse(family))
        pa = pair_at_distances(pr, 1.0, 0.5, gap)
        closed = abs(harvest(pa, pr, quad, series).x_value)
        direct = abs(nonlocal_correlation_direct(pa, pr, oracle_spec).value)
        rel = abs(closed - direct) / direct
        yield (f"|X| vs oracle (M={mass}, {family}, gap={gap})", rel < 0.02,
               f"rel dev {rel:.2e}")


def _cmd_validate(args) -> int:
    failures = 0
    print(f"validation tier: {args.tier}")
    for name, passed, detail in _validate_checks(args.tier):
        status = "PASS" if passed else "FAIL"
        if not passed:
            failures += 1
        print(f"  [{status}] {name}: {detail}")
    if failures:
        print(f"{failures} check(s) failed")
        return NUMERICAL_EXIT
    print("all checks passed")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"eval": _cmd_eval, "sweep": _cmd_sweep,
                "shadow": _cmd_shadow, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except SystemExit:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"geonharvest: numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT
    except OSError as exc:
        print(f"geonharvest: error: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
