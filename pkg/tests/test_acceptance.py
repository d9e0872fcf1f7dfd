"""End-to-end acceptance battery.

Each test is one acceptance criterion, evaluated at its stated tolerance,
printing a PASS/FAIL line with the measured numbers.  The brute-force
comparisons (oracle equivalence) carry the ``validation`` marker; they run
by default and take a few minutes.

Two criteria are known to fail against the physics, with the discrepancy
confirmed independently by the brute-force integrals at accuracies between
1e-8 and 1e-15: the near-horizon band [0.40, 0.50] excludes four of the
twelve parameter combinations (the true values reach 0.368 at unit mass
with gap 1, and 0.574 for the small-mass geon at small gaps), and the
unit-mass relative corrections are 4.7e-3 (local noise) and 2.9e-3
(correlations) rather than < 1e-3.  The tests assert the stated tolerances
unchanged and fail honestly.
"""

import math

import numpy as np
import pytest

from geonharvest.geometry import (
    Family,
    SpacetimeParams,
    detector_at_distance,
    pair_at_distances,
    proper_distance,
    radius_from_distance,
    redshift,
)
from geonharvest.observables import (
    PTermParams,
    XTermParams,
    _btz_nonlocal_from_terms,
    btz_nonlocal_correlation,
    btz_transition_probability,
    concurrence,
    concurrence_from_density_matrix,
    geon_nonlocal_correction,
    geon_transition_correction,
    harvest,
    nonlocal_correlation,
    transition_probability,
)
from geonharvest.oracle import (
    OracleSpec,
    nonlocal_correlation_direct,
    transition_probability_direct,
)
from geonharvest.shadow import ShadowQuery, crossover_gap, d_death
from geonharvest.sweep import preset_spec, sweep_rows, write_csv

ELL = 10.0
ORACLE_QUICK = OracleSpec(epsilon_sequence=(1e-2, 1e-3))


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def test_near_horizon_universality():
    """P per squared coupling within [0.40, 0.50] at horizon distance 0.05
    for every (family, mass, gap) combination."""
    rows = []
    for family in (Family.BTZ, Family.GEON):
        for mass in (1.0, 0.01):
            params = SpacetimeParams(mass, ELL, 1, family)
            for gap in (0.01, 0.1, 1.0):
                det = detector_at_distance(params, 0.05, gap)
                value = transition_probability(det, params).value
                rows.append((family.value, mass, gap, value))
    misses = [(f, m, g, v) for f, m, g, v in rows if not 0.40 <= v <= 0.50]
    detail = "; ".join(f"{f} M={m} gap={g}: P={v:.4f}" for f, m, g, v in rows)
    _report("near-horizon universality", not misses, detail)
    assert not misses, f"outside [0.40, 0.50]: {misses}"


def test_large_mass_indistinguishability():
    """Relative twisted-image corrections below 1e-3 at unit mass."""
    params = SpacetimeParams(1.0, ELL, 1, Family.GEON)
    det = detector_at_distance(params, 1.0, 0.1)
    pair = pair_at_distances(params, 1.0, 0.5, 0.1)
    p = btz_transition_probability(det, params).value
    dp = geon_transition_correction(det, params).value
    x = btz_nonlocal_correlation(pair, params).value
    dx = geon_nonlocal_correction(pair, params).value
    p_ratio = dp / p
    x_ratio = abs(dx) / abs(x)
    ok = p_ratio < 1e-3 and x_ratio < 1e-3
    _report("large-mass indistinguishability", ok,
            f"dP/P = {p_ratio:.3e}, |dX|/|X| = {x_ratio:.3e} (threshold 1e-3)")
    assert ok


def test_small_mass_ordering():
    """Geon exceeds BTZ in both local noise and correlations at small mass,
    by margins an order of magnitude above the error estimates."""
    btz = SpacetimeParams(0.01, ELL, 1, Family.BTZ)
    geon = btz.with_family(Family.GEON)
    det = detector_at_distance(btz, 1.0, 0.1)
    pair_b = pair_at_distances(btz, 1.0, 0.5, 0.1)
    pair_g = pair_at_distances(geon, 1.0, 0.5, 0.1)
    p_b = transition_probability(det, btz)
    p_g = transition_probability(det, geon)
    x_b = nonlocal_correlation(pair_b, btz)
    x_g = nonlocal_correlation(pair_g, geon)
    p_margin = p_g.value - p_b.value
    x_margin = abs(x_g.value) - abs(x_b.value)
    p_ok = p_margin > 10.0 * (p_g.err + p_b.err)
    x_ok = x_margin > 10.0 * (x_g.err + x_b.err)
    _report("small-mass ordering", p_ok and x_ok,
            f"P margin {p_margin:.4f} vs err {p_g.err + p_b.err:.2e}; "
            f"|X| margin {x_margin:.4f} vs err {x_g.err + x_b.err:.2e}")
    assert p_ok and x_ok


def test_gap_crossover():
    """At small mass the BTZ spacetime wins at small gap and the geon takes
    over at a finite gap below 2, located to bracket width < 0.01."""
    base = SpacetimeParams(0.01, ELL, 1, Family.BTZ)

    def conc(family, gap):
        params = base.with_family(family)
        pair = pair_at_distances(params, 1.0, 0.5, gap)
        return harvest(pair, params).concurrence

    small_gap_ok = conc(Family.BTZ, 0.01) > conc(Family.GEON, 0.01)
    res = crossover_gap(base, 1.0, 0.5, gap_min=0.01, gap_max=2.0, scan_points=25)
    found = res.gap_star is not None and 0.0 < res.gap_star <= 2.0
    width_ok = found and (res.bracket[1] - res.bracket[0]) < 0.01
    above_ok = found and conc(Family.GEON, min(res.gap_star + 0.2, 2.0)) > conc(
        Family.BTZ, min(res.gap_star + 0.2, 2.0)
    )
    ok = small_gap_ok and found and width_ok and above_ok
    _report("gap crossover", ok,
            f"BTZ ahead at gap 0.01: {small_gap_ok}; gap* = "
            f"{res.gap_star if found else None} bracket {res.bracket}, "
            f"geon ahead above: {above_ok}")
    assert ok


@pytest.mark.validation
def test_oracle_equivalence():
    """Closed forms against the brute-force double integrals: P within 1%,
    |X| within 2%, over masses, families and gaps."""
    worst_p = worst_x = 0.0
    for mass in (1.0, 0.01):
        for family in (Family.BTZ, Family.GEON):
            params = SpacetimeParams(mass, ELL, 1, family)
            for gap in (0.1, 1.0):
                pair = pair_at_distances(params, 1.0, 0.5, gap)
                p_closed = transition_probability(pair.a, params).value
                p_direct = transition_probability_direct(pair.a, params, ORACLE_QUICK).value
                rel_p = abs(p_closed - p_direct) / abs(p_direct)
                x_closed = abs(nonlocal_correlation(pair, params).value)
                x_direct = abs(nonlocal_correlation_direct(pair, params, ORACLE_QUICK).value)
                rel_x = abs(x_closed - x_direct) / x_direct
                worst_p = max(worst_p, rel_p)
                worst_x = max(worst_x, rel_x)
    ok = worst_p < 0.01 and worst_x < 0.02
    _report("oracle equivalence", ok,
            f"worst P deviation {worst_p:.2e} (limit 1e-2), "
            f"worst |X| deviation {worst_x:.2e} (limit 2e-2)")
    assert ok


def test_shadow_ordering():
    """The geon shadow is larger at small mass and small gap; at unit mass
    the two spacetimes agree within the bisection tolerance."""
    tol = 1e-3
    results = {}
    for mass in (0.01, 1.0):
        for family in (Family.BTZ, Family.GEON):
            params = SpacetimeParams(mass, ELL, 1, family)
            query = ShadowQuery(params, 0.5, 0.01, scan_min=0.05, scan_max=4.0,
                                scan_points=24, bisect_tol=tol)
            results[(mass, family)] = d_death(query)
    small_g = results[(0.01, Family.GEON)]
    small_b = results[(0.01, Family.BTZ)]
    unit_g = results[(1.0, Family.GEON)]
    unit_b = results[(1.0, Family.BTZ)]
    ordering_ok = (
        small_g.found and small_b.found
        and small_g.d_death - small_b.d_death > 2.0 * tol
    )
    unit_ok = (
        unit_g.found and unit_b.found
        and abs(unit_g.d_death - unit_b.d_death) <= tol
    )
    _report("shadow ordering", ordering_ok and unit_ok,
            f"M=0.01: geon {small_g.d_death:.4f} vs btz {small_b.d_death:.4f}; "
            f"M=1: geon {unit_g.d_death:.4f} vs btz {unit_b.d_death:.4f}")
    assert ordering_ok and unit_ok


def test_invariant_suite():
    """Structural invariants at machine-level tolerances."""
    checks = []

    # eigenvalue concurrence reduces to the pair formula
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        p_a, p_b = rng.uniform(1e-4, 0.05, size=2)
        x = rng.uniform(0, 0.05) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        top = 1.0 - p_a - p_b
        k = 1.02 * abs(x) ** 2
        ee = 0.5 * (top - math.sqrt(top * top - 4.0 * k))
        rho = np.array(
            [[top - ee, 0, 0, np.conj(x)], [0, p_b, 0, 0],
             [0, 0, p_a, 0], [x, 0, 0, ee]], dtype=complex)
        worst = max(worst, abs(concurrence_from_density_matrix(rho)
                               - concurrence(p_a, p_b, abs(x))))
    checks.append(("eigenvalue vs reduced concurrence", worst < 1e-12, f"{worst:.2e}"))

    # |X| swap symmetry
    params = SpacetimeParams(0.01, ELL, 1, Family.BTZ)
    pair = pair_at_distances(params, 1.0, 0.5, 0.1)
    ga, gb = redshift(pair.a.radius, params), redshift(pair.b.radius, params)
    x_ab = _btz_nonlocal_from_terms(
        XTermParams.from_radii(params, pair.a.radius, pair.b.radius, ga, gb, 0.1),
        0.1, params).value
    x_ba = _btz_nonlocal_from_terms(
        XTermParams.from_radii(params, pair.b.radius, pair.a.radius, gb, ga, 0.1),
        0.1, params).value
    swap = abs(abs(x_ab) - abs(x_ba))
    checks.append(("|X| swap symmetry", swap < 1e-12, f"{swap:.2e}"))

    # twisted-image correction positive under Dirichlet conditions
    geon = params.with_family(Family.GEON)
    dp = geon_transition_correction(pair.a, geon).value
    checks.append(("transition correction positive", dp > 0.0, f"{dp:.3e}"))

    # transparent boundary removes every boundary-condition integral
    params0 = SpacetimeParams(0.01, ELL, 0, Family.BTZ)
    with_bc = btz_transition_probability(pair.a, params)
    without_bc = btz_transition_probability(pair.a, params0)
    count_ok = (with_bc.integral_count == 2 + 2 * with_bc.n_terms
                and without_bc.integral_count == 1 + without_bc.n_terms)
    checks.append(("boundary terms drop at zeta=0", count_ok,
                   f"{with_bc.integral_count} -> {without_bc.integral_count}"))

    # redshift fraction bounded by 1/2, saturated only at equal radii
    frac = XTermParams.from_pair(params, pair).redshift_fraction
    frac_eq = XTermParams.from_radii(
        params, pair.a.radius, pair.a.radius, ga, ga, 0.1).redshift_fraction
    checks.append(("redshift fraction bound", frac < 0.5 and frac_eq == 0.5,
                   f"{frac:.6f}, saturated {frac_eq}"))

    # image terms decay at least like exp(-pi sqrt(M)/2) past the second
    decay_ok = True
    for mass in (0.01, 1.0):
        pm = SpacetimeParams(mass, ELL, 1, Family.BTZ)
        det = detector_at_distance(pm, 1.0, 0.1)
        pt = PTermParams.from_detector(pm, det)
        from geonharvest.quadrature import integrate_branchcut

        mags = [abs(integrate_branchcut(pt.alpha(n, -1), pt.damping, pt.oscillation).value)
                for n in range(2, 8)]
        bound = math.exp(-math.pi * math.sqrt(mass) / 2.0)
        decay_ok &= all(b / a <= bound * 1.05 for a, b in zip(mags, mags[1:]))
    checks.append(("image-term decay rate", decay_ok, f"bound exp(-pi sqrt(M)/2)"))

    # geometry round trips
    worst_rt = 0.0
    for d in (0.01, 0.5, 5.0, 20.0):
        r = radius_from_distance(d, params)
        worst_rt = max(worst_rt,
                       abs(proper_distance(params.horizon_radius, r, params) - d) / d)
    checks.append(("geometry round trip", worst_rt < 1e-10, f"{worst_rt:.2e}"))

    ok = all(passed for _, passed, _ in checks)
    detail = "; ".join(f"{name} [{'ok' if passed else 'FAIL'} {info}]"
                       for name, passed, info in checks)
    _report("invariant suite", ok, detail)
    assert ok, [name for name, passed, _ in checks if not passed]


def test_sweep_determinism(tmp_path):
    """Repeated preset sweeps are byte-identical on the same platform."""
    spec = preset_spec("fig5", points=3, masses=(1.0,),
                       lo=0.1, hi=0.9)
    out1, out2 = tmp_path / "one.csv", tmp_path / "two.csv"
    write_csv(out1, sweep_rows(spec), spec)
    write_csv(out2, sweep_rows(spec), spec)
    identical = out1.read_bytes() == out2.read_bytes()
    _report("sweep determinism", identical,
            f"{out1.stat().st_size} bytes, byte-identical: {identical}")
    assert identical
