import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geonharvest.geometry import (
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


def test_horizon_radius_reference_values():
    assert horizon_radius(1.0, 10.0) == pytest.approx(10.0, abs=0)
    assert horizon_radius(0.01, 10.0) == pytest.approx(1.0, rel=1e-15)
    assert horizon_radius(1.0, 1.0) == 1.0


def test_horizon_radius_rejects_nonpositive():
    with pytest.raises(ValueError):
        horizon_radius(0.0, 10.0)
    with pytest.raises(ValueError):
        horizon_radius(1.0, -1.0)


@given(mass=st.floats(1e-6, 1e3), ell=st.floats(1e-3, 1e3))
def test_horizon_radius_scaling(mass, ell):
    # linear in ell, sqrt in mass: quadrupling the mass doubles the horizon
    assert horizon_radius(4.0 * mass, ell) == pytest.approx(2.0 * horizon_radius(mass, ell), rel=1e-14)
    assert horizon_radius(mass, 2.0 * ell) == pytest.approx(2.0 * horizon_radius(mass, ell), rel=1e-14)


def test_redshift_direct_formula():
    p = SpacetimeParams(0.01, 10.0)  # r_h = 1
    assert redshift(2.0, p) == pytest.approx(math.sqrt(3.0) / 10.0, rel=1e-14)


def test_redshift_vanishes_at_horizon():
    p = SpacetimeParams(0.01, 10.0)
    assert redshift(1.0 + 1e-12, p) < 2e-6
    with pytest.raises(ValueError):
        redshift(1.0, p)
    with pytest.raises(ValueError):
        redshift(0.5, p)


def test_redshift_asymptote():
    p = SpacetimeParams(1.0, 10.0)
    r = 1e4 * p.horizon_radius * 1.5
    assert redshift(r, p) == pytest.approx(r / p.ads_length, rel=1e-6)


def test_redshift_matches_distance_inverse():
    p = SpacetimeParams(0.01, 10.0)
    r = radius_from_distance(1.0, p)
    d_back = proper_distance(p.horizon_radius, r, p)
    assert d_back == pytest.approx(1.0, abs=1e-12)


def test_proper_distance_coincidence_and_closed_form():
    p = SpacetimeParams(1.0, 1.0)  # r_h = 1, ell = 1
    assert proper_distance(2.0, 2.0, p) == 0.0
    r = p.horizon_radius * math.cosh(1.0)
    assert proper_distance(p.horizon_radius, r, p) == pytest.approx(1.0, rel=1e-12)


def test_proper_distance_additivity():
    p = SpacetimeParams(0.01, 10.0)  # r_h = 1
    d12 = proper_distance(1.5, 2.0, p)
    d23 = proper_distance(2.0, 3.0, p)
    d13 = proper_distance(1.5, 3.0, p)
    assert d12 + d23 == pytest.approx(d13, abs=1e-12)


def test_proper_distance_ordering_errors():
    p = SpacetimeParams(0.01, 10.0)
    with pytest.raises(ValueError):
        proper_distance(2.0, 1.5, p)
    with pytest.raises(ValueError):
        proper_distance(0.5, 2.0, p)


@given(
    r_b=st.floats(1.6, 50.0),
    bump=st.floats(0.01, 5.0),
)
def test_proper_distance_monotonicity(r_b, bump):
    p = SpacetimeParams(0.01, 10.0)
    r_a = 1.5
    assert proper_distance(r_a, r_b + bump, p) > proper_distance(r_a, r_b, p)
    if r_a + bump < r_b:
        assert proper_distance(r_a + bump, r_b, p) < proper_distance(r_a, r_b, p)


def test_radius_from_distance_examples():
    p = SpacetimeParams(0.01, 10.0)
    assert radius_from_distance(0.0, p) == p.horizon_radius
    assert radius_from_distance(1.0, p) == pytest.approx(math.cosh(0.1), rel=1e-14)
    with pytest.raises(ValueError):
        radius_from_distance(-0.1, p)


@settings(max_examples=60)
@given(d=st.floats(0.01, 20.0))
def test_distance_round_trip(d):
    p = SpacetimeParams(0.01, 10.0)
    r = radius_from_distance(d, p)
    assert proper_distance(p.horizon_radius, r, p) == pytest.approx(d, rel=1e-10)


def test_spacetime_params_validation():
    with pytest.raises(ValueError):
        SpacetimeParams(-1.0, 10.0)
    with pytest.raises(ValueError):
        SpacetimeParams(1.0, 0.0)
    with pytest.raises(ValueError):
        SpacetimeParams(1.0, 10.0, zeta=2)
    p = SpacetimeParams(1.0, 10.0, family="geon")
    assert p.family is Family.GEON
    assert p.with_family("btz").family is Family.BTZ


def test_family_parse_rejects_unknown():
    with pytest.raises(ValueError):
        Family.parse("kerr")


def test_detector_validation():
    with pytest.raises(ValueError):
        DetectorConfig(radius=-1.0, gap=0.1)
    with pytest.raises(ValueError):
        DetectorConfig(radius=2.0, gap=0.1, switching_width=2.0)
    with pytest.raises(ValueError):
        DetectorConfig(radius=2.0, gap=0.1, angle=7.0)


def test_pair_validation():
    p = SpacetimeParams(0.01, 10.0)
    pair = pair_at_distances(p, 1.0, 0.5, 0.1)
    assert pair.b.radius > pair.a.radius
    assert pair.gap == 0.1
    with pytest.raises(ValueError):
        DetectorPair(pair.b, pair.a)
    with pytest.raises(ValueError):
        DetectorPair(pair.a, DetectorConfig(pair.b.radius, gap=0.2))
    with pytest.raises(ValueError):
        detector_at_distance(p, 0.0, 0.1)


def test_pair_separation_is_additive():
    p = SpacetimeParams(0.01, 10.0)
    pair = pair_at_distances(p, 1.0, 0.5, 0.1)
    sep = proper_distance(pair.a.radius, pair.b.radius, p)
    assert sep == pytest.approx(0.5, abs=1e-12)
