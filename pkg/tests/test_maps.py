from __future__ import annotations

from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from slopelab.errors import AtBreakpoint, DomainMismatch, OutOfDomain
from slopelab.maps import (PiecewiseAffineMap, compose, from_dots, from_limits, identity, iterate,
                           is_constant_slope, map_from_json, map_to_json, refine)
from slopelab.numeric import surd

from strategies import interval_maps, lift_maps, unit

TENT = from_dots("interval", [0, Q(1, 2), 1], [0, 1, 0])


def test_tent_values():
    assert TENT(Q(1, 3)) == Q(2, 3)
    assert TENT(Q(1, 2)) == 1
    assert TENT(1) == 0
    assert is_constant_slope(TENT) == 2


def test_family_lift_values(family):
    F = family.lift
    assert F(0) == -1
    assert F(family.b) == family.c
    assert F(Q(5, 2)) - F(Q(3, 2)) == 1
    assert F(Q(1, 2)) == Q(41, 25)


def test_irrational_slopes_stay_exact():
    lam = surd(Q(1, 2), Q(1, 2), 5)
    f = from_dots("interval", [0, 1 / lam, 1], [0, 1, 2 - lam])
    assert f.slopes == (lam, -lam)
    assert f(1 / lam) == 1
    assert f(1) == 2 - lam


def test_class_c_map_undefined_on_partition():
    f = from_limits("interval", [0, Q(1, 2), 1], [(0, 1), (0, 1)])
    assert f(Q(1, 4)) == Q(1, 2)
    with pytest.raises(AtBreakpoint):
        f(Q(1, 2))
    assert f.left_limit(Q(1, 2)) == 1 and f.right_limit(Q(1, 2)) == 0


def test_interval_map_must_stay_in_unit_interval():
    with pytest.raises(OutOfDomain):
        from_dots("interval", [0, 1], [0, 2])


@pytest.mark.parametrize("bad", [
    dict(kind="interval", breakpoints=(0, Q(1, 2)), slopes=(1,), intercepts=(0,)),
    dict(kind="lift", breakpoints=(0, Q(1, 2)), slopes=(1, 0), intercepts=(0, 0)),
    dict(kind="torus", breakpoints=(0,), slopes=(1,), intercepts=(0,)),
])
def test_malformed_maps_rejected(bad):
    with pytest.raises(ValueError):
        PiecewiseAffineMap(**bad)


def test_compose_kind_mismatch():
    with pytest.raises(DomainMismatch):
        compose(TENT, identity("lift"))


def test_iterate_tent_breakpoints():
    t3 = iterate(TENT, 3)
    assert list(t3.breakpoints) == [Q(k, 8) for k in range(9)]
    assert is_constant_slope(t3) == 8


def test_circle_reduction(family):
    g = family.lift.as_kind("circle")
    assert g(0) == 0
    assert g(Q(1, 2)) == Q(16, 25)


@given(interval_maps(), interval_maps(), unit)
def test_compose_matches_pointwise(f, g, x):
    assert compose(f, g)(x) == g(f(x))


@given(lift_maps(), lift_maps(), st.fractions(min_value=-3, max_value=3, max_denominator=30))
def test_compose_lifts_pointwise(f, g, x):
    h = compose(f, g)
    assert h(x) == g(f(x))
    assert h(x + 1) == h(x) + 1


@given(interval_maps(max_branches=3), st.integers(min_value=1, max_value=3), unit)
def test_iterate_matches_repeated_application(f, n, x):
    y = x
    for _ in range(n):
        y = f(y)
    assert iterate(f, n)(x) == y


@given(interval_maps(), st.lists(unit, max_size=4), unit)
def test_refine_preserves_values(f, pts, x):
    assert refine(f, pts)(x) == f(x)


@given(lift_maps(), st.fractions(min_value=-3, max_value=3, max_denominator=30))
def test_degree_one(f, x):
    assert f(x + 1) == f(x) + 1


@given(interval_maps())
def test_json_round_trip_continuous(f):
    g = map_from_json(map_to_json(f))
    assert g.breakpoints == f.breakpoints and g.slopes == f.slopes and g.intercepts == f.intercepts


def test_json_round_trip_class_c():
    f = from_limits("lift", [0, Q(1, 3)], [(0, Q(1, 2)), (Q(1, 4), Q(3, 2))])
    g = map_from_json(map_to_json(f))
    assert g == f


@given(interval_maps())
def test_displacement_bound_is_max_over_dots(f):
    m = f.displacement_bound()
    for c in f.cells():
        assert abs(c.at(c.lo) - c.lo) <= m
        assert abs(c.at(c.hi) - c.hi) <= m
