from __future__ import annotations

import math
import warnings
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from slopelab.errors import BelowThreshold, DomainMismatch, NotDegreeOne
from slopelab.lifts import (THRESHOLD, Certified, CoversLine, HypothesisFails, Inconclusive,
                            images_cover, make_F_lambda, meets_threshold, merge_open,
                            monotone_laps, project_to_circle, transitivity_check,
                            transport_measure, witnesses_csv)
from slopelab.maps import LazyConjugatedMap, LogisticPoint, from_dots, iterate
from slopelab.measures import eigen_residual, lebesgue
from slopelab.numeric import surd

above = st.fractions(min_value=4, max_value=20, max_denominator=60).filter(meets_threshold)
below = st.fractions(min_value=Q(11, 10), max_value=5, max_denominator=60).filter(
    lambda x: not meets_threshold(x))


def test_family_invariants(family):
    assert family.b == Q(157, 264) and family.c == Q(107, 50)
    assert family.gap() == Q(3599, 6600)
    inv = family.invariants()
    assert all(inv[k] for k in ("constant_slope", "integer_dots", "gap_formula_holds", "gap_nonnegative"))


def test_threshold_gap_vanishes():
    fam = make_F_lambda(THRESHOLD)
    assert fam.gap() == 0


def test_below_threshold_refused_unless_relaxed():
    with pytest.raises(BelowThreshold):
        make_F_lambda(4)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fam = make_F_lambda(4, relaxed=True)
    assert caught and fam.gap() == Q(-1, 8)


def test_threshold_decided_across_fields():
    assert meets_threshold(surd(2, 1, 5))
    assert meets_threshold(surd(3, 1, 6))
    assert not meets_threshold(surd(1, 1, 6))
    assert not meets_threshold(Q(4236, 1000))


def test_certificate_for_reference_parameter(family):
    cert = transitivity_check(family.lift)
    assert isinstance(cert, Certified)
    inc, dec = sorted(cert.witnesses, key=lambda w: not w.increasing)
    assert (inc.lo, inc.hi, inc.x_L, inc.x_R) == (0, Q(157, 264), 0, Q(50, 107))
    assert (dec.lo, dec.hi, dec.x_L, dec.x_R) == (Q(157, 264), 1, 1, Q(107, 157))
    assert cert.pair == (0, Q(50, 107))
    assert witnesses_csv(cert).splitlines()[0] == "lap_lo,lap_hi,increasing,x_L,x_R"


def test_relaxed_four_fails_with_displacement():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fam = make_F_lambda(4, relaxed=True)
    out = transitivity_check(fam.lift)
    assert isinstance(out, HypothesisFails)
    assert out.displacement[1] == Q(7, 8)


def test_transitivity_needs_degree_one():
    with pytest.raises(NotDegreeOne):
        transitivity_check(from_dots("interval", [0, Q(1, 2), 1], [0, 1, 0]))


def test_laps_merge_monotone_cells(family):
    from slopelab.maps import refine
    F = refine(family.lift, [Q(1, 10), Q(9, 10)])
    laps = monotone_laps(F)
    assert [(l.lo, l.hi, l.increasing) for l in laps] == [(0, Q(157, 264), True), (Q(157, 264), 1, False)]


@given(above)
def test_witness_closed_forms(lam):
    F = make_F_lambda(lam).lift
    cert = transitivity_check(F)
    assert isinstance(cert, Certified)
    xs = {(w.increasing, w.x_L, w.x_R) for w in cert.witnesses}
    assert xs == {(True, 0, 2 / (lam - 1)), (False, 1, (lam - 1) / (lam + 1))}
    for w in cert.witnesses:
        assert F(w.x_R) == w.x_R + 1 and F(w.x_L) == w.x_L - 1
    xl, xr = cert.pair
    assert 0 < xr - xl < 1


@given(below)
def test_below_threshold_always_fails(lam):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fam = make_F_lambda(lam, relaxed=True)
    assert isinstance(transitivity_check(fam.lift), HypothesisFails)


def _contains_translate(lo, hi, xl, xr):
    k = math.floor(hi - xr)
    return k + xl > lo and k + xr < hi


def test_images_cover_golden_step(family):
    F = family.lift
    U = (Q(2, 5), Q(41, 100))
    out = images_cover(F, U, max_steps=10)
    assert isinstance(out, CoversLine) and out.step == 3
    assert out.lengths[0] == Q(1, 100)
    # oracle: the image of U under F^n is one interval for a continuous lift
    xl, xr = transitivity_check(F).pair
    first = None
    for n in range(1, 5):
        cells = iterate(F, n).cells_between(*U)
        vals = [c.at(x) for c in cells for x in (c.lo, c.hi)]
        if _contains_translate(min(vals), max(vals), xl, xr):
            first = n
            break
    assert first == out.step


def test_images_cover_budget(family):
    assert images_cover(family.lift, (0, 1), 5).step == 1
    out = images_cover(family.lift, (Q(2, 5), Q(41, 100)), 0)
    assert isinstance(out, Inconclusive)


@given(above, st.fractions(min_value=-2, max_value=2, max_denominator=100),
       st.fractions(min_value=Q(1, 1000), max_value=Q(1, 10), max_denominator=1000))
def test_images_cover_reaches_line(lam, a, w):
    out = images_cover(make_F_lambda(lam).lift, (a, a + w), max_steps=40)
    assert isinstance(out, CoversLine)
    assert all(x < y for x, y in zip(out.lengths, out.lengths[1:]))


def test_merge_open_keeps_touching_apart():
    assert merge_open([(0, 1), (1, 2)]) == [(0, 1), (1, 2)]
    assert merge_open([(0, 1), (Q(1, 2), 2), (3, 4)]) == [(0, 2), (3, 4)]


def test_circle_projection(family):
    g = project_to_circle(family.lift)
    assert g.kind == "circle" and g(0) == 0
    assert list(g.breakpoints) == [0, Q(157, 264)]


def test_transport_round_trips(family):
    window = lebesgue("window", 0, 1)
    circ = transport_measure("lift_to_circle", window)
    assert eigen_residual(project_to_circle(family.lift), circ, family.lam) == 0
    assert transport_measure("circle_to_lift", circ) == window
    conj = LazyConjugatedMap(family.lift)
    down = transport_measure("lift_to_interval", lebesgue("periodic"), conj)
    assert transport_measure("interval_to_lift", down) == lebesgue("periodic")
    assert down.basic_interval_values() == {Q(157, 264), Q(107, 264)}
    assert down.measure_of(LogisticPoint(Q(0)), LogisticPoint(Q(3))) == 3
    with pytest.raises(DomainMismatch):
        transport_measure("interval_to_lift", window)
    with pytest.raises(ValueError):
        transport_measure("sideways", window)


def test_conjugated_map_is_lazy(family):
    g = LazyConjugatedMap(family.lift)
    y = g.evaluate(LogisticPoint(Q(1, 2)))
    assert y == LogisticPoint(Q(41, 25))
    assert abs(g.evaluate_float(float(LogisticPoint(Q(1, 2)))) - float(y)) < 1e-12
    assert g.evaluate(LogisticPoint(math.inf)) == LogisticPoint(math.inf)
