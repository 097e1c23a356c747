"""Hypothesis strategies for random exact piecewise-affine maps."""

from __future__ import annotations

from fractions import Fraction as Q

from hypothesis import assume, strategies as st

from slopelab.maps import from_dots

unit = st.fractions(min_value=0, max_value=1, max_denominator=24)
small = st.fractions(min_value=-2, max_value=2, max_denominator=12)


@st.composite
def interval_maps(draw, max_branches=5):
    n = draw(st.integers(min_value=1, max_value=max_branches))
    inner = draw(st.lists(unit.filter(lambda x: 0 < x < 1), min_size=n - 1, max_size=n - 1, unique=True))
    bp = [Q(0)] + sorted(inner) + [Q(1)]
    values = draw(st.lists(unit, min_size=n + 1, max_size=n + 1))
    assume(all(a != b for a, b in zip(values, values[1:])))
    return from_dots("interval", bp, values)


@st.composite
def lift_maps(draw, max_branches=4):
    n = draw(st.integers(min_value=1, max_value=max_branches))
    inner = draw(st.lists(unit.filter(lambda x: 0 < x < 1), min_size=n - 1, max_size=n - 1, unique=True))
    bp = [Q(0)] + sorted(inner)
    values = draw(st.lists(small, min_size=n, max_size=n))
    closed = values + [values[0] + 1]
    assume(all(a != b for a, b in zip(closed, closed[1:])))
    return from_dots("lift", bp, values)


@st.composite
def constant_slope_interval_maps(draw, max_branches=4):
    """Tent-like maps: alternating slopes +-lam with lam = number of full branches."""
    n = draw(st.integers(min_value=1, max_value=max_branches))
    first_up = draw(st.booleans())
    bp = [Q(k, n) for k in range(n + 1)]
    values = [Q((k + (0 if first_up else 1)) % 2) for k in range(n + 1)]
    return from_dots("interval", bp, values)
