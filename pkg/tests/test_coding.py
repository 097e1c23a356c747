from __future__ import annotations

from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from slopelab.coding import (BlockFamily, EventuallyPeriodic, ExplicitFinite, MarkovCertificate,
                             NonMarkovEvidence, Unknown, classify_markov, coding_core,
                             critical_orbit, critical_value, expand_block_family,
                             find_lambda_for_itinerary, parse_itinerary, point_from_itinerary)
from slopelab.errors import BelowThreshold
from slopelab.lifts import meets_threshold
from slopelab.numeric import surd

LAM = Q(132, 25)
words = st.text(alphabet="01", min_size=1, max_size=14)
params = st.fractions(min_value=4, max_value=15, max_denominator=40).filter(meets_threshold)


def test_core_intervals():
    core = coding_core(LAM)
    assert core.L == (Q(25, 132), Q(25, 66))
    assert core.R == (Q(107, 132), 1)
    assert core.fixed_points() == (Q(25, 107), Q(132, 157))
    with pytest.raises(BelowThreshold):
        coding_core(4)


@pytest.mark.parametrize("text, expected", [
    ("0^inf", EventuallyPeriodic("", "0")),
    ("0101^inf", EventuallyPeriodic("010", "1")),
    ("1(01)^inf", EventuallyPeriodic("1", "01")),
    ("0110", ExplicitFinite("0110")),
    ("blocks:n,n+1", BlockFamily((0, 1))),
])
def test_parse_itinerary(text, expected):
    assert parse_itinerary(text) == expected


def test_periodic_normal_form():
    assert str(parse_itinerary("00(00)^inf")) == "(0)^inf"
    assert parse_itinerary("1(0101)^inf").prefix(7) == "1010101"


def test_block_expansion():
    assert expand_block_family([0], 10).word == "0110001111"
    assert expand_block_family([1], 9).word == "001110000"
    with pytest.raises(ValueError):
        parse_itinerary("blocks:n,m")


@given(params, words)
def test_enclosures_shrink_by_lambda(lam, word):
    core = coding_core(lam)
    prev = None
    for d in range(1, len(word) + 1):
        lo, hi = point_from_itinerary(core, word, d)
        if prev is not None:
            assert (prev[1] - prev[0]) == (hi - lo) * lam
            assert prev[0] <= lo and hi <= prev[1]
        prev = (lo, hi)
    assert prev[1] - prev[0] == lam ** -len(word)


@given(params, words)
def test_cylinder_points_follow_word(lam, word):
    core = coding_core(lam)
    lo, hi = point_from_itinerary(core, word, len(word))
    assert core.itinerary_of((lo + hi) / 2, len(word)) == word


@pytest.mark.parametrize("depth", [1, 2, 5, 20, 60])
def test_fixed_points_enclosed(depth):
    core = coding_core(LAM)
    for text, x in (("0^inf", Q(25, 107)), ("1^inf", Q(132, 157))):
        lo, hi = point_from_itinerary(core, parse_itinerary(text), depth)
        assert lo <= x <= hi


def test_find_lambda_fixed_point_itinerary():
    enc = find_lambda_for_itinerary(2, parse_itinerary("0^inf"))
    lam = surd(3, 1, 6)
    assert enc.exact == lam
    assert enc.contains(lam) and enc.width <= Q(1, 10**12)
    # oracle: the critical value is the fixed point of the left branch
    assert critical_value(lam, 2) == 1 / (lam - 1)
    assert all(a > b for a, b in zip(enc.widths, enc.widths[1:]))


def test_find_lambda_right_fixed_point():
    enc = find_lambda_for_itinerary(2, parse_itinerary("1^inf"))
    lam = surd(3, 1, 14)
    assert enc.exact == lam
    assert critical_value(lam, 2) == lam / (lam + 1)


def test_find_lambda_rejects_small_n():
    with pytest.raises(ValueError):
        find_lambda_for_itinerary(1, parse_itinerary("0^inf"))


def test_classify_markov_parameter():
    out = classify_markov(surd(3, 1, 6), depth=8)
    assert isinstance(out, MarkovCertificate)
    assert out.preperiod + out.period <= 2
    assert out.orbit[-1] == surd(-1, Q(1, 2), 6)


def test_classify_reference_parameter_unknown():
    out = classify_markov(LAM, depth=8)
    assert isinstance(out, Unknown)
    assert out.orbit[:4] == (Q(157, 264), Q(7, 50), Q(462, 625), Q(5891, 15625))
    assert critical_orbit(LAM, 8) == list(out.orbit)


def test_block_family_parameter_gives_heuristic_label():
    enc = find_lambda_for_itinerary(2, parse_itinerary("blocks:n"), identify=False)
    assert enc.exact is None
    assert abs(float(enc.lo) - 5.647951569815) < 1e-9
    out = classify_markov(enc.lo, depth=40, evidence=True)
    assert isinstance(out, NonMarkovEvidence)
    assert out.to_dict()["heuristic"] is True
    assert out.itinerary.startswith("0110001111")
    assert isinstance(classify_markov(enc.lo, depth=40), Unknown)
