from __future__ import annotations

from fractions import Fraction as Q

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from slopelab.errors import NotMarkov, NotProbability, ReducibleMatrix
from slopelab.maps import from_dots, is_constant_slope
from slopelab.measures import eigen_residual, lebesgue
from slopelab.numeric import surd
from slopelab.semiconj import (build_semiconjugacy, eigenvector_csv, entropy_of_constant_slope,
                               exact_perron, factor_table_csv, markov_eigen_measure,
                               markov_map_from_matrix, null_vector, perron,
                               strongly_connected_components, transition_matrix,
                               verify_commutation)

TENT = from_dots("interval", [0, Q(1, 2), 1], [0, 1, 0])
GOLDEN = surd(Q(1, 2), Q(1, 2), 5)

# (matrix, partition, orientation, exact Perron root)
MARKOV_CORPUS = [
    ([[0, 1], [1, 1]], [0, Q(1, 2), 1], [1, -1], GOLDEN),
    ([[0, 1, 1], [1, 1, 1], [1, 1, 1]], [0, Q(1, 5), Q(1, 2), 1], [1, -1, 1], surd(1, 1, 3)),
    ([[0, 0, 1], [0, 0, 1], [1, 1, 1]], [0, Q(1, 5), Q(1, 2), 1], [-1, 1, -1], Q(2)),
    ([[0, 1, 1], [1, 1, 1], [1, 1, 0]], [0, Q(1, 5), Q(1, 2), 1], [1, -1, 1], surd(1, 1, 2)),
    ([[0, 0, 1], [1, 1, 0], [1, 1, 0]], [0, Q(1, 5), Q(1, 2), 1], [-1, -1, 1], GOLDEN),
    ([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [0, Q(1, 3), Q(2, 3), 1], None, Q(2)),
]


def mpf(x):
    return mpmath.mpf(x.numerator) / x.denominator


def spectral_radius(m):
    mpmath.mp.dps = 40
    ev, _ = mpmath.eig(mpmath.matrix(m))
    return max(abs(e) for e in ev)


def test_tent_pipeline_is_identity():
    tm = transition_matrix(TENT, [0, Q(1, 2), 1])
    assert tm.as_lists() == [[1, 1], [1, 1]]
    pr = perron(tm.as_lists())
    assert pr.lower == pr.upper == 2
    lam, v = exact_perron(tm.as_lists())
    assert lam == 2 and list(v) == [Q(1, 2), Q(1, 2)]
    mu, depth = markov_eigen_measure(TENT, [0, Q(1, 2), 1], lam, v)
    assert depth == 0
    sc = build_semiconjugacy(TENT, mu, lam)
    assert sc.is_identity()
    assert is_constant_slope(sc.factor) == 2
    assert verify_commutation(sc) == []


@pytest.mark.parametrize("matrix, partition, orientation, root", MARKOV_CORPUS)
def test_markov_round_trip(matrix, partition, orientation, root):
    f, lam, v = markov_map_from_matrix(matrix, partition, orientation)
    assert lam == root
    assert transition_matrix(f, partition).as_lists() == matrix
    pr = perron(matrix)
    assert pr.contains(root)
    assert pr.width <= Q(1, 10**12)
    mu, _ = markov_eigen_measure(f, partition, lam, v)
    assert eigen_residual(f, mu, lam) == 0
    sc = build_semiconjugacy(f, mu, lam)
    assert is_constant_slope(sc.factor) == lam
    assert verify_commutation(sc) == []
    if f.continuous:
        assert sc.factor.continuous


def test_golden_map_is_not_constant_slope_but_factor_is():
    f, lam, _ = markov_map_from_matrix([[0, 1], [1, 1]], [0, Q(1, 2), 1], [1, -1])
    assert f.continuous and is_constant_slope(f) is None
    assert f.slopes == (1, surd(Q(-1, 2), Q(-1, 2), 5), surd(Q(-3, 2), Q(-1, 2), 5))


def test_cubic_perron_root_has_no_exact_form():
    m = [[1, 1, 1], [1, 1, 0], [1, 0, 0]]
    assert exact_perron(m) is None
    pr = perron(m)
    assert mpf(pr.lower) <= spectral_radius(m) <= mpf(pr.upper)


def test_reducible_matrix():
    with pytest.raises(ReducibleMatrix) as exc:
        perron([[1, 0], [0, 1]])
    assert exc.value.code == "Reducible"
    assert sorted(map(sorted, exc.value.components)) == [[0], [1]]


def test_not_markov():
    f = from_dots("interval", [0, Q(1, 3), 1], [0, 1, Q(1, 7)])
    with pytest.raises(NotMarkov):
        transition_matrix(f, [0, Q(1, 3), 1])


def test_build_requires_probability():
    with pytest.raises(NotProbability):
        build_semiconjugacy(TENT, lebesgue().scale(2), 2)


def test_null_vector():
    v = null_vector([[1, -1], [2, -2]])
    assert v[0] == v[1] != 0


def test_scc():
    m = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert sorted(map(sorted, strongly_connected_components(m))) == [[0, 1], [2]]


@pytest.mark.parametrize("lam, expected", [(Q(132, 25), "1.663926"), (2, "0.693147"), (1, "0.000000")])
def test_entropy_rendering(lam, expected):
    assert entropy_of_constant_slope(lam).decimal(6) == expected


def test_entropy_floor():
    assert entropy_of_constant_slope(surd(0, 1, 2)).meets_transitive_floor()
    assert not entropy_of_constant_slope(Q(7, 5)).meets_transitive_floor()


def test_csv_writers():
    assert eigenvector_csv([(0, Q(1, 2)), (Q(1, 2), 1)], [Q(1, 2), Q(1, 2)]).splitlines()[0] == "state,lo,hi,entry"
    rows = factor_table_csv(TENT).splitlines()
    assert rows[0] == "lo,hi,value_lo,value_hi,slope" and len(rows) == 3


@st.composite
def irreducible_matrices(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    m = [draw(st.lists(st.integers(min_value=0, max_value=3), min_size=n, max_size=n)) for _ in range(n)]
    assume(len(strongly_connected_components(m)) == 1 and any(any(r) for r in m))
    return m


@given(irreducible_matrices())
def test_perron_enclosure_brackets_eigenvalue(m):
    pr = perron(m)
    rho = spectral_radius(m)
    slack = mpmath.mpf(10) ** -30
    assert mpf(pr.lower) <= rho + slack
    assert rho - slack <= mpf(pr.upper)
    assert pr.width <= Q(1, 10**12)
    assert all(x > 0 for x in pr.vector) and sum(pr.vector) == 1
