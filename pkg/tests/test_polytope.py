#!/usr/bin/env python

"""Tests for `LSPlus.polytope`"""

from fractions import Fraction

import pytest

from LSPlus.graphs import Graph
from LSPlus.polytope import (
    Inequality,
    cone_frac_member,
    dominates,
    enumerate_facets,
    enumerate_stable_sets,
    format_stable_set,
    frac_lp_max,
    full_support_facets,
    homogenize,
    is_facet,
    is_valid_for_stab,
    max_weight_stable_set,
    tight_stable_sets,
    witness,
)

from .known_graphs import K4_CERT_Y, STRETCHED_K4_INEQUALITY


def test_inequality_basics():
    ineq = Inequality((2, 1, 0), 3)
    assert ineq.n == 3
    assert ineq.support() == [0, 1]
    assert not ineq.is_full_support
    assert str(ineq) == "2*x1 + x2 <= 3"
    assert Inequality.from_row(ineq.to_row()) == ineq
    assert Inequality((2, 4), 6).normalized() == Inequality((1, 2), 3)
    assert Inequality((0, -1), 0).is_nonnegativity
    assert not Inequality((0, 1), 1).is_nonnegativity


def test_inequality_evaluate():
    ineq = Inequality.ones(3, 1)
    assert ineq.evaluate((Fraction(1, 2),) * 3) == Fraction(3, 2)
    assert ineq.violation((2, 1, 1, 1)) == 1
    with pytest.raises(ValueError):
        ineq.evaluate((1, 1))


def test_stable_sets_of_triangle():
    assert enumerate_stable_sets(Graph.complete(3)) == [
        (0, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
    ]
    assert format_stable_set((1, 0, 1)) == "101"


def test_stable_sets_of_c5():
    sets = enumerate_stable_sets(Graph.cycle(5))
    assert len(sets) == 1 + 5 + 5
    assert max(sum(s) for s in sets) == 2


def test_max_weight_stable_set(stretched_k4):
    value, S = max_weight_stable_set(stretched_k4, STRETCHED_K4_INEQUALITY.a)
    assert value == 3
    assert sum(STRETCHED_K4_INEQUALITY.a[v] for v in S) == 3
    value, S = max_weight_stable_set(Graph.cycle(5), [-1] * 5)
    assert value == 0
    assert S == []


def test_validity(stretched_k4):
    assert is_valid_for_stab(stretched_k4, STRETCHED_K4_INEQUALITY)
    assert not is_valid_for_stab(stretched_k4, Inequality.ones(7, 2))
    with pytest.raises(ValueError):
        is_valid_for_stab(stretched_k4, Inequality.ones(6, 3))


def test_facets_of_c5():
    C5 = Graph.cycle(5)
    facets = enumerate_facets(C5)
    assert len(facets) == 11
    assert sum(f.is_nonnegativity for f in facets) == 5
    assert Inequality.ones(5, 2) in facets
    assert full_support_facets(C5) == [Inequality.ones(5, 2)]


def test_facets_of_triangle():
    facets = enumerate_facets(Graph.complete(3))
    assert len(facets) == 4
    assert facets[-1] == Inequality.ones(3, 1)


def test_facets_of_bipartite_graph():
    """Only nonnegativity and edge inequalities"""
    facets = enumerate_facets(Graph.path(4))
    assert len(facets) == 4 + 3
    assert full_support_facets(Graph.path(4)) == []


def test_is_facet(stretched_k4):
    assert is_facet(stretched_k4, STRETCHED_K4_INEQUALITY)
    assert is_facet(Graph.cycle(5), Inequality.ones(5, 2))
    # valid but only a face
    assert not is_facet(Graph.cycle(5), Inequality.ones(5, 3))
    with pytest.raises(ValueError):
        is_facet(Graph.cycle(5), Inequality.ones(5, 1))


def test_tight_stable_sets():
    tight = tight_stable_sets(Graph.cycle(5), Inequality.ones(5, 2))
    assert len(tight) == 5


def test_frac_lp():
    assert frac_lp_max(Graph.cycle(5), [1] * 5) == Fraction(5, 2)
    assert frac_lp_max(Graph.complete(3), [1] * 3) == Fraction(3, 2)
    assert frac_lp_max(Graph.path(3), [1] * 3) == 2
    assert frac_lp_max(Graph.empty(2), [1, -1]) == 1


def test_cone_frac_member(stretched_k4):
    first_column = [row[0] for row in K4_CERT_Y]
    assert cone_frac_member(stretched_k4, first_column)
    assert cone_frac_member(stretched_k4, [0] * 8)
    assert not cone_frac_member(stretched_k4, [1] + [1] * 7)
    assert not cone_frac_member(stretched_k4, [-1] + [0] * 7)
    assert not cone_frac_member(Graph.cycle(5), homogenize([2, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        cone_frac_member(stretched_k4, [1, 0])


def test_witness_violates_inequality():
    first_column = [row[0] for row in K4_CERT_Y]
    x = witness(first_column)
    assert x[0] == Fraction(25, 76)
    value = STRETCHED_K4_INEQUALITY.evaluate(x)
    assert value == Fraction(230, 76)
    assert value > STRETCHED_K4_INEQUALITY.beta
    with pytest.raises(ValueError):
        witness([0, 1])


def test_dominates():
    assert dominates((2, 2, 1), (1, 1, 0))
    assert not dominates((2, 1, 1), (1, 0, 1))
    assert not dominates((1, 0, 1), (1, 1, 1))
    assert dominates((0, 0), (0, 0))
    assert not dominates((0, 0), (1, 0))
    with pytest.raises(ValueError):
        dominates((1, 0), (1, 0, 0))
