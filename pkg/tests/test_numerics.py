#!/usr/bin/env python

"""Tests for `LSPlus.numerics`, exact linear algebra"""

from fractions import Fraction

import numpy as np
import pytest

from LSPlus.numerics import (
    UNBOUNDED,
    InfeasibleError,
    as_int_matrix,
    as_rat_matrix,
    determinant,
    identity,
    inverse,
    is_diag_dominant,
    is_positive_definite,
    is_symmetric,
    is_zero,
    ldl_decomposition,
    lp_max_exact,
    mat_mul,
    rational_rank,
    read_matrix,
    write_matrix,
    zeros,
)

from .known_graphs import K4_CERT_V


def test_as_int_matrix_keeps_python_ints():
    M = as_int_matrix([[1, 2], [3, Fraction(8, 2)]])
    assert M.dtype == object
    assert all(type(v) is int for v in M.flat)
    assert M[1, 1] == 4


def test_as_int_matrix_rejects_fractions():
    with pytest.raises(ValueError):
        as_int_matrix([[Fraction(1, 2)]])


def test_big_integers_do_not_overflow():
    """Products stay exact past 64 bits"""
    A = as_int_matrix([[2**40, 1], [0, 2**40]])
    P = mat_mul(A, A)
    assert P[0, 0] == 2**80
    assert P[0, 1] == 2**41


def test_mat_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_mul(identity(2), identity(3))


def test_zero_and_identity():
    assert is_zero(zeros(3, 2))
    assert not is_zero(identity(2))
    assert is_symmetric(identity(4))
    assert not is_symmetric(as_int_matrix([[0, 1], [0, 0]]))


def test_diag_dominant():
    assert is_diag_dominant(K4_CERT_V)
    assert is_diag_dominant(zeros(3, 3))
    assert not is_diag_dominant([[1, 2], [2, 1]])
    # Symmetry is part of the definition
    assert not is_diag_dominant([[5, 1], [0, 5]])


def test_diag_dominant_non_square():
    assert not is_diag_dominant([[1, 0, 0], [0, 1, 0]])


def test_rank_and_determinant():
    M = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rational_rank(M) == 2
    assert determinant(M) == 0
    assert determinant([[2, 1], [1, 2]]) == 3
    assert rational_rank(zeros(0, 0)) == 0


def test_inverse():
    M = [[2, 1], [1, 2]]
    Minv = inverse(M)
    assert Minv[0, 0] == Fraction(2, 3)
    assert Minv[0, 1] == Fraction(-1, 3)
    P = mat_mul(as_rat_matrix(M), Minv)
    assert all(P[i, j] == int(i == j) for i in range(2) for j in range(2))


def test_inverse_singular():
    with pytest.raises(ValueError):
        inverse([[1, 2], [2, 4]])


def test_ldl_reconstructs():
    M = as_int_matrix([[4, 2, 2], [2, 5, 3], [2, 3, 6]])
    L, D = ldl_decomposition(M)
    Dm = as_rat_matrix(np.diag(np.array(D, dtype=object)))
    R = mat_mul(mat_mul(L, Dm), L.T)
    assert all(R[idx] == M[idx] for idx in np.ndindex(M.shape))
    assert all(d > 0 for d in D)


def test_positive_definite():
    assert is_positive_definite([[2, 1], [1, 2]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    assert not is_positive_definite([[1, 1], [1, 1]])


def test_lp_simple():
    """max x + y with x, y in [0, 1] and x + y <= 3/2"""
    constraints = [
        ((-1, 0), 0),
        ((0, -1), 0),
        ((1, 0), 1),
        ((0, 1), 1),
        ((1, 1), Fraction(3, 2)),
    ]
    assert lp_max_exact(constraints, (1, 1)) == Fraction(3, 2)


def test_lp_unbounded():
    assert lp_max_exact([((-1, 0), 0)], (1, 0)) is UNBOUNDED


def test_lp_infeasible():
    with pytest.raises(InfeasibleError):
        lp_max_exact([((1,), -1), ((-1,), 0)], (1,))


def test_matrix_csv_round_trip(tmpdir):
    M = as_int_matrix([[1, -2], [3, 40000000000000000000]])
    path = str(tmpdir.join("M.csv"))
    write_matrix(path, M)
    N = read_matrix(path)
    assert N.shape == (2, 2)
    assert all(N[idx] == M[idx] for idx in np.ndindex(M.shape))


def test_read_matrix_rationals(tmpdir):
    path = tmpdir.join("R.csv")
    path.write("1/2,3\n-4,5/3\n")
    M = read_matrix(str(path))
    assert M[0, 0] == Fraction(1, 2)
    assert M[1, 1] == Fraction(5, 3)


def test_read_matrix_malformed(tmpdir):
    path = tmpdir.join("bad.csv")
    path.write("1,2\n3,x\n")
    with pytest.raises(ValueError):
        read_matrix(str(path))


def test_read_matrix_ragged(tmpdir):
    path = tmpdir.join("ragged.csv")
    path.write("1,2\n3\n")
    with pytest.raises(ValueError):
        read_matrix(str(path))
