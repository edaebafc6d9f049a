import numpy as np
import pytest
import sympy
from hypothesis import given

from dglab.linalg import (canon, column_basis, in_span, is_zero, nullspace, q, qmatrix, qstr,
                          rank, rref, solve)

from strategies import rational_matrix


def to_sympy(m):
    r, c = m.shape
    return sympy.Matrix(r, c, lambda i, j: sympy.Rational(int(m[i, j].numerator),
                                                         int(m[i, j].denominator)))


@given(rational_matrix())
def test_rank_matches_sympy(m):
    assert rank(m) == to_sympy(m).rank()


@given(rational_matrix())
def test_nullspace_is_kernel_of_full_dimension(m):
    K = nullspace(m)
    assert K.shape == (m.shape[1], m.shape[1] - rank(m))
    assert is_zero(canon(m @ K))
    assert rank(K) == K.shape[1]


@given(rational_matrix())
def test_rref_reproduces_sympy(m):
    rows, pivots = rref(m)
    expected, piv = to_sympy(m).rref()
    assert tuple(pivots) == tuple(piv)
    for i, row in enumerate(rows):
        assert [sympy.Rational(str(x)) for x in row] == list(expected.row(i))


@given(rational_matrix(), rational_matrix())
def test_solve_finds_solutions_exactly_when_they_exist(a, b):
    if a.shape[0] == 0 or a.shape[1] == 0:
        return
    x_true = b[: a.shape[1], :1] if b.shape[0] >= a.shape[1] and b.shape[1] else None
    if x_true is not None:
        rhs = canon(a @ x_true)
        x = solve(a, rhs)
        assert x is not None and np.all(canon(a @ x) == rhs)
    v = np.array([q(1)] * a.shape[0], dtype=object)
    x = solve(a, v)
    consistent = rank(np.concatenate([a, v.reshape(-1, 1)], axis=1)) == rank(a)
    assert (x is not None) == consistent
    if x is not None:
        assert np.all(canon(a @ x) == v)


def test_rationals_are_exact():
    third = q("1/3")
    assert third * 3 == 1
    assert qstr(q("-6/4")) == "-3/2"
    assert qstr(q(5)) == "5"


def test_column_basis_and_span():
    m = qmatrix([[1, 2, 3], [2, 4, 6]])
    B = column_basis(m)
    assert B.shape[1] == 1
    assert in_span(B, np.array([q(3), q(6)], dtype=object))
    assert not in_span(B, np.array([q(1), q(0)], dtype=object))


def test_qmatrix_rejects_bad_shape():
    with pytest.raises(Exception):
        qmatrix([[1, 2], [3]], (2, 2))
