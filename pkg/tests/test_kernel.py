import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cfcsolve.errors import DimensionError, ParseError, SingularError
from cfcsolve.kernel import (GQ, I, ONE, ZERO, Matrix, char_poly, direct_sum, format_scalar,
                             inverse, is_invertible, nullspace, parse_scalar, poly_eval_matrix,
                             rank, sqrt_exact)
from cfcsolve.kernel.jordan import exact_eigenvalues, jordan_basis

from conftest import exact_matrices, gaussian_rationals


def _m(rows):
    return Matrix([[GQ(x) if not isinstance(x, GQ) else x for x in r] for r in rows])


def test_direct_sum_example():
    assert direct_sum(_m([[1]]), _m([[0]])) == _m([[1, 0], [0, 0]])


def test_unit_E_example():
    assert Matrix.unit_E(3, 2) == _m([[0, 0], [0, 0], [1, 0]])


def test_transpose_example():
    assert _m([[0, 1], [-1, 0]]).T == _m([[0, -1], [1, 0]])


def test_rank_of_skew_plus_transpose():
    S = _m([[0, 1], [-1, 0]])
    assert rank(S + S.T) == 0


def test_inverse_involution():
    P = _m([[0, 1], [1, 0]])
    assert inverse(P) == P


def test_inverse_singular_raises():
    with pytest.raises(SingularError):
        inverse(_m([[1, 2], [2, 4]]))


def test_shape_mismatch_raises():
    with pytest.raises(DimensionError):
        _m([[1, 2]]) @ _m([[1, 2]])
    with pytest.raises(DimensionError):
        _m([[1]]) + _m([[1, 2]])


def test_nullspace_one_equation():
    (v,) = nullspace(_m([[1, 1]]))
    assert v[0, 0] == -v[1, 0] and v[0, 0] != 0


def test_char_poly_examples():
    assert char_poly(_m([[0, 1], [1, 0]])) == [ONE, ZERO, -ONE]
    assert char_poly(_m([[-1, 1], [0, -1]])) == [ONE, GQ(2), ONE]


def test_scalar_text_round_trip_examples():
    for text, value in [("1/2-3/4i", GQ("1/2", "-3/4")), ("i", I), ("-2", GQ(-2)),
                        ("2i", GQ(0, 2)), ("-i", GQ(0, -1)), ("0", ZERO)]:
        assert parse_scalar(text) == value
        assert parse_scalar(format_scalar(value)) == value


@pytest.mark.parametrize("bad", ["", "1//2", "ii", "1/0", "abc", "1+"])
def test_scalar_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_scalar(bad)


def test_sqrt_exact_branch():
    assert sqrt_exact(GQ(-1)) == I
    assert sqrt_exact(GQ(4)) == GQ(2)
    assert sqrt_exact(GQ(0, 2)) == GQ(1, 1)
    assert sqrt_exact(GQ(2)) is None


@given(gaussian_rationals(), gaussian_rationals())
def test_field_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    if b:
        assert (a / b) * b == a
    assert parse_scalar(format_scalar(a)) == a


@given(exact_matrices(max_dim=4))
def test_rank_nullity(M):
    assert rank(M) + len(nullspace(M)) == M.cols
    for v in nullspace(M):
        assert (M @ v).is_zero()


@given(st.integers(1, 4).flatmap(lambda n: exact_matrices(rows=n, cols=n)))
def test_inverse_and_cayley_hamilton(M):
    n = M.rows
    assert poly_eval_matrix(char_poly(M), M).is_zero()
    assert is_invertible(M) == (rank(M) == n)
    if is_invertible(M):
        assert M @ inverse(M) == Matrix.identity(n)


@given(st.integers(1, 4).flatmap(lambda n: exact_matrices(rows=n, cols=n)))
def test_float_twin_agrees(M):
    a = M.to_numpy()
    assert np.allclose((M @ M.T).to_numpy(), a @ a.T)
    assert rank(M) == np.linalg.matrix_rank(a)


def test_jordan_basis_of_block_diag():
    M = direct_sum(_m([[-1, 1], [0, -1]]), _m([[2]]))
    eigs = dict((lam, mult) for lam, mult in exact_eigenvalues(M))
    assert eigs == {GQ(-1): 2, GQ(2): 1}
    T, structure = jordan_basis(M)
    assert sorted(structure, key=lambda t: t[1]) == [(GQ(2), 1), (GQ(-1), 2)]
    J = direct_sum(*(Matrix([[lam if i == j else (ONE if j == i + 1 else ZERO)
                               for j in range(k)] for i in range(k)]) for lam, k in structure))
    assert M @ T == T @ J
