import random

import numpy as np
import pytest

from braidcryst_utils.smith import (
    as_integer_matrix,
    determinant,
    diagonal,
    identity,
    integer_kernel,
    smith_normal_form,
    smith_normal_form_with_inverse,
    solve_integer,
    unimodular_inverse,
)


def _check_snf(A):
    A = as_integer_matrix(A)
    U, D, V = smith_normal_form(A)
    assert np.array_equal(U.dot(A).dot(V), D)
    assert determinant(U) in (1, -1)
    assert determinant(V) in (1, -1)
    off = D.copy()
    for i in range(min(D.shape)):
        off[i, i] = 0
    assert not off.any()
    d = [x for x in diagonal(D) if x != 0]
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    return U, D, V


def test_diagonal_two_by_two():
    _, D, _ = _check_snf([[2, 0], [0, 3]])
    assert diagonal(D) == [1, 6]


def test_zero_matrix():
    U, D, V = _check_snf([[0, 0], [0, 0]])
    assert not D.any()
    assert np.array_equal(U, identity(2))
    assert np.array_equal(V, identity(2))


def test_small_example():
    _, D, _ = _check_snf([[1, 2], [3, 4]])
    assert diagonal(D) == [1, 2]


def test_random_rectangular_matrices():
    rng = random.Random(7)
    for _ in range(40):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        A = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
        _check_snf(A)


def test_inverse_tracks_v():
    rng = random.Random(11)
    for _ in range(20):
        A = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(3)]
        _, _, V, V_inv = smith_normal_form_with_inverse(A)
        assert np.array_equal(V.dot(V_inv), identity(4))


def test_integer_kernel():
    A = as_integer_matrix([[1, 2, 3], [2, 4, 6]])
    K = integer_kernel(A)
    assert K.shape == (3, 2)
    assert not A.dot(K).any()


def test_solve_integer():
    assert solve_integer([[2]], [1]) is None
    x = solve_integer([[2, 0], [0, 3]], [4, 9])
    assert [int(v) for v in x] == [2, 3]
    assert solve_integer([[1, 1], [1, 1]], [1, 2]) is None


def test_unimodular_inverse():
    M = as_integer_matrix([[2, 1], [1, 1]])
    assert np.array_equal(M.dot(unimodular_inverse(M)), identity(2))
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])
