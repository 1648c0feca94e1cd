"""Exact integer linear algebra on numpy object arrays.

All matrices here hold Python ints (``dtype=object``) so nothing overflows.
The Smith form follows the usual elimination scheme: bring the smallest
nonzero entry to the pivot, clear its row and column by Euclidean steps, and
repair divisibility by adding an offending row into the pivot row.
"""

from typing import Optional, Tuple

import numpy as np
import sympy


def as_integer_matrix(A) -> np.ndarray:
    M = np.array(A, dtype=object)
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size else M.reshape(0, 0)
    return np.vectorize(int, otypes=[object])(M) if M.size else M.astype(object)


def identity(n: int) -> np.ndarray:
    I = np.zeros((n, n), dtype=object)
    for i in range(n):
        I[i, i] = 1
    return I


def _smallest_entry(D: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    # smallest |entry| first, then lowest row, then leftmost column
    sub = D[t:, t:]
    rows, cols = np.nonzero(sub)
    if len(rows) == 0:
        return None
    i, j = min(zip(rows.tolist(), cols.tolist()), key=lambda rc: (abs(sub[rc[0], rc[1]]), rc[0], rc[1]))
    return i + t, j + t


def smith_normal_form(A) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D``.

    U and V are unimodular, D is diagonal with non-negative entries and
    ``D[i, i]`` divides ``D[i + 1, i + 1]``.
    """
    U, D, V, _ = smith_normal_form_with_inverse(A)
    return U, D, V


def smith_normal_form_with_inverse(A) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Like ``smith_normal_form`` but also returns ``V^-1``, updated alongside V."""
    D = as_integer_matrix(A).copy()
    r, c = D.shape
    U, V, V_inv = identity(r), identity(c), identity(c)

    t = 0
    while t < min(r, c):
        pivot = _smallest_entry(D, t)
        if pivot is None:
            break
        while True:
            i, j = pivot
            if i != t:
                D[[t, i]] = D[[i, t]]
                U[[t, i]] = U[[i, t]]
            if j != t:
                D[:, [t, j]] = D[:, [j, t]]
                V[:, [t, j]] = V[:, [j, t]]
                V_inv[[t, j]] = V_inv[[j, t]]
            p = D[t, t]

            for i in range(t + 1, r):
                if D[i, t] != 0:
                    q = D[i, t] // p
                    D[i, t:] -= q * D[t, t:]
                    U[i] -= q * U[t]
            for j in range(t + 1, c):
                if D[t, j] != 0:
                    q = D[t, j] // p
                    D[t:, j] -= q * D[t:, t]
                    V[:, j] -= q * V[:, t]
                    V_inv[t] += q * V_inv[j]

            if any(D[t + 1:, t] != 0) or any(D[t, t + 1:] != 0):
                pivot = _smallest_entry(D, t)
                continue

            rest = D[t + 1:, t + 1:]
            bad_rows, _ = np.nonzero(rest % p) if rest.size else ([], [])
            if len(bad_rows):
                k = int(bad_rows[0]) + t + 1
                D[t, t:] += D[k, t:]
                U[t] += U[k]
                pivot = (t, t)
                continue
            break

        if D[t, t] < 0:
            D[t, t:] *= -1
            U[t] *= -1
        t += 1

    return U, D, V, V_inv


def diagonal(D: np.ndarray) -> list:
    return [D[i, i] for i in range(min(D.shape))]


def rank_of_diagonal(D: np.ndarray) -> int:
    return sum(1 for d in diagonal(D) if d != 0)


def integer_kernel(A) -> np.ndarray:
    """Columns form a basis of the integer lattice ``{x : A x = 0}``."""
    A = as_integer_matrix(A)
    _, D, V = smith_normal_form(A)
    return V[:, rank_of_diagonal(D):]


def solve_integer(A, b) -> Optional[np.ndarray]:
    """One integer solution of ``A x = b`` or ``None`` when there is none."""
    A = as_integer_matrix(A)
    U, D, V = smith_normal_form(A)
    rhs = U.dot(np.array([int(v) for v in b], dtype=object))
    rank = rank_of_diagonal(D)
    y = np.zeros(A.shape[1], dtype=object)
    for i in range(len(rhs)):
        if i < rank:
            if rhs[i] % D[i, i] != 0:
                return None
            y[i] = rhs[i] // D[i, i]
        elif rhs[i] != 0:
            return None
    return V.dot(y)


def determinant(M) -> int:
    M = as_integer_matrix(M)
    if M.shape[0] == 0:
        return 1
    return int(sympy.Matrix(M.tolist()).det())


def unimodular_inverse(M) -> np.ndarray:
    """Exact inverse of an integer matrix with determinant +-1."""
    M = as_integer_matrix(M)
    det = determinant(M)
    if det not in (1, -1):
        raise ValueError(f"Matrix is not unimodular (determinant {det})")
    inv = sympy.Matrix(M.tolist()).inv()
    return as_integer_matrix([[int(v) for v in row] for row in inv.tolist()])
