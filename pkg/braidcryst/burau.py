"""Integral Burau representation at t = -1, its reductions mod m and the
congruence subgroups B_n[m] they cut out.

Exact matrices are numpy arrays with ``dtype=object`` holding Python ints.
The reduced representation uses the convention

    s_i  ->  I - E_{i-1,i} + E_{i+1,i}      (1-based, indices outside 1..n-1 dropped)

which is the block [[1,0],[1,1]] for s_1, [[1,-1,0],[0,1,0],[0,1,1]] for an
interior s_i and [[1,-1],[0,1]] for s_{n-1}.
"""

import logging
from math import gcd, lcm
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence

import numpy as np
import sympy

from braidcryst_utils.smith import (
    as_integer_matrix,
    determinant,
    identity,
    integer_kernel,
    unimodular_inverse,
)

from .braids import BraidWord, artin_relators, pure_braid_relations
from .errors import BraidCrystError, FormDiscoveryError, UnsupportedModeError

logger = logging.getLogger(__name__)

ExactMatrix = np.ndarray


def _frozen(M: np.ndarray) -> np.ndarray:
    M.flags.writeable = False
    return M


@lru_cache(maxsize=None)
def unreduced_burau_gen(i: int, n: int) -> ExactMatrix:
    """I_{i-1} + [[1-t, t], [1, 0]] + I_{n-i-1} evaluated at t = -1."""
    if not 1 <= i <= n - 1:
        raise BraidCrystError(f"sigma_{i} does not exist in B_{n}")
    M = identity(n)
    M[i - 1, i - 1], M[i - 1, i] = 2, -1
    M[i, i - 1], M[i, i] = 1, 0
    return _frozen(M)


@lru_cache(maxsize=None)
def reduced_burau_gen(i: int, n: int) -> ExactMatrix:
    if not 1 <= i <= n - 1:
        raise BraidCrystError(f"sigma_{i} does not exist in B_{n}")
    d = n - 1
    M = identity(d)
    col = i - 1
    if col - 1 >= 0:
        M[col - 1, col] = -1
    if col + 1 < d:
        M[col + 1, col] = 1
    return _frozen(M)


@lru_cache(maxsize=None)
def generator_image(letter: int, n: int, reduced: bool) -> ExactMatrix:
    gen = reduced_burau_gen if reduced else unreduced_burau_gen
    M = gen(abs(letter), n)
    if letter < 0:
        M = unimodular_inverse(M)
    return _frozen(M)


def burau_image(w: BraidWord, reduced: bool = True) -> ExactMatrix:
    d = w.strands - 1 if reduced else w.strands
    M = identity(d)
    for letter in w.letters:
        M = M.dot(generator_image(letter, w.strands, reduced))
    return M


def reduced_burau_neg1(w: BraidWord) -> ExactMatrix:
    return burau_image(w, reduced=True)


def unreduced_burau_neg1(w: BraidWord) -> ExactMatrix:
    return burau_image(w, reduced=False)


def is_identity(M: ExactMatrix) -> bool:
    return bool(np.array_equal(M, identity(M.shape[0])))


def same_image(w1: BraidWord, w2: BraidWord) -> bool:
    """Equal images in both the reduced and unreduced representation.

    This is a check inside the representations only, not a word-problem verdict.
    """
    return all(
        np.array_equal(burau_image(w1, reduced), burau_image(w2, reduced))
        for reduced in (True, False)
    )


def verify_braid_relations(n: int) -> bool:
    """Braid and far-commutation relations hold in both representations."""
    return all(same_image(r, BraidWord(n, ())) for r in artin_relators(n))


def verify_relations_in_representation(n: int) -> bool:
    return all(same_image(lhs, rhs) for _, lhs, rhs in pure_braid_relations(n))


def matrix_to_json(M: ExactMatrix) -> List[List[str]]:
    return [[str(int(v)) for v in row] for row in M.tolist()]


def matrix_from_json(rows: Sequence[Sequence[str]]) -> ExactMatrix:
    return as_integer_matrix([[int(v) for v in row] for row in rows])


# ---------------------------------------------------------------------------
# Reduction mod m
# ---------------------------------------------------------------------------

INT64_LIMIT = 1 << 63


def fits_int64(dimension: int, modulus: int) -> bool:
    """True when every entry of a product of two reduced matrices stays below 2^63."""
    return dimension * (modulus - 1) ** 2 < INT64_LIMIT


def _reduce_entries(entries, m: int) -> np.ndarray:
    A = np.asarray(entries)
    if A.dtype != object and fits_int64(A.shape[0], m):
        return np.mod(A.astype(np.int64), m)
    R = np.array([[int(v) % m for v in row] for row in A.tolist()], dtype=object).reshape(A.shape)
    return R.astype(np.int64) if fits_int64(A.shape[0], m) else R


@dataclass(frozen=True)
class ResidueMatrix:
    """Square matrix over Z/m, entries kept in [0, m)."""

    modulus: int
    entries: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.modulus < 2:
            raise BraidCrystError(f"Modulus must be at least 2, got {self.modulus}")
        E = _reduce_entries(self.entries, self.modulus)
        E.flags.writeable = False
        object.__setattr__(self, "entries", E)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        return ResidueMatrix(self.modulus, (self.entries @ other.entries) % self.modulus)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ResidueMatrix)
            and self.modulus == other.modulus
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.encode()))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, identity(self.dimension)))

    def encode(self) -> bytes:
        return encode_entries(self.entries, self.modulus)

    def tolist(self) -> List[List[int]]:
        return [[int(v) for v in row] for row in self.entries.tolist()]


def encode_entries(entries: np.ndarray, modulus: int) -> bytes:
    """Row-major big-endian bytes; byte order equals numeric lexicographic order."""
    if entries.dtype != object:
        if modulus <= 256:
            return entries.astype(np.uint8).tobytes()
        if modulus <= 1 << 16:
            return entries.astype(">u2").tobytes()
        return entries.astype(">u8").tobytes()
    # object entries: same widths, wider when the modulus needs it
    width = 1 if modulus <= 256 else 2 if modulus <= 1 << 16 else max(8, ((modulus - 1).bit_length() + 7) // 8)
    return b"".join(int(v).to_bytes(width, "big") for v in entries.ravel().tolist())


def reduce_mod(M: ExactMatrix, m: int) -> ResidueMatrix:
    return ResidueMatrix(m, np.array([[int(v) % m for v in row] for row in M.tolist()], dtype=object))


def uses_reduced(n: int) -> bool:
    """Odd n: reduced (symplectic) representation. Even n: unreduced, extended definition."""
    return n % 2 == 1


def representation_label(n: int) -> str:
    return "reduced" if uses_reduced(n) else "unreduced (extended definition)"


@lru_cache(maxsize=None)
def residue_generator(letter: int, n: int, m: int) -> ResidueMatrix:
    return reduce_mod(generator_image(letter, n, uses_reduced(n)), m)


def rho_m(w: BraidWord, m: int) -> ResidueMatrix:
    if m < 2:
        raise BraidCrystError(f"Modulus must be at least 2, got {m}")
    d = w.strands - 1 if uses_reduced(w.strands) else w.strands
    R = ResidueMatrix(m, np.eye(d, dtype=np.int64))
    for letter in w.letters:
        R = R @ residue_generator(letter, w.strands, m)
    return R


def in_congruence(w: BraidWord, m: int) -> bool:
    """Membership in B_n[m] = ker(rho_m)."""
    return rho_m(w, m).is_identity()


# ---------------------------------------------------------------------------
# Invariant form and fixed vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantFormReport:
    form: np.ndarray = field(compare=False)
    solution_dimension: int
    unimodular: bool

    def to_json(self) -> dict:
        return {
            "form": matrix_to_json(self.form),
            "solution_dimension": self.solution_dimension,
            "unimodular": self.unimodular,
        }


@dataclass(frozen=True)
class FixedVectorReport:
    basis: List[List[int]]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "basis": self.basis}


def _primitive(vector: Sequence[int]) -> List[int]:
    g = 0
    for v in vector:
        g = gcd(g, int(v))
    vector = [int(v) // g for v in vector] if g else [int(v) for v in vector]
    first = next((v for v in vector if v != 0), 0)
    return [-v for v in vector] if first < 0 else vector


def discover_invariant_form(n: int) -> InvariantFormReport:
    """Solve B^T J B = J (J skew) for all reduced generator images at once."""
    if n % 2 == 0 or n < 3:
        raise UnsupportedModeError(
            f"Invariant form discovery runs on the reduced representation for odd n >= 3, got n={n}"
        )
    d = n - 1
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    columns = []
    for a, b in pairs:
        J = np.zeros((d, d), dtype=object)
        J[a, b], J[b, a] = 1, -1
        column = []
        for i in range(1, n):
            B = reduced_burau_gen(i, n)
            residual = B.T.dot(J).dot(B) - J
            column.extend(residual[p, q] for p, q in pairs)
        columns.append(column)
    system = sympy.Matrix(columns).T
    null = system.nullspace()
    if not null:
        raise FormDiscoveryError(f"No invariant skew form for the reduced representation at n={n}")

    vec = null[0]
    denominators = lcm(*[int(sympy.fraction(v)[1]) for v in vec])
    coeffs = _primitive([int(v * denominators) for v in vec])
    J = np.zeros((d, d), dtype=object)
    for (a, b), c in zip(pairs, coeffs):
        J[a, b], J[b, a] = c, -c
    report = InvariantFormReport(J, len(null), abs(determinant(J)) == 1)
    logger.debug("Invariant form for n=%d: dimension %d", n, report.solution_dimension)
    return report


def common_fixed_vectors(n: int) -> FixedVectorReport:
    """Integer basis of {u : B u = u} for all unreduced generator images."""
    I = identity(n)
    stacked = np.vstack([unreduced_burau_gen(i, n) - I for i in range(1, n)])
    kernel = integer_kernel(stacked)
    basis = [_primitive(kernel[:, j].tolist()) for j in range(kernel.shape[1])]
    return FixedVectorReport(basis)
