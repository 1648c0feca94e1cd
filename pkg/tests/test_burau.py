import random

import numpy as np
import pytest

from braidcryst.braids import BraidWord, power, pure_generator, random_word
from braidcryst.burau import (
    ResidueMatrix,
    burau_image,
    common_fixed_vectors,
    discover_invariant_form,
    encode_entries,
    in_congruence,
    matrix_from_json,
    matrix_to_json,
    reduce_mod,
    reduced_burau_neg1,
    rho_m,
    unreduced_burau_neg1,
    verify_braid_relations,
)
from braidcryst.errors import BraidCrystError, UnsupportedModeError
from braidcryst_utils.smith import as_integer_matrix, determinant, identity


def test_reduced_generators_n3():
    assert reduced_burau_neg1(BraidWord(3, (1,))).tolist() == [[1, 0], [1, 1]]
    assert reduced_burau_neg1(BraidWord(3, (2,))).tolist() == [[1, -1], [0, 1]]
    assert reduced_burau_neg1(BraidWord(3, (-1,))).tolist() == [[1, 0], [-1, 1]]


def test_pure_generator_image():
    assert reduced_burau_neg1(pure_generator(1, 3, 3)).tolist() == [[-1, -2], [2, 3]]


def test_twist_images():
    assert np.array_equal(reduced_burau_neg1(power(BraidWord(3, (1, 2)), 3)), -identity(2))
    assert np.array_equal(reduced_burau_neg1(power(BraidWord(3, (1, 2)), 6)), identity(2))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_braid_relations(n):
    assert verify_braid_relations(n)


def test_generator_determinants():
    for i in range(1, 5):
        assert determinant(reduced_burau_neg1(BraidWord(5, (i,)))) == 1
        assert determinant(unreduced_burau_neg1(BraidWord(5, (i,)))) == 1


def test_inverse_letters():
    w = BraidWord(4, (1, 3, -2))
    assert np.array_equal(burau_image(w).dot(burau_image(~w)), identity(3))
    assert np.array_equal(burau_image(w, False).dot(burau_image(~w, False)), identity(4))


def test_congruence_membership():
    assert in_congruence(BraidWord(3, (1, 1, 1)), 3)
    assert not in_congruence(BraidWord(3, (1,)), 3)
    assert in_congruence(pure_generator(1, 2, 3), 2)
    assert in_congruence(power(BraidWord(3, (1, 2)), 6), 7)


def test_rho_m_needs_modulus():
    with pytest.raises(BraidCrystError):
        rho_m(BraidWord(3, (1,)), 1)


def test_residue_matrix():
    a = ResidueMatrix(3, np.array([[4, -1], [0, 1]]))
    assert a.tolist() == [[1, 2], [0, 1]]
    b = ResidueMatrix(3, np.array([[1, 2], [0, 1]]))
    assert a == b and hash(a) == hash(b)
    assert (a @ a @ a).is_identity()


def test_encoding_order_matches_entries():
    small = np.array([[0, 1], [2, 3]])
    big = np.array([[0, 2], [0, 0]])
    for m in (5, 300, 70000):
        assert (encode_entries(small, m) < encode_entries(big, m)) == (small.ravel().tolist() < big.ravel().tolist())


def test_matrix_json():
    M = as_integer_matrix([[10 ** 30, -1], [0, 1]])
    rows = matrix_to_json(M)
    assert rows[0][0] == str(10 ** 30)
    assert np.array_equal(matrix_from_json(rows), M)


def test_invariant_form_n5():
    report = discover_invariant_form(5)
    assert report.solution_dimension == 1
    assert report.unimodular
    J = report.form
    assert (J[0, 1], J[0, 3], J[2, 3]) == (1, 1, 1)
    assert (J[0, 2], J[1, 2], J[1, 3]) == (0, 0, 0)
    for i in range(1, 5):
        B = burau_image(BraidWord(5, (i,)))
        assert np.array_equal(B.T.dot(J).dot(B), J)


def test_invariant_form_n7():
    report = discover_invariant_form(7)
    assert report.solution_dimension == 1
    assert report.unimodular


def test_invariant_form_even_n():
    with pytest.raises(UnsupportedModeError):
        discover_invariant_form(4)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_fixed_vectors(n):
    report = common_fixed_vectors(n)
    assert report.dimension == 1
    assert report.basis == [[1] * n]


def test_invariant_form_n3():
    report = discover_invariant_form(3)
    assert matrix_to_json(report.form) == [["0", "1"], ["-1", "0"]]
    assert report.solution_dimension == 1
    assert report.unimodular


def test_fixed_vectors_n2():
    assert common_fixed_vectors(2).basis == [[1, 1]]


# ============================================================================
# Large moduli
# ============================================================================

BIG_MODULI = [5_000_000_000, 2 ** 40 + 15, 2 ** 70]


@pytest.mark.parametrize("m", BIG_MODULI)
def test_artin_relator_in_every_congruence_subgroup(m):
    assert in_congruence(BraidWord(3, (-1, -2, -1, 2, 1, 2)), m)
    assert in_congruence(BraidWord(3, (1, -1)), m)
    assert not in_congruence(BraidWord(3, (1,)), m)


@pytest.mark.parametrize("m", BIG_MODULI)
def test_rho_m_matches_exact_reduction(m):
    rng = random.Random(m % 1009)
    for n in (3, 4, 5):
        w = random_word(n, 30, rng)
        reduced = n % 2 == 1
        assert rho_m(w, m) == reduce_mod(burau_image(w, reduced), m)


def test_large_modulus_keeps_exact_entries():
    m = 2 ** 40 + 15
    R = rho_m(power(BraidWord(3, (1,)), 5), m)
    assert R.entries.dtype == object
    assert R.tolist() == [[1, 0], [5, 1]]
    assert rho_m(BraidWord(3, (-1,)), m).tolist() == [[1, 0], [m - 1, 1]]


def test_small_modulus_stays_int64():
    assert rho_m(BraidWord(3, (1, 2)), 7).entries.dtype == np.int64


def test_wide_encoding_order():
    m = 2 ** 70
    a = ResidueMatrix(m, np.array([[0, 1], [2, 3]], dtype=object))
    b = ResidueMatrix(m, np.array([[0, 2 ** 65], [0, 0]], dtype=object))
    assert a.encode() < b.encode()
    assert len(a.encode()) == 4 * 9


# ============================================================================
# Homomorphism properties
# ============================================================================

@pytest.mark.parametrize("m", [3, 4, 7, 2 ** 40 + 15])
@pytest.mark.parametrize("n", [3, 4, 5])
def test_rho_m_is_multiplicative(n, m):
    rng = random.Random(97 * n + m % 101)
    for _ in range(15):
        w1 = random_word(n, rng.randint(0, 12), rng)
        w2 = random_word(n, rng.randint(0, 12), rng)
        assert rho_m(w1 * w2, m) == rho_m(w1, m) @ rho_m(w2, m)


@pytest.mark.parametrize("n", [3, 4])
def test_congruence_passes_to_divisors(n):
    rng = random.Random(41 + n)
    for _ in range(10):
        g = random_word(n, rng.randint(1, 6), rng)
        k = 1
        while not in_congruence(power(g, k), 12):
            k += 1
        w = power(g, k)
        for d in (2, 3, 4, 6):
            assert in_congruence(w, d)
