import random

import numpy as np
import pytest

from braidcryst import crystallography as cryst
from braidcryst.braids import BraidWord, conjugate, full_twist, power, random_word
from braidcryst.errors import BraidCrystError, NotASubgroupError, UnsupportedModeError
from braidcryst.rewriting import coset_of, to_subgroup
from braidcryst.verify import THETA_SIGMA_1, THETA_SIGMA_2, validate_witness
from braidcryst_utils.smith import as_integer_matrix, determinant, identity

SIGMA_1 = BraidWord(3, (1,))
SIGMA_2 = BraidWord(3, (2,))


@pytest.fixture(scope="module")
def level3():
    return cryst.build_extension(3, "full-kernel", cryst.e_basis())


@pytest.fixture(scope="module")
def level3_center():
    return cryst.build_extension(3, "center-quotient-kernel")


# ============================================================================
# Formulas
# ============================================================================

@pytest.mark.parametrize("M,k,expected", [(3, 2, 3), (5, 2, 10), (2, 3, 2), (2, 4, 3), (1, 1, 1), (1, 5, 0)])
def test_witt_rank(M, k, expected):
    assert cryst.witt_rank(M, k) == expected


def test_witt_rank_matches_lyndon_words():
    assert all(w == l for _, _, w, l in cryst.lyndon_table(5, 6))


def test_lyndon_words_over_two_letters():
    assert list(cryst.lyndon_words(2, 3)) == [(0, 0, 1), (0, 1, 1)]


@pytest.mark.parametrize("M,k,expected", [(3, 2, 4), (5, 2, 6), (3, 3, 7)])
def test_hirsch_length(M, k, expected):
    assert cryst.hirsch_length(M, k) == expected


@pytest.mark.parametrize("p,expected", [(3, 3), (5, 11), (7, 29)])
def test_rank_M(p, expected):
    assert cryst.rank_M(p) == expected


@pytest.mark.parametrize("p", [2, 4, 9])
def test_rank_M_needs_odd_prime(p):
    with pytest.raises(UnsupportedModeError):
        cryst.rank_M(p)


def test_formula_domain_errors():
    with pytest.raises(BraidCrystError):
        cryst.witt_rank(0, 2)
    with pytest.raises(BraidCrystError):
        cryst.hirsch_length(3, 1)
    assert cryst.free_rank_parameter(4) == 5
    assert cryst.almost_cryst_dimension(4, 2) == 6


# ============================================================================
# Action matrices
# ============================================================================

def test_generator_actions(level3):
    assert np.array_equal(cryst.action_matrix_of_word(SIGMA_1, level3), as_integer_matrix(THETA_SIGMA_1))
    assert np.array_equal(cryst.action_matrix_of_word(SIGMA_2, level3), as_integer_matrix(THETA_SIGMA_2))


def test_central_element_acts_trivially(level3):
    u = power(BraidWord(3, (1, 1, 2)), 2)
    assert np.array_equal(cryst.action_matrix_of_word(u, level3), identity(4))
    assert cryst.lattice_class(power(u, 2), level3) == [1, 1, 1, 1]


def test_action_is_multiplicative(level3):
    assert cryst.is_multiplicative(level3)
    assert all(determinant(level3.theta[c]) in (1, -1) for c in level3.elements)


def test_action_matches_conjugation(level3):
    rng = random.Random(23)
    for _ in range(25):
        g = random_word(3, rng.randint(0, 8), rng)
        k = to_subgroup(random_word(3, rng.randint(1, 8), rng), level3.cosets)
        lhs = cryst.lattice_class(conjugate(k, g), level3)
        rhs = cryst.action_matrix_of_word(g, level3).dot(np.array(cryst.lattice_class(k, level3), dtype=object))
        assert lhs == [int(v) for v in rhs]


# ============================================================================
# Torsion and verdicts
# ============================================================================

def test_level3_is_torsion_free(level3):
    assert cryst.torsion_test(level3).torsion_free


def test_level2_has_order_three_torsion():
    P = cryst.build_extension(2, "full-kernel", cryst.a_basis())
    result = cryst.torsion_test(P)
    assert not result.torsion_free
    order3 = [w for w in result.witnesses if w.order == 3]
    assert order3
    assert all(validate_witness(P, w) for w in result.witnesses)


def test_torsion_test_parallel_matches_serial():
    P = cryst.build_extension(2, "full-kernel", cryst.a_basis())
    assert cryst.torsion_test(P, workers=3) == cryst.torsion_test(P)


def test_level3_center_quotient_is_bieberbach(level3_center):
    v = cryst.crystallographic_verdict(level3_center)
    assert v.bieberbach
    assert v.dimension == 4
    assert v.holonomy_name == "A4"
    assert v.formula_dimension == 4


def test_level4_center_quotient_is_crystallographic():
    v = cryst.crystallographic_verdict(cryst.build_extension(4, "center-quotient-kernel"))
    assert v.crystallographic
    assert v.dimension == 6
    assert v.holonomy_name == "S4"


def test_full_kernel_holonomy_is_not_faithful(level3):
    v = cryst.crystallographic_verdict(level3)
    assert not v.crystallographic
    assert v.kernel == tuple(sorted({0, coset_of(full_twist(3), level3.cosets)}))
    payload = cryst.verdict_to_json(v)
    assert payload["recommendation"] == "use center-quotient-kernel mode"
    assert payload["flags"]["bieberbach"] is False


def test_cyclic_sub_extension(level3_center):
    S = cryst.cosets_generated_by(level3_center, [SIGMA_1])
    assert len(S) == 3
    v = cryst.crystallographic_verdict(cryst.sub_extension(level3_center, S))
    assert v.bieberbach
    assert v.holonomy_name == "Z/3"


def test_trivial_sub_extension(level3_center):
    v = cryst.crystallographic_verdict(cryst.sub_extension(level3_center, [0]))
    assert v.holonomy_name == "Z/1"
    assert v.torsion_free


def test_sub_extension_must_be_closed(level3_center):
    c = coset_of(SIGMA_1, level3_center.cosets)
    with pytest.raises(NotASubgroupError):
        cryst.sub_extension(level3_center, [0, c])


def test_action_matrix_by_coset(level3):
    for word, expected in ((SIGMA_1, THETA_SIGMA_1), (SIGMA_2, THETA_SIGMA_2)):
        c = coset_of(word, level3.cosets)
        assert np.array_equal(cryst.action_matrix(c, level3), as_integer_matrix(expected))
    assert np.array_equal(cryst.action_matrix(0, level3), identity(4))


@pytest.mark.parametrize("basis", [None, "a"])
def test_every_level2_witness_is_valid(basis):
    P = cryst.build_extension(2, "full-kernel", cryst.a_basis() if basis == "a" else None)
    result = cryst.torsion_test(P)
    assert result.witnesses
    for w in result.witnesses:
        assert validate_witness(P, w)


def test_level4_order_two_sub_extension():
    P = cryst.build_extension(4, "center-quotient-kernel")
    S = cryst.cosets_generated_by(P, [power(SIGMA_1, 2)])
    assert len(S) == 2
    sub = cryst.sub_extension(P, S)
    v = cryst.crystallographic_verdict(sub)
    assert v.crystallographic
    assert v.dimension == 6
    assert v.holonomy_name == "Z/2"
    assert v.formula_dimension is None
    for w in cryst.torsion_test(sub).witnesses:
        assert validate_witness(sub, w)


@pytest.mark.parametrize("k", range(2, 8))
@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_hirsch_length_steps_by_witt_rank(M, k):
    assert cryst.hirsch_length(M, k + 1) - cryst.hirsch_length(M, k) == cryst.witt_rank(M, k)


# ============================================================================
# Letter order
# ============================================================================

def _verdict_summary(v):
    return v.torsion_free, v.holonomy_faithful, v.dimension, v.holonomy_name


@pytest.mark.parametrize("order", [(-2, 2, -1, 1), (2, -1, -2, 1)])
@pytest.mark.parametrize("m,mode", [(2, "full-kernel"), (3, "center-quotient-kernel"), (4, "center-quotient-kernel")])
def test_verdict_ignores_letter_order(m, mode, order):
    reference = cryst.crystallographic_verdict(cryst.build_extension(m, mode))
    permuted = cryst.build_extension(m, mode, letter_order=order)
    assert permuted.cosets.image.generator_labels == order
    assert cryst.is_multiplicative(permuted)
    assert _verdict_summary(cryst.crystallographic_verdict(permuted)) == _verdict_summary(reference)


def test_permuted_level2_witnesses_are_valid():
    P = cryst.build_extension(2, "full-kernel", letter_order=(2, -1, -2, 1))
    result = cryst.torsion_test(P)
    assert not result.torsion_free
    assert all(validate_witness(P, w) for w in result.witnesses)
