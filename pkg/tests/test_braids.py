import random

import pytest

from braidcryst.braids import (
    ARTIN_RELATOR_B3,
    BraidWord,
    commutator,
    compose,
    equal_b3,
    exponent_sum,
    full_twist,
    full_twist_as_pure_product,
    is_trivial_b3,
    parse_word,
    power,
    pure_generator,
    random_word,
    verify_full_twist_product,
    verify_pure_braid_relations,
)
from braidcryst.errors import MalformedWordError, StrandMismatchError


def test_compose_cancels():
    assert compose(BraidWord(3, (1,)), BraidWord(3, (-1,))).is_empty()
    assert compose(BraidWord(3, (1,)), BraidWord(3, (2,))).letters == (1, 2)
    assert (BraidWord(3, (1, 2)) * BraidWord(3, (-2, -1))).is_empty()


def test_compose_strand_mismatch():
    with pytest.raises(StrandMismatchError):
        compose(BraidWord(3, (1,)), BraidWord(4, (1,)))


def test_letters_out_of_range():
    with pytest.raises(MalformedWordError):
        BraidWord(3, (3,))
    with pytest.raises(MalformedWordError):
        BraidWord(3, (0,))


@pytest.mark.parametrize(
    "i,j,letters",
    [(1, 2, (1, 1)), (1, 3, (2, 1, 1, -2)), (2, 3, (2, 2))],
)
def test_pure_generators(i, j, letters):
    assert pure_generator(i, j, 3).letters == letters


def test_pure_generator_index_error():
    with pytest.raises(MalformedWordError):
        pure_generator(2, 2, 3)


@pytest.mark.parametrize("n,length", [(3, 6), (2, 2), (4, 12)])
def test_full_twist_length(n, length):
    assert len(full_twist(n)) == length


def test_exponent_sum():
    assert exponent_sum(ARTIN_RELATOR_B3) == 0
    assert exponent_sum(power(BraidWord(3, (1, 2)), 6)) == 12
    assert exponent_sum(BraidWord(3, (1, 1, 1))) == 3


def test_word_problem_examples():
    assert is_trivial_b3(ARTIN_RELATOR_B3)
    assert not is_trivial_b3(power(BraidWord(3, (1, 2)), 6))
    assert is_trivial_b3(commutator(full_twist(3), BraidWord(3, (1,))))


def test_word_problem_needs_three_strands():
    with pytest.raises(StrandMismatchError):
        is_trivial_b3(BraidWord(4, (1,)))


def test_pure_braid_relations_and_twist():
    assert verify_pure_braid_relations(3)
    assert verify_full_twist_product(3)
    A12, A13, A23 = (pure_generator(i, j, 3) for i, j in ((1, 2), (1, 3), (2, 3)))
    assert equal_b3(A12, full_twist(3) * ~A23 * ~A13)
    assert equal_b3(full_twist(3), full_twist_as_pure_product(3))


def test_random_word_properties():
    rng = random.Random(3)
    for _ in range(50):
        w1 = random_word(3, rng.randint(0, 12), rng)
        w2 = random_word(3, rng.randint(0, 12), rng)
        assert is_trivial_b3(w1 * ~w1)
        assert exponent_sum(w1 * w2) == exponent_sum(w1) + exponent_sum(w2)
        if equal_b3(w1, w2):
            assert equal_b3(w1 * ARTIN_RELATOR_B3, w2)


def test_parse_word_formats():
    assert parse_word("1 2 -1").letters == (1, 2, -1)
    assert parse_word("s1 s2 S1").letters == (1, 2, -1)
    assert parse_word("1 3").strands == 4
    assert parse_word("1", 5).strands == 5
    assert parse_word("").is_empty()
    with pytest.raises(MalformedWordError):
        parse_word("1 x")
    with pytest.raises(MalformedWordError):
        parse_word("0")


def test_str_round_trip():
    w = BraidWord(3, (1, -2, 2, 2))
    assert str(w) == "1 2"
    assert parse_word(str(w), 3) == w
