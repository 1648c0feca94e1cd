"""Braid words on n strands, distinguished braids and the B_3 word problem."""

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Tuple

from .errors import MalformedWordError, StrandMismatchError


def free_reduce(letters: Iterable[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class BraidWord:
    """A freely reduced word in the Artin generators of B_n.

    ``letters`` holds signed generator indices: ``2`` is sigma_2 and ``-2``
    its inverse.
    """

    strands: int
    letters: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.strands < 2:
            raise MalformedWordError(f"A braid needs at least 2 strands, got {self.strands}")
        letters = tuple(int(l) for l in self.letters)
        for letter in letters:
            if letter == 0 or abs(letter) > self.strands - 1:
                raise MalformedWordError(
                    f"Generator index {letter} out of range for {self.strands} strands"
                )
        object.__setattr__(self, "letters", free_reduce(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return compose(self, other)

    def __invert__(self) -> "BraidWord":
        return inverse(self)

    def __pow__(self, k: int) -> "BraidWord":
        return power(self, k)

    def __str__(self) -> str:
        return format_word(self)

    def is_empty(self) -> bool:
        return not self.letters


def identity(n: int) -> BraidWord:
    return BraidWord(n, ())


def artin_generator(i: int, n: int) -> BraidWord:
    if not 1 <= i <= n - 1:
        raise MalformedWordError(f"sigma_{i} does not exist in B_{n}")
    return BraidWord(n, (i,))


def compose(w1: BraidWord, w2: BraidWord) -> BraidWord:
    if w1.strands != w2.strands:
        raise StrandMismatchError(
            f"Cannot compose braids on {w1.strands} and {w2.strands} strands"
        )
    return BraidWord(w1.strands, w1.letters + w2.letters)


def inverse(w: BraidWord) -> BraidWord:
    return BraidWord(w.strands, tuple(-l for l in reversed(w.letters)))


def power(w: BraidWord, k: int) -> BraidWord:
    if k < 0:
        return power(inverse(w), -k)
    return BraidWord(w.strands, w.letters * k)


def conjugate(w: BraidWord, by: BraidWord) -> BraidWord:
    """``by * w * by^-1``."""
    return by * w * ~by


def commutator(a: BraidWord, b: BraidWord) -> BraidWord:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * ~a * ~b


def product(words: Iterable[BraidWord], n: int) -> BraidWord:
    result = identity(n)
    for w in words:
        result = result * w
    return result


def exponent_sum(w: BraidWord) -> int:
    return sum(1 if l > 0 else -1 for l in w.letters)


def pure_generator(i: int, j: int, n: int) -> BraidWord:
    """A_{i,j} = (s_{j-1} ... s_{i+1}) s_i^2 (s_{j-1} ... s_{i+1})^-1."""
    if not 1 <= i < j <= n:
        raise MalformedWordError(f"A_{{{i},{j}}} needs 1 <= i < j <= n (n={n})")
    conj = BraidWord(n, tuple(range(j - 1, i, -1)))
    return conjugate(BraidWord(n, (i, i)), conj)


def full_twist(n: int) -> BraidWord:
    """Delta_n^2 = (s_1 ... s_{n-1})^n, the generator of the center of B_n."""
    return power(BraidWord(n, tuple(range(1, n))), n)


ARTIN_RELATOR_B3 = BraidWord(3, (1, 2, 1, -2, -1, -2))


def artin_relators(n: int) -> List[BraidWord]:
    relators = []
    for i in range(1, n):
        for j in range(i + 1, n):
            if j == i + 1:
                relators.append(BraidWord(n, (i, j, i, -j, -i, -j)))
            else:
                relators.append(BraidWord(n, (i, j, -i, -j)))
    return relators


def _require_b3(w: BraidWord):
    if w.strands != 3:
        raise StrandMismatchError(
            f"The word problem is only decided for B_3, got {w.strands} strands"
        )


def is_trivial_b3(w: BraidWord) -> bool:
    """Decide ``w == 1`` in B_3.

    The kernel of the reduced integral Burau map B_3 -> SL_2(Z) is generated by
    (s_1 s_2)^6, which has exponent sum 12, so a trivial image together with
    exponent sum 0 forces the identity.
    """
    from .burau import reduced_burau_neg1, is_identity

    _require_b3(w)
    if exponent_sum(w) != 0:
        return False
    return is_identity(reduced_burau_neg1(w))


def equal_b3(w1: BraidWord, w2: BraidWord) -> bool:
    _require_b3(w1)
    _require_b3(w2)
    return is_trivial_b3(w1 * ~w2)


def pure_braid_relations(n: int) -> List[Tuple[str, BraidWord, BraidWord]]:
    """Every defining relation of the A_{i,j} presentation of P_n as (label, lhs, rhs)."""
    A = {(i, j): pure_generator(i, j, n) for i in range(1, n) for j in range(i + 1, n + 1)}
    relations = []
    for (r, s), Ars in A.items():
        for (i, j), Aij in A.items():
            lhs = ~Ars * Aij * Ars
            label = f"A_{r}{s}^-1 A_{i}{j} A_{r}{s}"
            if r < s < i < j or i < r < s < j:
                rhs = Aij
            elif r < s == i < j:
                rhs = conjugate(Aij, A[r, j])
            elif r == i < s < j:
                rhs = conjugate(Aij, Aij * A[s, j])
            elif r < i < s < j:
                rhs = commutator(A[r, j] * A[s, j] * ~A[r, j] * ~A[s, j], Aij) * Aij
            else:
                continue
            relations.append((label, lhs, rhs))
    return relations


def full_twist_as_pure_product(n: int) -> BraidWord:
    """(A_{1,2} ... A_{1,n}) (A_{2,3} ... A_{2,n}) ... A_{n-1,n}."""
    return product(
        (pure_generator(i, j, n) for i in range(1, n) for j in range(i + 1, n + 1)), n
    )


def verify_pure_braid_relations(n: int = 3) -> bool:
    if n != 3:
        from .burau import verify_relations_in_representation

        return verify_relations_in_representation(n)
    return all(equal_b3(lhs, rhs) for _, lhs, rhs in pure_braid_relations(3))


def verify_full_twist_product(n: int = 3) -> bool:
    if n != 3:
        from .burau import same_image

        return same_image(full_twist(n), full_twist_as_pure_product(n))
    return equal_b3(full_twist(3), full_twist_as_pure_product(3))


_SIGNED = re.compile(r"^[+-]?\d+$")
_NAMED = re.compile(r"^([sS])(\d+)$")


def parse_word(text: str, n: Optional[int] = None) -> BraidWord:
    """Parse ``"1 2 -1"`` or ``"s1 s2 S1"`` (capital S = inverse).

    When ``n`` is omitted the strand count is one more than the largest index.
    """
    letters = []
    for token in re.split(r"[\s,]+", text.strip()):
        if not token:
            continue
        if _SIGNED.match(token):
            letters.append(int(token))
        elif (m := _NAMED.match(token)) is not None:
            index = int(m.group(2))
            letters.append(index if m.group(1) == "s" else -index)
        else:
            raise MalformedWordError(f"Cannot parse braid letter '{token}' in '{text}'")
    if any(l == 0 for l in letters):
        raise MalformedWordError(f"Generator index 0 in '{text}'")
    if n is None:
        n = max([abs(l) for l in letters], default=1) + 1
    return BraidWord(n, tuple(letters))


def format_word(w: BraidWord) -> str:
    return " ".join(str(l) for l in w.letters)


def random_word(n: int, length: int, rng: random.Random) -> BraidWord:
    letters = [rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(length)]
    return BraidWord(n, tuple(letters))
