"""Reidemeister-Schreier rewriting for finite-index subgroups of B_3.

Every subgroup handled here is the preimage in B_3 of a subgroup S of the
finite image Q = rho_m(B_3). Cosets are right cosets H w, identified with
S rho_m(w), so the coset table is read off the Cayley graph of Q.

Schreier words use the same signed-letter convention as braids: letter
``k`` is the k-th Schreier generator (1-based), ``-k`` its inverse.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from braidcryst_utils.config import setting
from braidcryst_utils.smith import (
    as_integer_matrix,
    determinant,
    diagonal,
    rank_of_diagonal,
    smith_normal_form,
    smith_normal_form_with_inverse,
    unimodular_inverse,
)

from .braids import ARTIN_RELATOR_B3, BraidWord, format_word, free_reduce
from .errors import (
    GuardExceededError,
    InvalidBasisError,
    NotASubgroupError,
    NotInSubgroupError,
    StrandMismatchError,
    UnsupportedModeError,
)
from .finite_image import (
    FiniteMatrixGroup,
    center,
    enumerate_image,
    generated_subgroup,
    is_subgroup,
)

logger = logging.getLogger(__name__)

MODES = ("full-kernel", "center-quotient-kernel", "subgroup-preimage")

SchreierWord = Tuple[int, ...]

__all__ = [
    "MODES",
    "CosetContext",
    "AbelianizationContext",
    "BasisSpec",
    "build_coset_context",
    "schreier_generators",
    "schreier_word",
    "reidemeister_rewrite",
    "coset_of",
    "trace_coset",
    "in_subgroup",
    "to_subgroup",
    "smith_normal_form",
    "abelianization",
    "exponent_vector",
    "class_of",
    "change_basis",
    "coordinates",
]


# ============================================================================
# Coset contexts
# ============================================================================

@dataclass(frozen=True, eq=False)
class CosetContext:
    modulus: int
    mode: str
    image: FiniteMatrixGroup = field(repr=False)
    subgroup: Tuple[int, ...]
    coset_of_element: np.ndarray = field(repr=False)
    # table[c, x - 1] = c . s_x ; inverse_table[c, x - 1] = c . s_x^-1
    table: np.ndarray = field(repr=False)
    inverse_table: np.ndarray = field(repr=False)
    transversal: Tuple[BraidWord, ...] = field(repr=False)
    tree_edges: FrozenSet[Tuple[int, int]] = field(repr=False)

    @property
    def index(self) -> int:
        return len(self.transversal)


def _require_b3(w: BraidWord):
    if w.strands != 3:
        raise StrandMismatchError(f"Rewriting works in B_3, got a braid on {w.strands} strands")


def _subgroup_elements(
    Q: FiniteMatrixGroup,
    mode: str,
    subgroup: Optional[Sequence[BraidWord]],
    generated_by: Optional[Sequence[BraidWord]],
) -> List[int]:
    match mode:
        case "full-kernel":
            return [0]
        case "center-quotient-kernel":
            return center(Q)
        case "subgroup-preimage":
            if generated_by is not None:
                return generated_subgroup(Q, [Q.element_of(w) for w in generated_by])
            if subgroup is None:
                raise NotASubgroupError("subgroup-preimage mode needs subgroup elements or generators")
            S = sorted({Q.element_of(w) for w in subgroup})
            if not is_subgroup(Q, S):
                raise NotASubgroupError(
                    f"The {len(S)} given elements are not closed under multiplication in rho_{Q.modulus}(B_3)"
                )
            return S
        case _:
            raise UnsupportedModeError(f"Unknown coset mode '{mode}', expected one of {', '.join(MODES)}")


def build_coset_context(
    m: int,
    mode: str = "full-kernel",
    subgroup: Optional[Sequence[BraidWord]] = None,
    generated_by: Optional[Sequence[BraidWord]] = None,
    letter_order: Optional[Sequence[int]] = None,
) -> CosetContext:
    """Cosets of rho_m^-1(S) in B_3 with a BFS Schreier transversal.

    In ``subgroup-preimage`` mode S is either the image of ``subgroup`` (which
    must already be closed) or the subgroup generated by ``generated_by``.
    ``letter_order`` sets the order in which the BFS tries the four letters.
    """
    if mode not in MODES:
        raise UnsupportedModeError(f"Unknown coset mode '{mode}', expected one of {', '.join(MODES)}")
    Q = enumerate_image(m, 3, letter_order=letter_order)
    S = _subgroup_elements(Q, mode, subgroup, generated_by)
    if Q.order % len(S):
        raise NotASubgroupError(f"|S| = {len(S)} does not divide |Q| = {Q.order}")
    n_cosets = Q.order // len(S)
    if n_cosets > setting("guards", "max_cosets"):
        raise GuardExceededError(f"{n_cosets} cosets exceed the configured limit")

    # partition Q into right cosets S q
    block = np.full(Q.order, -1, dtype=np.int64)
    blocks = 0
    for q in range(Q.order):
        if block[q] >= 0:
            continue
        for s in S:
            key, _ = Q.canonical((Q.matrices[s] @ Q.matrices[q]) % m)
            block[Q.index[key]] = blocks
        blocks += 1

    # Q.edges columns follow Q.generator_labels
    column = {letter: k for k, letter in enumerate(Q.generator_labels)}
    coset_id = np.full(blocks, -1, dtype=np.int64)
    representative: List[int] = []
    words: List[BraidWord] = []
    tree = set()

    coset_id[block[0]] = 0
    representative.append(0)
    words.append(BraidWord(3, ()))
    head = 0
    while head < len(representative):
        c, q = head, representative[head]
        for letter in Q.generator_labels:
            target = int(Q.edges[q, column[letter]])
            b = block[target]
            if coset_id[b] < 0:
                d = len(representative)
                coset_id[b] = d
                representative.append(target)
                words.append(BraidWord(3, words[c].letters + (letter,)))
                tree.add((c, letter) if letter > 0 else (d, -letter))
        head += 1

    coset_of_element = coset_id[block]
    table = np.zeros((blocks, 2), dtype=np.int64)
    inverse_table = np.zeros((blocks, 2), dtype=np.int64)
    for c, q in enumerate(representative):
        for x in (1, 2):
            table[c, x - 1] = coset_of_element[Q.edges[q, column[x]]]
            inverse_table[c, x - 1] = coset_of_element[Q.edges[q, column[-x]]]

    ctx = CosetContext(
        modulus=m,
        mode=mode,
        image=Q,
        subgroup=tuple(S),
        coset_of_element=coset_of_element,
        table=table,
        inverse_table=inverse_table,
        transversal=tuple(words),
        tree_edges=frozenset(tree),
    )
    logger.debug("Coset context m=%d mode=%s: %d cosets", m, mode, ctx.index)
    return ctx


def trace_coset(ctx: CosetContext, c: int, w: BraidWord) -> int:
    """Coset reached from coset ``c`` by reading ``w`` letter by letter."""
    _require_b3(w)
    for letter in w.letters:
        c = int(ctx.table[c, letter - 1] if letter > 0 else ctx.inverse_table[c, -letter - 1])
    return c


def coset_of(w: BraidWord, ctx: CosetContext) -> int:
    return trace_coset(ctx, 0, w)


def in_subgroup(w: BraidWord, ctx: CosetContext) -> bool:
    return coset_of(w, ctx) == 0


def to_subgroup(w: BraidWord, ctx: CosetContext) -> BraidWord:
    """``w t^-1`` where t is the transversal word of w's coset."""
    return w * ~ctx.transversal[coset_of(w, ctx)]


# ============================================================================
# Schreier generators and rewriting
# ============================================================================

@lru_cache(maxsize=None)
def _schreier_table(ctx: CosetContext) -> Tuple[Tuple[Tuple[int, int], ...], Dict[Tuple[int, int], int]]:
    gens = tuple(
        (c, x) for c in range(ctx.index) for x in (1, 2) if (c, x) not in ctx.tree_edges
    )
    return gens, {g: k + 1 for k, g in enumerate(gens)}


def schreier_generators(ctx: CosetContext) -> List[Tuple[int, int]]:
    """Non-tree edges (coset, generator), ordered by coset then generator."""
    return list(_schreier_table(ctx)[0])


def schreier_word(ctx: CosetContext, k: int) -> BraidWord:
    """Braid word t_c s_x t_{c.x}^-1 of the k-th (1-based) Schreier generator."""
    c, x = schreier_generators(ctx)[k - 1]
    target = int(ctx.table[c, x - 1])
    return ctx.transversal[c] * BraidWord(3, (x,)) * ~ctx.transversal[target]


def reidemeister_rewrite(w: BraidWord, ctx: CosetContext) -> SchreierWord:
    _require_b3(w)
    _, number = _schreier_table(ctx)
    out: List[int] = []
    c = 0
    for letter in w.letters:
        if letter > 0:
            edge = (c, letter)
            if edge not in ctx.tree_edges:
                out.append(number[edge])
            c = int(ctx.table[c, letter - 1])
        else:
            x = -letter
            d = int(ctx.inverse_table[c, x - 1])
            edge = (d, x)
            if edge not in ctx.tree_edges:
                out.append(-number[edge])
            c = d
    if c != 0:
        raise NotInSubgroupError(
            f"Braid '{format_word(w)}' lies in coset {c}, not in the subgroup (mode {ctx.mode}, m={ctx.modulus})"
        )
    return free_reduce(out)


# ============================================================================
# Abelianization
# ============================================================================

def _abelianize(word: SchreierWord, size: int) -> List[int]:
    v = [0] * size
    for letter in word:
        v[abs(letter) - 1] += 1 if letter > 0 else -1
    return v


@dataclass(frozen=True, eq=False)
class AbelianizationContext:
    cosets: CosetContext = field(repr=False)
    generators: Tuple[Tuple[int, int], ...] = field(repr=False)
    relations: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    V_inv: np.ndarray = field(repr=False)
    relation_rank: int
    free_rank: int
    torsion: Tuple[int, ...]

    def summary(self) -> dict:
        return {
            "modulus": self.cosets.modulus,
            "mode": self.cosets.mode,
            "index": self.cosets.index,
            "schreier_generators": len(self.generators),
            "relation_rank": self.relation_rank,
            "invariant_factors": list(self.torsion),
            "free_rank": self.free_rank,
            "nielsen_schreier_consistent": self.relation_rank + self.free_rank == len(self.generators),
        }


def relation_matrix(ctx: CosetContext, order: Optional[Sequence[int]] = None) -> np.ndarray:
    """One row per coset c: the abelianized rewrite of t_c r t_c^-1."""
    size = len(schreier_generators(ctx))
    cosets = range(ctx.index) if order is None else order
    rows = []
    for c in cosets:
        t = ctx.transversal[c]
        rows.append(_abelianize(reidemeister_rewrite(t * ARTIN_RELATOR_B3 * ~t, ctx), size))
    return as_integer_matrix(rows)


def abelianization_of_context(ctx: CosetContext) -> AbelianizationContext:
    gens = tuple(schreier_generators(ctx))
    R = relation_matrix(ctx)
    U, D, V, V_inv = smith_normal_form_with_inverse(R)
    rank = rank_of_diagonal(D)
    torsion = tuple(int(d) for d in diagonal(D)[:rank] if d != 1)
    actx = AbelianizationContext(
        cosets=ctx,
        generators=gens,
        relations=R,
        U=U,
        D=D,
        V=V,
        V_inv=V_inv,
        relation_rank=rank,
        free_rank=len(gens) - rank,
        torsion=torsion,
    )
    logger.info(
        "✅ H_1 for m=%d (%s): index %d, free rank %d, torsion %s",
        ctx.modulus, ctx.mode, ctx.index, actx.free_rank, list(torsion) or "none",
    )
    return actx


@lru_cache(maxsize=None)
def abelianization(
    m: int,
    mode: str = "full-kernel",
    subgroup: Optional[Tuple[BraidWord, ...]] = None,
    generated_by: Optional[Tuple[BraidWord, ...]] = None,
    letter_order: Optional[Tuple[int, ...]] = None,
) -> AbelianizationContext:
    return abelianization_of_context(build_coset_context(m, mode, subgroup, generated_by, letter_order))


def exponent_vector(w: BraidWord, actx: AbelianizationContext) -> List[int]:
    return _abelianize(reidemeister_rewrite(w, actx.cosets), len(actx.generators))


def class_of(w: BraidWord, actx: AbelianizationContext) -> List[int]:
    """Free coordinates of w in H_1 of the subgroup, in the Smith basis.

    With U R V = D the relations span (row space of D) V^-1, so v maps to the
    trailing ``free_rank`` entries of v V.
    """
    v = np.array(exponent_vector(w, actx), dtype=object)
    image = v.dot(actx.V) if len(v) else v
    return [int(x) for x in image[actx.relation_rank:]]


# ============================================================================
# User bases
# ============================================================================

@dataclass(frozen=True, eq=False)
class BasisSpec:
    words: Tuple[BraidWord, ...]
    # rows are the Smith coordinates of the basis words
    matrix: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)

    @property
    def determinant(self) -> int:
        return determinant(self.matrix)


def change_basis(actx: AbelianizationContext, basis: Sequence[BraidWord]) -> BasisSpec:
    r = actx.free_rank
    classes = [class_of(w, actx) for w in basis]
    if len(classes) != r:
        raise InvalidBasisError(
            f"A basis of a free abelian group of rank {r} needs {r} words, got {len(classes)}", 0
        )
    B = as_integer_matrix(classes) if r else np.zeros((0, 0), dtype=object)
    det = determinant(B)
    if det not in (1, -1):
        raise InvalidBasisError(f"Basis words do not form a basis: determinant {det}", det)
    return BasisSpec(tuple(basis), B, unimodular_inverse(B) if r else B)


def coordinates(w: BraidWord, actx: AbelianizationContext, basis: BasisSpec) -> List[int]:
    c = np.array(class_of(w, actx), dtype=object)
    if not len(c):
        return []
    return [int(x) for x in c.dot(basis.inverse)]
