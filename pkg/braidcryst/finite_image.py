"""Enumeration of the finite matrix groups rho_m(B_n) and their central quotients."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from braidcryst_utils.config import setting
from braidcryst_utils.core_utils import env_bool

from .braids import BraidWord, format_word
from .burau import ResidueMatrix, encode_entries, residue_generator, rho_m, uses_reduced
from .errors import BraidCrystError, GuardExceededError, UnsupportedModeError

logger = logging.getLogger(__name__)


def generator_letters(n: int) -> Tuple[int, ...]:
    """BFS order s_1, s_1^-1, s_2, s_2^-1, ..."""
    return tuple(l for i in range(1, n) for l in (i, -i))


def resolve_letter_order(n: int, letter_order: Optional[Iterable[int]] = None) -> Tuple[int, ...]:
    """The BFS letter order, defaulting to generator_letters(n). Any permutation of it is accepted."""
    default = generator_letters(n)
    if letter_order is None:
        return default
    order = tuple(int(l) for l in letter_order)
    if sorted(order) != sorted(default):
        raise UnsupportedModeError(
            f"Letter order {list(order)} is not a permutation of {list(default)}"
        )
    return order


# ============================================================================
# FiniteMatrixGroup
# ============================================================================

@dataclass(frozen=True, eq=False)
class FiniteMatrixGroup:
    """rho_m(B_n) (or its quotient by a central subgroup) stored element by element.

    ``matrices[k]`` is the representative of element ``k`` and ``encodings[k]``
    its byte encoding. Element 0 is always the identity. In a center quotient
    the representative of {z M : z central} is the one with the least encoding.
    """

    modulus: int
    strands: int
    dimension: int
    matrices: np.ndarray = field(repr=False)
    encodings: Tuple[bytes, ...] = field(repr=False)
    index: Dict[bytes, int] = field(repr=False)
    generator_labels: Tuple[int, ...]
    edges: np.ndarray = field(repr=False)
    transversal: Tuple[BraidWord, ...] = field(repr=False)
    central: np.ndarray = field(repr=False)
    center_quotient: bool = False

    @property
    def order(self) -> int:
        return len(self.encodings)

    def canonical(self, entries: np.ndarray) -> Tuple[bytes, np.ndarray]:
        return _canonical(entries, self.central, self.modulus)

    def locate(self, M) -> int:
        """Index of the element represented by ``M`` (a ResidueMatrix or int array)."""
        entries = M.entries if isinstance(M, ResidueMatrix) else np.asarray(M, dtype=np.int64)
        key, _ = self.canonical(entries % self.modulus)
        try:
            return self.index[key]
        except KeyError:
            raise BraidCrystError(f"Matrix is not an element of rho_{self.modulus}(B_{self.strands})") from None

    def element_of(self, w: BraidWord) -> int:
        return self.locate(rho_m(w, self.modulus))

    def generator_matrix(self, letter: int) -> np.ndarray:
        return residue_generator(letter, self.strands, self.modulus).entries


def _canonical(entries: np.ndarray, central: np.ndarray, m: int) -> Tuple[bytes, np.ndarray]:
    if len(central) == 1:
        return encode_entries(entries, m), entries
    candidates = np.matmul(central, entries) % m
    keys = [encode_entries(c, m) for c in candidates]
    k = min(range(len(keys)), key=keys.__getitem__)
    return keys[k], candidates[k]


def _expand(args) -> List[Tuple[bytes, np.ndarray]]:
    M, gens, central, m = args
    return [_canonical((M @ g) % m, central, m) for g in gens]


def _bfs(
    n: int,
    m: int,
    central: np.ndarray,
    workers: Optional[int],
    max_order: int,
    letters: Tuple[int, ...],
):
    d = n - 1 if uses_reduced(n) else n
    gens = [residue_generator(l, n, m).entries for l in letters]

    start_key, start = _canonical(np.eye(d, dtype=np.int64), central, m)
    matrices: List[np.ndarray] = [start]
    encodings: List[bytes] = [start_key]
    index: Dict[bytes, int] = {start_key: 0}
    words: List[BraidWord] = [BraidWord(n, ())]
    edges: List[List[int]] = []

    pool = ThreadPoolExecutor(max_workers=workers) if workers and workers > 1 else None
    try:
        frontier = [0]
        while frontier:
            jobs = [(matrices[k], gens, central, m) for k in frontier]
            expanded = list(pool.map(_expand, jobs)) if pool else [_expand(j) for j in jobs]
            next_frontier = []
            # merge strictly in frontier order so the parallel run matches the serial one
            for k, children in zip(frontier, expanded):
                row = []
                for letter, (key, rep) in zip(letters, children):
                    target = index.get(key)
                    if target is None:
                        target = len(encodings)
                        if target >= max_order:
                            raise GuardExceededError(
                                f"rho_{m}(B_{n}) has more than {max_order} elements"
                            )
                        index[key] = target
                        encodings.append(key)
                        matrices.append(rep)
                        words.append(BraidWord(n, words[k].letters + (letter,)))
                        next_frontier.append(target)
                    row.append(target)
                while len(edges) <= k:
                    edges.append([])
                edges[k] = row
            frontier = next_frontier
    finally:
        if pool:
            pool.shutdown()

    return d, letters, np.stack(matrices), tuple(encodings), index, np.array(edges, dtype=np.int64), tuple(words)


def _resolve_workers(workers: Optional[int]) -> Optional[int]:
    if workers is not None:
        return workers
    if env_bool("BRAIDCRYST_PARALLEL"):
        return setting("verify", "workers")
    return None


@lru_cache(maxsize=None)
def _enumerate_cached(m: int, n: int, letters: Tuple[int, ...]) -> FiniteMatrixGroup:
    return _enumerate(m, n, None, None, letters)


def _enumerate(
    m: int,
    n: int,
    central: Optional[np.ndarray],
    workers: Optional[int],
    letters: Tuple[int, ...],
) -> FiniteMatrixGroup:
    if m < 2:
        raise BraidCrystError(f"Modulus must be at least 2, got {m}")
    d = n - 1 if uses_reduced(n) else n
    if central is None:
        central = np.eye(d, dtype=np.int64)[None, :, :]
    max_order = setting("guards", "max_group_order")
    d, letters, matrices, encodings, index, edges, words = _bfs(n, m, central, workers, max_order, letters)
    G = FiniteMatrixGroup(
        modulus=m,
        strands=n,
        dimension=d,
        matrices=matrices,
        encodings=encodings,
        index=index,
        generator_labels=letters,
        edges=edges,
        transversal=words,
        central=central,
        center_quotient=len(central) > 1,
    )
    logger.debug("Enumerated %s: order %d", describe(G), G.order)
    return G


def enumerate_image(
    m: int,
    n: int = 3,
    workers: Optional[int] = None,
    letter_order: Optional[Iterable[int]] = None,
) -> FiniteMatrixGroup:
    """BFS closure of rho_m(B_n) from the generator images.

    ``workers > 1`` expands each BFS level on a thread pool; the merge order is
    fixed so the result is identical to the serial run.
    ``letter_order`` permutes the generator letters the BFS tries; it changes
    element numbering and the transversal but not the group.
    """
    letters = resolve_letter_order(n, letter_order)
    workers = _resolve_workers(workers)
    if workers and workers > 1:
        return _enumerate(m, n, None, workers, letters)
    return _enumerate_cached(m, n, letters)


def describe(G: FiniteMatrixGroup) -> str:
    base = f"rho_{G.modulus}(B_{G.strands})"
    return f"{base}/Z" if G.center_quotient else base


# ============================================================================
# Group operations
# ============================================================================

def multiply(G: FiniteMatrixGroup, i: int, j: int) -> int:
    key, _ = G.canonical((G.matrices[i] @ G.matrices[j]) % G.modulus)
    return G.index[key]


def power_index(G: FiniteMatrixGroup, g: int, k: int) -> int:
    result = 0
    for _ in range(k):
        result = multiply(G, result, g)
    return result


def element_order(G: FiniteMatrixGroup, g: int) -> int:
    k, current = 1, g
    while current != 0:
        current = multiply(G, current, g)
        k += 1
        if k > G.order:
            raise BraidCrystError(f"Element {g} has no finite order inside a group of order {G.order}")
    return k


def inverse_index(G: FiniteMatrixGroup, g: int) -> int:
    return power_index(G, g, element_order(G, g) - 1)


def positive_letters(G: FiniteMatrixGroup) -> Tuple[int, ...]:
    return tuple(l for l in G.generator_labels if l > 0)


def _conjugate_by_generator(G: FiniteMatrixGroup, g: int, letter: int) -> int:
    """Index of s g s^-1 for the generator s = ``letter``."""
    m = G.modulus
    S = G.generator_matrix(letter)
    S_inv = G.generator_matrix(-letter)
    key, _ = G.canonical((S @ G.matrices[g] @ S_inv) % m)
    return G.index[key]


def center(G: FiniteMatrixGroup) -> List[int]:
    """Elements commuting with every generator image (hence with everything)."""
    m = G.modulus
    result = []
    for g in range(G.order):
        M = G.matrices[g]
        commutes = True
        for letter in positive_letters(G):
            S = G.generator_matrix(letter)
            if G.canonical((M @ S) % m)[0] != G.canonical((S @ M) % m)[0]:
                commutes = False
                break
        if commutes:
            result.append(g)
    return result


def quotient_by_center(G: FiniteMatrixGroup, workers: Optional[int] = None) -> FiniteMatrixGroup:
    if G.center_quotient:
        raise BraidCrystError(f"{describe(G)} is already a center quotient")
    central = np.stack([G.matrices[z] for z in center(G)])
    return _enumerate(G.modulus, G.strands, central, _resolve_workers(workers), G.generator_labels)


def conjugacy_classes(G: FiniteMatrixGroup) -> List[List[int]]:
    """Orbits under conjugation by the generators, ordered by least member."""
    seen = np.full(G.order, -1, dtype=np.int64)
    classes: List[List[int]] = []
    positive = positive_letters(G)
    for g in range(G.order):
        if seen[g] >= 0:
            continue
        orbit = [g]
        seen[g] = len(classes)
        stack = [g]
        while stack:
            x = stack.pop()
            for letter in positive:
                y = _conjugate_by_generator(G, x, letter)
                if seen[y] < 0:
                    seen[y] = len(classes)
                    orbit.append(y)
                    stack.append(y)
        classes.append(sorted(orbit))
    return classes


def generated_subgroup(G: FiniteMatrixGroup, generators: Iterable[int]) -> List[int]:
    """Closure of ``generators`` (element indices) under multiplication."""
    gens = sorted(set(generators))
    members = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = multiply(G, x, s)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(members)


def is_subgroup(G: FiniteMatrixGroup, elements: Iterable[int]) -> bool:
    S = set(elements)
    if 0 not in S:
        return False
    return all(multiply(G, a, b) in S for a in S for b in S)


# ============================================================================
# Fingerprints and the catalog
# ============================================================================

@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    histogram: Tuple[Tuple[int, int], ...]
    center_order: int

    @classmethod
    def build(cls, order: int, orders: Iterable[int], center_order: int) -> "GroupFingerprint":
        counts: Dict[int, int] = {}
        for o in orders:
            counts[o] = counts.get(o, 0) + 1
        return cls(order, tuple(sorted(counts.items())), center_order)

    def histogram_dict(self) -> Dict[int, int]:
        return dict(self.histogram)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "histogram": {str(k): v for k, v in self.histogram},
            "center_order": self.center_order,
        }


def fingerprint(G: FiniteMatrixGroup) -> GroupFingerprint:
    return GroupFingerprint.build(
        G.order,
        (element_order(G, g) for g in range(G.order)),
        len(center(G)),
    )


def _permutation_fingerprint(P) -> GroupFingerprint:
    return GroupFingerprint.build(
        int(P.order()),
        (int(p.order()) for p in P.elements),
        int(P.center().order()),
    )


@lru_cache(maxsize=1)
def catalog() -> Dict[str, GroupFingerprint]:
    """Fingerprints of the reference groups, computed from sympy permutation groups."""
    from sympy.combinatorics.named_groups import AlternatingGroup, CyclicGroup, SymmetricGroup

    groups = {
        "S4": SymmetricGroup(4),
        "A4": AlternatingGroup(4),
        "A5": AlternatingGroup(5),
        "S3": SymmetricGroup(3),
    }
    for k in setting("catalog", "cyclic_orders"):
        groups[f"Z/{k}"] = CyclicGroup(k)
    entries = {name: _permutation_fingerprint(P) for name, P in groups.items()}

    seen: Dict[GroupFingerprint, str] = {}
    for name, fp in entries.items():
        if fp in seen:
            logger.warning("⚠️ Catalog groups %s and %s share a fingerprint", seen[fp], name)
        seen.setdefault(fp, name)
    return entries


def match_catalog(fp: GroupFingerprint) -> str:
    for name, entry in catalog().items():
        if entry == fp:
            return name
    return "unknown"


def to_json(G: FiniteMatrixGroup) -> dict:
    fp = fingerprint(G)
    return {
        "modulus": G.modulus,
        "strands": G.strands,
        "center_quotient": G.center_quotient,
        "order": G.order,
        "histogram": fp.to_json()["histogram"],
        "center_order": fp.center_order,
        "isomorphism_type": match_catalog(fp),
        "transversal": [format_word(w) for w in G.transversal],
    }
