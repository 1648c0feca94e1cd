"""Stallings foldings for finitely generated subgroups of a free group F_k.

Words are tuples of signed letters in 1..k (``-j`` is the inverse of ``j``).
A folded graph is stored with positive-label edges only; the reverse
direction is implied.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .braids import free_reduce
from .errors import MalformedWordError

FreeWord = Tuple[int, ...]
Edge = Tuple[int, int, int]


# ============================================================================
# Words
# ============================================================================

def free_inverse(w: Sequence[int]) -> FreeWord:
    return tuple(-l for l in reversed(w))


def free_product(*words: Sequence[int]) -> FreeWord:
    return free_reduce(l for w in words for l in w)


def free_commutator(a: Sequence[int], b: Sequence[int]) -> FreeWord:
    """``[a, b] = a b a^-1 b^-1``."""
    return free_product(a, b, free_inverse(a), free_inverse(b))


def parse_free_word(text: str, alphabet: str = "xyzw") -> FreeWord:
    """Read ``"x y X Y"``, ``"xyXY"`` or ``"1 2 -1 -2"``; capitals are inverses."""
    letters: List[int] = []
    for token in re.split(r"[\s,]+", text.strip()):
        if not token:
            continue
        if re.fullmatch(r"[+-]?\d+", token):
            if int(token) == 0:
                raise MalformedWordError(f"Letter 0 in free word '{text}'")
            letters.append(int(token))
            continue
        for ch in token:
            k = alphabet.find(ch.lower())
            if k < 0:
                raise MalformedWordError(f"Unknown letter '{ch}' in free word '{text}' (alphabet {alphabet})")
            letters.append(k + 1 if ch.islower() else -(k + 1))
    return free_reduce(letters)


def format_free_word(w: Sequence[int], alphabet: str = "xyzw") -> str:
    if not w:
        return "1"
    if max(abs(l) for l in w) > len(alphabet):
        return " ".join(str(l) for l in w)
    return "".join(alphabet[l - 1] if l > 0 else alphabet[-l - 1].upper() for l in w)


# ============================================================================
# Folding
# ============================================================================

class _Folder:
    """Union-find over vertices; out-edges keyed by signed label."""

    def __init__(self):
        self.parent: List[int] = [0]
        self.out: List[Dict[int, int]] = [{}]

    def new_vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def _union(self, u: int, w: int) -> List[Edge]:
        u, w = self.find(u), self.find(w)
        if u == w:
            return []
        root, loser = min(u, w), max(u, w)
        self.parent[loser] = root
        moved = [(root, label, dst) for label, dst in self.out[loser].items()]
        self.out[loser] = {}
        return moved

    def attach(self, v: int, label: int, w: int):
        pending: List[Edge] = [(v, label, w)]
        while pending:
            v, label, w = pending.pop()
            for src, lab, dst in ((v, label, w), (w, -label, v)):
                src, dst = self.find(src), self.find(dst)
                existing = self.out[src].get(lab)
                if existing is None:
                    self.out[src][lab] = dst
                elif self.find(existing) != dst:
                    pending.extend(self._union(existing, dst))

    def edges(self) -> Dict[int, Dict[int, int]]:
        graph: Dict[int, Dict[int, int]] = {}
        for v in range(len(self.parent)):
            if self.find(v) != v:
                continue
            graph[v] = {lab: self.find(dst) for lab, dst in self.out[v].items()}
        return graph


def _prune(graph: Dict[int, Dict[int, int]], base: int):
    leaves = [v for v, out in graph.items() if v != base and len(out) <= 1]
    while leaves:
        v = leaves.pop()
        if v not in graph:
            continue
        for lab, dst in graph.pop(v).items():
            if dst in graph:
                graph[dst].pop(-lab, None)
                if dst != base and len(graph[dst]) <= 1:
                    leaves.append(dst)


def _label_order(k: int) -> List[int]:
    return [l for j in range(1, k + 1) for l in (j, -j)]


def _relabel(graph: Dict[int, Dict[int, int]], base: int, k: int) -> Tuple[int, Tuple[Edge, ...]]:
    new_id = {base: 0}
    queue = [base]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for lab in _label_order(k):
            dst = graph[v].get(lab)
            if dst is not None and dst not in new_id:
                new_id[dst] = len(new_id)
                queue.append(dst)
    edges = sorted(
        (new_id[v], lab, new_id[dst])
        for v, out in graph.items()
        for lab, dst in out.items()
        if lab > 0
    )
    return len(new_id), tuple(edges)


@dataclass(frozen=True)
class SubgroupGraph:
    """Folded core graph of a subgroup of F_k, vertices relabelled by BFS from base 0."""

    alphabet_size: int
    vertices: int
    edges: Tuple[Edge, ...]
    base: int = 0
    folded: bool = True

    @cached_property
    def out(self) -> Dict[int, Dict[int, int]]:
        table: Dict[int, Dict[int, int]] = {v: {} for v in range(self.vertices)}
        for src, lab, dst in self.edges:
            table[src][lab] = dst
            table[dst][-lab] = src
        return table


def build_and_fold(generators: Iterable[Sequence[int]], k: Optional[int] = None) -> SubgroupGraph:
    """Wedge of loops at the base, folded to confluence and pruned to its core."""
    words = [free_reduce(g) for g in generators]
    if k is None:
        k = max((abs(l) for w in words for l in w), default=1)
    folder = _Folder()
    for w in words:
        if any(abs(l) > k or l == 0 for l in w):
            raise MalformedWordError(f"Word {w} uses letters outside 1..{k}")
        current = 0
        for i, letter in enumerate(w):
            nxt = 0 if i == len(w) - 1 else folder.new_vertex()
            folder.attach(current, letter, nxt)
            current = folder.find(nxt)
    graph = folder.edges()
    _prune(graph, 0)
    vertices, edges = _relabel(graph, 0, k)
    return SubgroupGraph(k, vertices, edges)


def rank(G: SubgroupGraph) -> int:
    return len(G.edges) - G.vertices + 1


def index(G: SubgroupGraph) -> Optional[int]:
    """Number of vertices when every vertex has all 2k directions, ``None`` (infinite) otherwise."""
    full = 2 * G.alphabet_size
    if all(len(G.out[v]) == full for v in range(G.vertices)):
        return G.vertices
    return None


def contains(G: SubgroupGraph, w: Sequence[int]) -> bool:
    v = G.base
    for letter in free_reduce(w):
        v = G.out[v].get(letter)
        if v is None:
            return False
    return v == G.base


def is_folded(G: SubgroupGraph) -> bool:
    seen = set()
    for src, lab, dst in G.edges:
        for key in ((src, lab), (dst, -lab)):
            if key in seen:
                return False
            seen.add(key)
    return True


def is_core(G: SubgroupGraph) -> bool:
    return all(len(G.out[v]) >= 2 for v in range(G.vertices) if v != G.base)


def canonical_form(G: SubgroupGraph) -> Tuple[int, int, Tuple[Edge, ...]]:
    return (G.alphabet_size, G.vertices, G.edges)


def to_json(G: SubgroupGraph) -> dict:
    idx = index(G)
    return {
        "alphabet_size": G.alphabet_size,
        "vertices": G.vertices,
        "base": G.base,
        "edges": [list(e) for e in G.edges],
        "rank": rank(G),
        "index": idx if idx is not None else "infinite",
    }


# ============================================================================
# Kernel certificates and stabilisers
# ============================================================================

@dataclass(frozen=True)
class KernelVerdict:
    generators_in_kernel: bool
    index: Optional[int]
    target_order: int
    rank: int

    @property
    def certified(self) -> bool:
        return self.generators_in_kernel and self.index == self.target_order

    def to_json(self) -> dict:
        return {
            "generators_in_kernel": self.generators_in_kernel,
            "index": self.index if self.index is not None else "infinite",
            "target_order": self.target_order,
            "rank": self.rank,
            "certified": self.certified,
        }


def kernel_check(generators: Sequence[Sequence[int]], moduli: Sequence[int]) -> KernelVerdict:
    """Does <generators> equal the kernel of F_k -> Z/m_1 x ... x Z/m_k, x_j -> e_j?

    All generators in the kernel plus graph index equal to the target order
    certify equality.
    """
    k = len(moduli)
    in_kernel = True
    for g in generators:
        exps = [0] * k
        for letter in g:
            if abs(letter) > k:
                raise MalformedWordError(f"Word {tuple(g)} uses letters outside 1..{k}")
            exps[abs(letter) - 1] += 1 if letter > 0 else -1
        if any(e % m for e, m in zip(exps, moduli)):
            in_kernel = False
    G = build_and_fold(generators, k)
    return KernelVerdict(in_kernel, index(G), prod(moduli), rank(G))


def stabilizer_subgroup(perms: Sequence[Sequence[int]]) -> List[FreeWord]:
    """Schreier generators of the stabiliser of point 0.

    ``perms[j - 1][p]`` is the image of point p under letter j (right action).
    """
    k = len(perms)
    inverse = [[0] * len(p) for p in perms]
    for j, p in enumerate(perms):
        for a, b in enumerate(p):
            inverse[j][b] = a

    transversal: Dict[int, FreeWord] = {0: ()}
    tree = set()
    queue = [0]
    head = 0
    while head < len(queue):
        p = queue[head]
        head += 1
        for lab in _label_order(k):
            q = perms[lab - 1][p] if lab > 0 else inverse[-lab - 1][p]
            if q not in transversal:
                transversal[q] = transversal[p] + (lab,)
                tree.add((p, lab) if lab > 0 else (q, -lab))
                queue.append(q)

    generators = []
    for p in sorted(transversal):
        for j in range(1, k + 1):
            if (p, j) in tree:
                continue
            q = perms[j - 1][p]
            generators.append(free_product(transversal[p], (j,), free_inverse(transversal[q])))
    return generators
