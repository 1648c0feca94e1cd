from .braids import BraidWord, full_twist, is_trivial_b3, parse_word, pure_generator
from .burau import ResidueMatrix, burau_image, in_congruence, rho_m
from .crystallography import (
    build_extension,
    crystallographic_verdict,
    hirsch_length,
    rank_M,
    torsion_test,
    witt_rank,
)
from .finite_image import FiniteMatrixGroup, enumerate_image, quotient_by_center
from .free_groups import SubgroupGraph, build_and_fold, kernel_check
from .rewriting import abelianization, build_coset_context, class_of

__all__ = [
    "BraidWord",
    "full_twist",
    "is_trivial_b3",
    "parse_word",
    "pure_generator",
    "ResidueMatrix",
    "burau_image",
    "in_congruence",
    "rho_m",
    "FiniteMatrixGroup",
    "enumerate_image",
    "quotient_by_center",
    "abelianization",
    "build_coset_context",
    "class_of",
    "SubgroupGraph",
    "build_and_fold",
    "kernel_check",
    "build_extension",
    "crystallographic_verdict",
    "torsion_test",
    "witt_rank",
    "hirsch_length",
    "rank_M",
]
