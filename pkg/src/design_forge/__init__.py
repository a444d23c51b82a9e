"""Constructions and verifiers for GDDs, PBDs and transversal designs."""

from .algebra import (
    DifferenceFamily,
    develop_difference_family,
    gf_build,
    search_difference_family,
)
from .constructions import (
    TruncatedTd,
    build_affine_plane,
    build_projective_plane,
    build_td,
    delete_point,
    truncate_td,
)
from .core import (
    BlockSizeSet,
    Design,
    GddType,
    VerificationReport,
    compute_type,
    verify_gdd,
    verify_parallel_class,
    verify_pbd,
    verify_td,
)
from .parallel import (
    DisjointBlockSet,
    Ingredients,
    PipelineResult,
    Theorem1Params,
    Theorem3Params,
    corollary2,
    corollary5,
    find_disjoint_blocks_exact,
    find_disjoint_blocks_greedy,
    lemma4_bound,
    parallel_class_from_td,
    theorem1,
    theorem3,
)
from .wfc import IngredientRequest, align_ingredient, apply_wfc

__version__ = "0.1.0"

__all__ = [
    "BlockSizeSet",
    "Design",
    "DifferenceFamily",
    "DisjointBlockSet",
    "GddType",
    "IngredientRequest",
    "Ingredients",
    "PipelineResult",
    "Theorem1Params",
    "Theorem3Params",
    "TruncatedTd",
    "VerificationReport",
    "align_ingredient",
    "apply_wfc",
    "build_affine_plane",
    "build_projective_plane",
    "build_td",
    "compute_type",
    "corollary2",
    "corollary5",
    "delete_point",
    "develop_difference_family",
    "find_disjoint_blocks_exact",
    "find_disjoint_blocks_greedy",
    "gf_build",
    "lemma4_bound",
    "parallel_class_from_td",
    "search_difference_family",
    "theorem1",
    "theorem3",
    "truncate_td",
    "verify_gdd",
    "verify_parallel_class",
    "verify_pbd",
    "verify_td",
]
