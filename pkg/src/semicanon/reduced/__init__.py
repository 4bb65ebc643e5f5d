"""Canonical matrices under similarity by reduced block triangular algebras."""

from .algorithm import (
    AdditionMap,
    AlgorithmState,
    CanonicalResult,
    addition_map,
    block_order,
    canonicalize,
    case_I,
    case_II,
    decide_similar,
    is_stable,
)
from .quiver import QuiverSpec, quiver_encode, quiver_layout
from .spec import (
    ReducedAlgebraSpec,
    belitskii,
    flip_permutation,
    group_sample,
    is_group_member,
    isotropic_first_to_kv,
    kv_to_isotropic_first,
    littlewood,
    semiunitary_similarity,
)

__all__ = [
    "AdditionMap",
    "AlgorithmState",
    "CanonicalResult",
    "QuiverSpec",
    "ReducedAlgebraSpec",
    "addition_map",
    "belitskii",
    "block_order",
    "canonicalize",
    "case_I",
    "case_II",
    "decide_similar",
    "flip_permutation",
    "group_sample",
    "is_group_member",
    "is_stable",
    "isotropic_first_to_kv",
    "kv_to_isotropic_first",
    "littlewood",
    "quiver_encode",
    "quiver_layout",
    "semiunitary_similarity",
]
