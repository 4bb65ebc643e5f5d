"""Canonical forms of operators, Hermitian forms and block systems on semiunitary spaces."""

from .backend import EXACT, ExactBackend, FloatBackend, get_backend
from .errors import (
    ContractViolation,
    HypothesisViolation,
    IndeterminateSpectrum,
    InternalInconsistency,
    MalformedInput,
    NoUniqueSolution,
    NonConvergence,
    NotRepresentable,
    NumericFailure,
    SemicanonError,
    UnsupportedSpectrum,
)
from .hermitian import hermitian_canon, hermitian_summand_signature
from .operators import (
    metric_canon,
    reduce_bounded,
    selfadjoint_canon,
    seminormal_canonical_basis,
    seminormal_summands,
    t22_instance,
    verify_t22,
)
from .reduced import (
    QuiverSpec,
    ReducedAlgebraSpec,
    belitskii,
    canonicalize,
    decide_similar,
    group_sample,
    littlewood,
    quiver_encode,
    semiunitary_similarity,
)
from .scalars import DEFAULT_POLICY, EXACT_POLICY, GaussQ, TolerancePolicy, parse_gauss
from .semiunitary import (
    HermitianSummand,
    KVMatrix,
    OperatorSummand,
    SemiunitarySpace,
    SemiunitaryTransform,
    apply_similarity,
    apply_star_congruence,
    block_direct_sum,
    is_bounded,
    is_metric,
    is_selfadjoint,
    is_seminormal,
    random_kv,
    random_transform,
    summands_to_kv,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
