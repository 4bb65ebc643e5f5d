from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import E
from semicanon.backend import EXACT, FloatBackend
from semicanon.errors import ContractViolation, HypothesisViolation
from semicanon.kernel import jordan_structure
from semicanon.operators import (
    check_reduced_form,
    is_indecomposable,
    metric_canon,
    reduce_bounded,
    selfadjoint_canon,
    seminormal_canonical_basis,
    seminormal_summands,
    t22_instance,
    trivial_t22,
    verify_t22,
)
from semicanon.scalars import GaussQ
from semicanon.semiunitary import (
    KVMatrix,
    OperatorSummand,
    SemiunitarySpace,
    apply_similarity,
    block_direct_sum,
    random_kv,
    random_transform,
    summand_to_kv,
    summands_to_kv,
)

spaces = st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))
seeds = st.integers(0, 2**31 - 1)


def kv(rows, m):
    return KVMatrix(E(rows), m)


def J(n, lam, l):
    return OperatorSummand(n, GaussQ(lam) if not isinstance(lam, GaussQ) else lam, l)


# ---------------------------------------------------------------- reduce_bounded


def test_reduce_bounded_examples():
    rf = reduce_bounded(kv([[1, 0], [5, 2]], 1))
    assert EXACT.is_zero_matrix(rf.result.A21)
    assert apply_similarity(kv([[1, 0], [5, 2]], 1), rf.transform) == rf.result
    rf = reduce_bounded(kv([[1, 0], [5, 1]], 1))
    assert rf.result.A21[0, 0] != 0
    A = summands_to_kv([J(2, 0, 1)])
    rf = reduce_bounded(A)
    assert rf.result == A and EXACT.equal(rf.transform.full, EXACT.eye(2))


def test_reduce_bounded_rejects_unbounded():
    with pytest.raises(ContractViolation):
        reduce_bounded(kv([[0, 1], [0, 0]], 1))


@given(spaces, seeds)
def test_reduce_bounded_contract(space, seed):
    A = random_kv(SemiunitarySpace(*space), "bounded", seed)
    rf = reduce_bounded(A)
    assert check_reduced_form(A, rf)
    assert apply_similarity(A, rf.transform) == rf.result


# ---------------------------------------------------------------- summands


def test_summand_examples():
    assert seminormal_summands(kv([[0, 0], [1, 0]], 1)) == [J(2, 0, 1)]
    assert seminormal_summands(kv([[0, 0], [0, 0]], 1)) == [J(1, 0, 1), J(1, 0, 0)]
    base = block_direct_sum(summand_to_kv(J(2, 1, 1)), summand_to_kv(J(3, 1, 0)))
    for seed in range(5):
        B = apply_similarity(base, random_transform(base.space, seed))
        assert Counter(seminormal_summands(B)) == Counter([J(2, 1, 1), J(3, 1, 0)])


def test_summand_contracts():
    with pytest.raises(ContractViolation):
        seminormal_summands(kv([[1, 1], [0, 1]], 2))
    with pytest.raises(ContractViolation):
        selfadjoint_canon(kv([["i"]], 1))
    with pytest.raises(ContractViolation):
        metric_canon(kv([[2]], 1))


def test_selfadjoint_and_metric_examples():
    assert selfadjoint_canon(kv([[2]], 1)) == [J(1, 2, 1)]
    out = metric_canon(kv([["i", 0], [0, 3]], 1))
    assert J(1, GaussQ(0, 1), 1) in out
    A = kv([[1, 0, 0], [0, "1+i", 0], [0, 1, "1+i"]], 1)
    assert J(2, GaussQ(1, 1), 0) in selfadjoint_canon(A)


@given(spaces, seeds)
def test_summand_bookkeeping(space, seed):
    A = random_kv(SemiunitarySpace(*space), "seminormal", seed)
    out = seminormal_summands(A)
    assert sum(s.n for s in out) == A.n
    assert sum(s.l for s in out) == A.m


@given(spaces, seeds)
def test_canonical_invariance(space, seed):
    sp = SemiunitarySpace(*space)
    A = random_kv(sp, "seminormal", seed)
    ref = seminormal_summands(A)
    B = apply_similarity(A, random_transform(sp, seed + 1))
    assert seminormal_summands(B) == ref


@given(spaces, seeds)
def test_two_algorithms_agree(space, seed):
    A = random_kv(SemiunitarySpace(*space), "seminormal", seed)
    S, C = seminormal_canonical_basis(A)
    assert apply_similarity(A, S) == C
    assert C == summands_to_kv(seminormal_summands(A))
    assert EXACT.is_unitary(S.S11)


def test_canonical_basis_examples():
    A = summands_to_kv([J(1, 0, 1), J(2, 1, 1)])
    S, C = seminormal_canonical_basis(A)
    assert C == A and EXACT.equal(S.full, EXACT.eye(3))
    base = summands_to_kv([J(2, 0, 1)])
    B = apply_similarity(base, random_transform(base.space, 5))
    S, C = seminormal_canonical_basis(B)
    assert C == kv([[0, 0], [1, 0]], 1)
    assert EXACT.equal(EXACT.mm(B.mat, S.full), EXACT.mm(S.full, C.mat))
    S, C = seminormal_canonical_basis(kv([[3, 0], [0, 4]], 1))
    assert C == block_direct_sum(summand_to_kv(J(1, 3, 1)), summand_to_kv(J(1, 4, 0)))


def test_float_backend_matches_exact():
    fb = FloatBackend()
    for seed in range(10):
        A = random_kv(SemiunitarySpace(5, 2), "seminormal", seed)
        F = KVMatrix(EXACT.to_complex(A.mat), 2, fb)
        ex = seminormal_summands(A)
        fl = seminormal_summands(F)
        assert [(s.n, s.l) for s in ex] == [(s.n, s.l) for s in fl]
        assert all(abs(complex(a.lam) - complex(b.lam)) < 1e-6 for a, b in zip(ex, fl))
        S, C = seminormal_canonical_basis(F)
        assert np.allclose(F.mat @ S.full, S.full @ C.mat, atol=1e-8)


# ---------------------------------------------------------------- multiplicity inequalities


def test_verify_t22_examples():
    rep = verify_t22(kv([[5, 0, 0], [1, 5, 0], [0, 1, 5]], 1))
    (e,) = rep.eigenvalues
    assert e.lam == GaussQ(5) and e.shared
    assert (e.alg_mult_A1, e.geom_mult_A0, e.geom_mult_A1) == (1, 1, 1)
    assert e.jordan_counts_A0 == {2: 1}
    assert rep.all_pass
    rep = verify_t22(trivial_t22())
    assert rep.all_pass
    (e,) = rep.eigenvalues
    assert (e.alg_mult_A1, e.geom_mult_A0, e.geom_mult_A1) == (1, 1, 1)


def test_verify_t22_hypothesis():
    with pytest.raises(HypothesisViolation):
        verify_t22(kv([[1, 0], [0, 1]], 0))
    with pytest.raises(HypothesisViolation):
        verify_t22(kv([[1]], 1))


def test_t22_instance_examples():
    A = t22_instance(1, [0, 1], seed=0)
    assert (A.n, A.m) == (3, 1)
    assert A == t22_instance(1, [0, 1], seed=0)
    assert is_indecomposable(A)
    with pytest.raises(ContractViolation):
        t22_instance(1, [2])


def test_decomposable_is_detected():
    assert not is_indecomposable(kv([[0, 0], [0, 0]], 1))


def t22_shape(rng):
    """Distinct chain lengths, fewer chains than unitary dimensions, n <= 10."""
    while True:
        k = int(rng.integers(2, 5))
        counts = [int(rng.integers(0, 2)) for _ in range(int(rng.integers(1, 5)))]
        p = sum(counts)
        n = k + sum((i + 1) * c for i, c in enumerate(counts))
        if 1 <= p < k and n <= 10:
            return k, counts


@pytest.mark.parametrize("seed", range(10))
def test_t22_instances_pass(seed):
    rng = np.random.default_rng(seed)
    k, counts = t22_shape(rng)
    A = t22_instance(k, counts, lam=GaussQ(int(rng.integers(-2, 3))), seed=seed, conjugate=True)
    assert verify_t22(A).all_pass
    sizes = jordan_structure(A.A22).sizes
    assert sum(len(v) for v in sizes.values()) == sum(counts)
