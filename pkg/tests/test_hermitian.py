import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import E
from semicanon.backend import EXACT, FloatBackend
from semicanon.errors import ContractViolation
from semicanon.hermitian import hermitian_canon, hermitian_summand_signature
from semicanon.kernel import hermitian_inertia
from semicanon.scalars import GaussQ
from semicanon.semiunitary import (
    HermitianSummand,
    KVMatrix,
    SemiunitarySpace,
    apply_star_congruence,
    random_kv,
    random_transform,
    summands_to_kv,
)

spaces = st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))
seeds = st.integers(0, 2**31 - 1)
H = HermitianSummand


def kinds(summ):
    return [s.kind for s in summ]


def test_examples():
    _, s = hermitian_canon(KVMatrix(E([[0, 1], [1, 0]]), 1))
    assert s == [H("Pair1")]
    _, s = hermitian_canon(KVMatrix(E([[3]]), 1))
    assert s == [H("RealDiag1", GaussQ(3))]
    _, s = hermitian_canon(KVMatrix(E([[1, 0, 0], [0, -1, 0], [0, 0, 0]]), 0))
    assert kinds(s) == ["PlusOne0", "MinusOne0", "Zero0"]


def test_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        hermitian_canon(KVMatrix(E([[0, 1], [0, 0]]), 1))


def test_signature_examples():
    a = [H("Pair1"), H("RealDiag1", GaussQ(2))]
    assert hermitian_summand_signature(a) == (1, (GaussQ(2),), 0, 0, 0)
    assert hermitian_summand_signature(a[::-1]) == hermitian_summand_signature(a)
    assert hermitian_summand_signature([]) == (0, (), 0, 0, 0)


@given(spaces, seeds)
def test_witness_and_bookkeeping(space, seed):
    F = random_kv(SemiunitarySpace(*space), "hermitian-form", seed)
    S, summ = hermitian_canon(F)
    assert apply_star_congruence(F, S) == summands_to_kv(summ)
    assert EXACT.is_unitary(S.S11)
    k = kinds(summ)
    assert k.count("Pair1") + k.count("RealDiag1") == F.m
    assert 2 * k.count("Pair1") + k.count("RealDiag1") + k.count("PlusOne0") + k.count("MinusOne0") + k.count(
        "Zero0"
    ) == F.n


@given(spaces, seeds)
def test_congruence_invariance(space, seed):
    sp = SemiunitarySpace(*space)
    F = random_kv(sp, "hermitian-form", seed)
    ref = hermitian_summand_signature(hermitian_canon(F)[1])
    G = apply_star_congruence(F, random_transform(sp, seed + 1))
    assert hermitian_summand_signature(hermitian_canon(G)[1]) == ref


@given(spaces, seeds)
def test_inertia_consistency(space, seed):
    F = random_kv(SemiunitarySpace(*space), "hermitian-form", seed)
    _, summ = hermitian_canon(F)
    k = kinds(summ)
    _, p, q, _ = hermitian_inertia(F.A22)
    w = np.linalg.eigvalsh(EXACT.to_complex(F.A22)) if F.n > F.m else np.zeros(0)
    assert (p, q) == (int((w > 1e-9).sum()), int((w < -1e-9).sum()))
    assert k.count("PlusOne0") - k.count("MinusOne0") == p - q


def test_float_backend_matches_exact():
    fb = FloatBackend()
    for seed in range(10):
        F = random_kv(SemiunitarySpace(5, 2), "hermitian-form", seed)
        Ff = KVMatrix(EXACT.to_complex(F.mat), 2, fb)
        S, summ = hermitian_canon(Ff)
        ex = hermitian_canon(F)[1]
        assert kinds(summ) == kinds(ex)
        for a, b in zip(summ, ex):
            if a.kind == "RealDiag1":
                assert abs(complex(a.value) - complex(b.value)) < 1e-8
