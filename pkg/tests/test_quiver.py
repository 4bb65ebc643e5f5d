import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from helpers import E
from semicanon.backend import EXACT
from semicanon.errors import ContractViolation, UnsupportedSpectrum
from semicanon.kernel import rank
from semicanon.operators import seminormal_summands
from semicanon.reduced import (
    QuiverSpec,
    canonicalize,
    decide_similar,
    is_group_member,
    kv_to_isotropic_first,
    quiver_encode,
    quiver_layout,
)
from semicanon.semiunitary import SemiunitarySpace, apply_similarity, random_kv, random_transform

seeds = st.integers(0, 2**31 - 1)

KRONECKER = QuiverSpec(
    vertices=(("u", 2, 1), ("v", 1, 1)),
    arrows=(("a", "u", "v"), ("b", "u", "v"), ("c", "v", "u")),
)


def act(q, matrices, transforms):
    """Arrow matrices after changing the basis of every vertex space."""
    out = {}
    for a, s, t in q.arrows:
        St, Ss = transforms[t], transforms[s]
        out[a] = EXACT.mm(EXACT.inv(St), EXACT.asarray(matrices[a]), Ss)
    return out


def random_arrows(q, rng):
    dims = q.dims()
    out = {}
    for a, s, t in q.arrows:
        out[a] = random_kv(SemiunitarySpace(max(dims[t][0], dims[s][0]), 0), "general", rng).mat[
            : dims[t][0], : dims[s][0]
        ]
    return out


def test_empty_quiver():
    M, spec = quiver_encode(QuiverSpec((), ()), {})
    assert M.shape == (0, 0)
    assert spec.n == 0
    assert canonicalize(M, spec).M_can.shape == (0, 0)


def test_single_loop_gives_semiunitary_algebra():
    q = QuiverSpec((("x", 3, 1),), (("A", "x", "x"),))
    A = random_kv(SemiunitarySpace(3, 1), "general", 5)
    M, spec = quiver_encode(q, {"A": A.mat})
    assert spec.sizes == (2, 1)
    assert spec.unitary == frozenset({1})
    assert not spec.equations
    assert EXACT.equal(M, kv_to_isotropic_first(A.mat, 1))


@given(seeds)
def test_single_loop_orbits_match_semiunitary_similarity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = int(rng.integers(0, n + 1))
    q = QuiverSpec((("x", n, m),), (("A", "x", "x"),))
    sp = SemiunitarySpace(n, m)
    A = random_kv(sp, "seminormal", rng)
    B = apply_similarity(A, random_transform(sp, rng))
    C = random_kv(sp, "seminormal", rng)
    MA, spec = quiver_encode(q, {"A": A.mat})
    MB, _ = quiver_encode(q, {"A": B.mat})
    MC, _ = quiver_encode(q, {"A": C.mat})
    assert decide_similar(MA, MB, spec)
    assert decide_similar(MA, MC, spec) == (seminormal_summands(A) == seminormal_summands(C))


def test_single_arrow_rank_normal_form(rng):
    q = QuiverSpec((("u", 3, 0), ("v", 2, 0)), (("a", "u", "v"),))
    for _ in range(5):
        X = random_kv(SemiunitarySpace(3, 0), "general", rng).mat[:2, :]
        X[1, :] = X[0, :] * EXACT.scalar(2)  # rank one
        M, spec = quiver_encode(q, {"a": X})
        r = canonicalize(M, spec)
        # the arrow lands in rows of v and columns of u; only a rank-sized identity survives
        assert not any(r.M_can[:3, :].ravel()) and not any(r.M_can[:, 3:].ravel())
        nonzero = [x for row in r.M_can for x in row if x]
        assert nonzero == [EXACT.scalar(1)] * rank(X)


def test_kronecker_layout():
    strips, placement = quiver_layout(KRONECKER)
    # two parallel arrows into v need two copies of v
    assert [s for s in strips if s[0] == "v"] == [("v", 0, 0), ("v", 0, 1), ("v", 1, 0), ("v", 1, 1)]
    assert placement["a"] != placement["b"]
    M, spec = quiver_encode(KRONECKER, {"a": E([[1, 0]]), "b": E([[0, 1]]), "c": E([[1], [0]])})
    # u contributes strips of sizes (1, 1); each copy of v contributes (0, 1)
    assert spec.sizes == (1, 1, 0, 1, 0, 1) and M.shape == (4, 4)
    # the copies of v are tied and their unitary strips are unitary
    v_strips = [k for k, s in enumerate(strips) if s[0] == "v"]
    assert spec.same_class(v_strips[0], v_strips[2]) and spec.same_class(v_strips[1], v_strips[3])
    assert {k for k, s in enumerate(strips) if s[2] == 1} == set(spec.unitary)


def test_kronecker_orbits(rng):
    mats = {"a": E([[1, 0]]), "b": E([[0, 1]]), "c": E([[1], [2]])}
    M, spec = quiver_encode(KRONECKER, mats)
    for seed in range(3):
        T = {v: random_transform(SemiunitarySpace(n, m), seed * 7 + k).full for k, (v, n, m) in enumerate(KRONECKER.vertices)}
        N, _ = quiver_encode(KRONECKER, act(KRONECKER, mats, T))
        r = canonicalize(M, spec)
        assert is_group_member(r.S, spec, EXACT)
        assert decide_similar(M, N, spec)


@given(seeds)
def test_two_vertex_orbits(seed):
    rng = np.random.default_rng(seed)
    q = QuiverSpec(
        (("u", int(rng.integers(1, 3)), 0), ("v", 2, 1)),
        (("a", "u", "v"), ("b", "v", "v")),
    )
    mats = random_arrows(q, rng)
    mats["b"] = random_kv(SemiunitarySpace(2, 1), "seminormal", rng).mat
    T = {v: random_transform(SemiunitarySpace(n, m), rng).full for v, n, m in q.vertices}
    M, spec = quiver_encode(q, mats)
    N, _ = quiver_encode(q, act(q, mats, T))
    try:
        assert decide_similar(M, N, spec)
    except UnsupportedSpectrum:
        assume(False)


def test_inconsistent_dims_rejected():
    q = QuiverSpec((("u", 2, 1),), (("a", "u", "u"),))
    with pytest.raises(ContractViolation):
        quiver_encode(q, {"a": E([[1]])})


def test_unknown_vertex_rejected():
    with pytest.raises(ContractViolation):
        QuiverSpec((("u", 1, 0),), (("a", "u", "w"),))


def test_from_dict():
    q = QuiverSpec.from_dict(
        {"vertices": [{"name": "u", "n": 2, "m": 1}], "arrows": [{"name": "a", "source": "u", "target": "u"}]}
    )
    assert q.dims() == {"u": (2, 1)}
