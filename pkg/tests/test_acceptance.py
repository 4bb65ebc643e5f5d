"""Acceptance criteria 1 to 11, each printing one PASS/FAIL line.

Every criterion runs at its full size and time limit. Inputs are drawn
from fixed seeds. Draws whose canonical form would need numbers outside
Q(i) are redrawn, and the redraw count is reported on the PASS line.
"""

import functools
import json
import os
import time
from collections import Counter

import numpy as np
import sympy

from conftest import FIXTURES

from semicanon.backend import EXACT, FloatBackend, ct
from semicanon.errors import UnsupportedSpectrum
from semicanon.hermitian import hermitian_canon, hermitian_summand_signature
from semicanon.kernel import weyr_form
from semicanon.operators import (
    metric_canon,
    reduce_bounded,
    selfadjoint_canon,
    seminormal_canonical_basis,
    seminormal_summands,
    t22_instance,
    verify_t22,
)
from semicanon.reduced import (
    QuiverSpec,
    belitskii,
    canonicalize,
    decide_similar,
    group_sample,
    is_group_member,
    kv_to_isotropic_first,
    littlewood,
    quiver_encode,
    semiunitary_similarity,
)
from semicanon.scalars import GaussQ
from semicanon.semiunitary import (
    KVMatrix,
    SemiunitarySpace,
    apply_similarity,
    apply_star_congruence,
    random_hermitian_summands,
    random_kv,
    random_operator_summands,
    random_transform,
    sort_summands,
    summands_to_kv,
)
from semicanon.serialize import MatrixDocument


def criterion(num, title, limit):
    """Time the body, enforce the limit and print one PASS/FAIL line."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            capsys = kwargs["capsys"]
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
            except BaseException as exc:
                elapsed = time.perf_counter() - t0
                with capsys.disabled():
                    print(f"\nFAIL criterion {num} ({title}) {elapsed:.1f}s: {exc}")
                raise
            with capsys.disabled():
                print(f"\nPASS criterion {num} ({title}) {elapsed:.1f}s/{limit}s: {detail}")

        return run

    return wrap


def sorted_summands(summands):
    return sort_summands(list(summands))


def space(rng, nmax):
    n = int(rng.integers(1, nmax + 1))
    return SemiunitarySpace(n, int(rng.integers(0, n + 1)))


# ------------------------------------------------------------------ 1, 2


@functools.lru_cache(maxsize=None)
def seminormal_cases():
    rng = np.random.default_rng(101)
    cases = []
    for _ in range(200):
        sp = space(rng, 8)
        summ = random_operator_summands(sp.n, sp.m, rng)
        A = random_kv(sp, "seminormal", rng, summands=summ)
        cases.append((sp, summ, A))
    return cases


@criterion(1, "seminormal summands invariant under 3 conjugations", 60)
def test_criterion_01(capsys):
    rng = np.random.default_rng(1)
    cases = seminormal_cases()
    for sp, summ, A in cases:
        ref = seminormal_summands(A)
        # oracle: the summands the input was built from
        assert Counter(ref) == Counter(summ)
        for _ in range(3):
            B = apply_similarity(A, random_transform(sp, rng))
            assert seminormal_summands(B) == ref
    return f"{len(cases)} operators, n <= 8, 600 conjugates"


@criterion(2, "canonical basis witness", 60)
def test_criterion_02(capsys):
    cases = seminormal_cases()
    for sp, summ, A in cases:
        S, C = seminormal_canonical_basis(A)
        expect = summands_to_kv(sorted_summands(summ))
        assert EXACT.equal(C.mat, expect.mat)
        assert EXACT.equal(EXACT.mm(EXACT.inv(S.full), A.mat, S.full), expect.mat)
        assert EXACT.equal(EXACT.mm(ct(S.S11), S.S11), EXACT.eye(sp.m))
        assert EXACT.is_zero_matrix(S.full[: sp.m, sp.m :])
    return f"{len(cases)} witnesses replayed exactly, unitary leading blocks"


# --------------------------------------------------------------------- 3


@criterion(3, "selfadjoint and metric eigenvalue constraints", 30)
def test_criterion_03(capsys):
    rng = np.random.default_rng(3)
    for kind, canon, ok in (
        ("selfadjoint", selfadjoint_canon, lambda z: z.imag == 0),
        ("metric", metric_canon, lambda z: z.re * z.re + z.im * z.im == 1),
    ):
        for _ in range(100):
            A = random_kv(space(rng, 6), kind, rng)
            for s in canon(A):
                if s.l == 1:
                    assert ok(GaussQ(s.lam) if not isinstance(s.lam, GaussQ) else s.lam), (kind, s)
    return "100 selfadjoint (real) and 100 metric (unit modulus) instances"


# --------------------------------------------------------------------- 4


def descartes_inertia(H):
    """(#positive, #negative) eigenvalues of a Hermitian matrix, exactly.

    The characteristic polynomial of a Hermitian matrix is real with only
    real roots, so Descartes' rule of signs counts the positive roots.
    """
    n = H.shape[0]
    if n == 0:
        return 0, 0
    M = sympy.Matrix(n, n, lambda i, j: sympy.Rational(str(H[i, j].re)) + sympy.I * sympy.Rational(str(H[i, j].im)))
    x = sympy.Symbol("x")
    coeffs = [sympy.nsimplify(sympy.expand(c)) for c in M.charpoly(x).all_coeffs()]

    def variations(cs):
        signs = [sympy.sign(c) for c in cs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    pos = variations(coeffs)
    neg = variations([c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)])
    return pos, neg


@criterion(4, "Hermitian census invariant under 3 congruences, inertia oracle", 60)
def test_criterion_04(capsys):
    rng = np.random.default_rng(4)
    for _ in range(200):
        sp = space(rng, 8)
        summ = random_hermitian_summands(sp.n, sp.m, rng)
        F = random_kv(sp, "hermitian-form", rng, summands=summ)
        _, got = hermitian_canon(F)
        ref = hermitian_summand_signature(got)
        assert ref == hermitian_summand_signature(summ)
        for _ in range(3):
            G = apply_star_congruence(F, random_transform(sp, rng))
            assert hermitian_summand_signature(hermitian_canon(G)[1]) == ref
        kinds = Counter(s.kind for s in got)
        pos, neg = descartes_inertia(F.A22)
        assert kinds["PlusOne0"] - kinds["MinusOne0"] == pos - neg
    return "200 forms, n <= 8, 600 congruences, signature matches Descartes count"


# --------------------------------------------------------------------- 5


def t22_shape(rng):
    while True:
        k = int(rng.integers(2, 5))
        counts = [int(rng.integers(0, 2)) for _ in range(int(rng.integers(1, 5)))]
        p = sum(counts)
        if 1 <= p < k and k + sum((i + 1) * c for i, c in enumerate(counts)) <= 10:
            return k, counts


@criterion(5, "multiplicity inequalities on indecomposable instances", 30)
def test_criterion_05(capsys):
    rng = np.random.default_rng(5)
    shapes = Counter()
    for i in range(100):
        k, counts = t22_shape(rng)
        shapes[(k, tuple(counts))] += 1
        A = t22_instance(k, counts, lam=GaussQ(int(rng.integers(-2, 3))), seed=i, conjugate=True)
        assert A.n <= 10
        rep = verify_t22(A)
        assert rep.all_pass
        assert all(all(e.checks.values()) for e in rep.eigenvalues)
    return f"100 instances over {len(shapes)} nilpotent shapes"


# --------------------------------------------------------------------- 6


@criterion(6, "bounded reduction contract", 30)
def test_criterion_06(capsys):
    rng = np.random.default_rng(6)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        sp = SemiunitarySpace(n, int(rng.integers(1, n)))
        A = random_kv(sp, "bounded", rng)
        rf = reduce_bounded(A)
        R = rf.result
        assert apply_similarity(A, rf.transform) == R
        m, k = sp.m, sp.n - sp.m
        assert EXACT.is_zero_matrix(R.mat[:m, m:])
        T, C, L = R.A11, R.A21, R.A22
        assert all(not T[i, j] for i in range(m) for j in range(i + 1, m))  # lower triangular
        for i in range(k):
            for j in range(m):
                if L[i, i] != T[j, j]:
                    assert not C[i, j], "coupling between different eigenvalues survived"
    return "100 instances, witness reproduces input, C_ij = 0 off matching eigenvalues"


# --------------------------------------------------------------------- 7


def rank_profile(M, eigenvalues):
    n = M.shape[0]
    out = {}
    for lam in eigenvalues:
        N = M - lam * EXACT.eye(n)
        P, ranks = EXACT.eye(n), []
        for _ in range(n):
            P = EXACT.mm(P, N)
            ranks.append(EXACT.rank(P))
        out[lam] = tuple(ranks)
    return out


def jordan_equal_oracle(M, N, eigenvalues):
    """Similar iff every (M - lam)^k has the same rank as (N - lam)^k."""
    return rank_profile(M, eigenvalues) == rank_profile(N, eigenvalues)


@criterion(7, "plain similarity reduces to the Weyr form", 30)
def test_criterion_07(capsys):
    rng = np.random.default_rng(7)
    agree = Counter()
    for i in range(100):
        n = int(rng.integers(1, 7))
        summ = random_operator_summands(n, 0, rng)
        M = random_kv(SemiunitarySpace(n, 0), "seminormal", rng, summands=summ).mat
        spec = belitskii(n)
        assert EXACT.equal(canonicalize(M, spec).M_can, weyr_form(M)[1])
        if i % 2:
            S = group_sample(spec, rng)
            N = EXACT.mm(EXACT.inv(S), M, S)
        else:
            # same eigenvalues, Jordan blocks regrouped
            other = random_operator_summands(n, 0, rng, pool=[s.lam for s in summ])
            N = random_kv(SemiunitarySpace(n, 0), "seminormal", rng, summands=other).mat
        # N's eigenvalues lie in M's, so equal rank profiles mean equal Jordan forms
        oracle = jordan_equal_oracle(M, N, {s.lam for s in summ})
        got = decide_similar(M, N, spec)
        assert got == oracle
        agree[got] += 1
    return f"100 matrices n <= 6, Weyr equal; decisions {agree[True]} similar / {agree[False]} not"


# --------------------------------------------------------------------- 8


@criterion(8, "unitary similarity separates the scaled nilpotent pair", 5)
def test_criterion_08(capsys):
    spec = littlewood(2)
    a = EXACT.asarray([["0", "1"], ["0", "0"]])
    b = EXACT.asarray([["0", "2"], ["0", "0"]])
    assert not decide_similar(a, b, spec)
    assert decide_similar(a, b, belitskii(2))
    rng = np.random.default_rng(8)
    # corner entries with rational modulus keep the singular values rational
    corners = [GaussQ(0), GaussQ(1), GaussQ(2), GaussQ(0, 1), GaussQ(3, 4), GaussQ(-4, 3), GaussQ(0, -2)]
    redrawn = 0
    for _ in range(50):
        while True:
            T = EXACT.zeros(2, 2)
            T[0, 0] = GaussQ(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
            T[1, 1] = GaussQ(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
            T[0, 1] = corners[int(rng.integers(0, len(corners)))]
            U = group_sample(spec, rng)
            M = EXACT.mm(U, T, ct(U))
            try:
                canonicalize(M, spec)
                break
            except UnsupportedSpectrum:
                redrawn += 1
        S = group_sample(spec, rng)
        assert decide_similar(M, EXACT.mm(ct(S), M, S), spec)
    return f"pair separated (similar without unitarity); 50 unitary conjugate pairs similar, {redrawn} redrawn"


# --------------------------------------------------------------------- 9

ORBIT_QUIVER = QuiverSpec(
    vertices=(("u", 2, 1), ("v", 1, 1)),
    arrows=(("a", "u", "v"), ("b", "u", "v"), ("c", "v", "u")),
)


def quiver_input(rng):
    mats = {}
    for a, s, t in ORBIT_QUIVER.arrows:
        rows, cols = ORBIT_QUIVER.dims()[t][0], ORBIT_QUIVER.dims()[s][0]
        X = EXACT.zeros(rows, cols)
        for i in range(rows):
            for j in range(cols):
                X[i, j] = GaussQ(int(rng.integers(-2, 3)), int(rng.integers(-1, 2)))
        mats[a] = X
    return quiver_encode(ORBIT_QUIVER, mats)


def unitary_conjugate_triangular(n, rng):
    """U T U* with T upper triangular and U a random unitary over Q(i)."""
    T = EXACT.zeros(n, n)
    for i in range(n):
        for j in range(i, n):
            if i == j or rng.random() < 0.4:
                T[i, j] = GaussQ(int(rng.integers(-2, 3)), int(rng.integers(-1, 2)))
    U = group_sample(littlewood(n), rng)
    return EXACT.mm(U, T, ct(U))


@criterion(9, "orbit soundness and completeness over four algebras", 120)
def test_criterion_09(capsys):
    rng = np.random.default_rng(9)
    redrawn = 0
    per_spec = Counter()
    for i in range(200):
        kind = ("belitskii", "littlewood", "semiunitary", "quiver")[i % 4]
        while True:
            n = int(rng.integers(1, 5))
            if kind == "quiver":
                M, spec = quiver_input(rng)
            elif kind == "belitskii":
                spec, M = belitskii(n), random_kv(SemiunitarySpace(n, 0), "seminormal", rng).mat
            elif kind == "littlewood":
                spec, M = littlewood(n), unitary_conjugate_triangular(n, rng)
            else:
                m = int(rng.integers(0, n + 1))
                spec = semiunitary_similarity(n, m)
                M = kv_to_isotropic_first(random_kv(SemiunitarySpace(n, m), "seminormal", rng).mat, m)
            try:
                r = canonicalize(M, spec)
                break
            except UnsupportedSpectrum:
                redrawn += 1
        S = group_sample(spec, rng)
        N = EXACT.mm(EXACT.inv(S), M, S)
        assert EXACT.equal(EXACT.mm(M, r.S), EXACT.mm(r.S, r.M_can))
        assert is_group_member(r.S, spec, EXACT)
        assert EXACT.equal(canonicalize(r.M_can, spec).M_can, r.M_can)
        assert decide_similar(M, N, spec)
        per_spec[kind] += 1
    return f"200 triples {dict(per_spec)}, {redrawn} draws outside Q(i) redrawn"


# -------------------------------------------------------------------- 10


@criterion(10, "lambda-similarity agrees with operator summands", 60)
def test_criterion_10(capsys):
    rng = np.random.default_rng(10)
    agree = Counter()
    for i in range(50):
        sp = space(rng, 5)
        A = random_kv(sp, "seminormal", rng)
        if i % 2:
            B = apply_similarity(A, random_transform(sp, rng))
        else:
            # reuse the eigenvalues so that dissimilar pairs are not trivially so
            pool = list({s.lam for s in seminormal_summands(A)})
            B = random_kv(sp, "seminormal", rng, summands=random_operator_summands(sp.n, sp.m, rng, pool=pool))
        spec = semiunitary_similarity(sp.n, sp.m)
        same = decide_similar(kv_to_isotropic_first(A.mat, sp.m), kv_to_isotropic_first(B.mat, sp.m), spec)
        assert same == (seminormal_summands(A) == seminormal_summands(B))
        agree[same] += 1
    return f"50 pairs, {agree[True]} similar / {agree[False]} not, all in agreement"


# -------------------------------------------------------------------- 11


def fixture_doc(name):
    with open(os.path.join(FIXTURES, "inputs", name), encoding="utf-8") as fh:
        return json.load(fh)


def close_summands(a, b, tol):
    return len(a) == len(b) and all(
        type(x) is type(y)
        and getattr(x, "n", None) == getattr(y, "n", None)
        and getattr(x, "l", None) == getattr(y, "l", None)
        and getattr(x, "kind", None) == getattr(y, "kind", None)
        and abs(complex(getattr(x, "lam", getattr(x, "value", 0)) or 0) - complex(getattr(y, "lam", getattr(y, "value", 0)) or 0)) <= tol
        for x, y in zip(a, b)
    )


@criterion(11, "float backend on the fixture corpus at tolerance 1e-8", 60)
def test_criterion_11(capsys):
    fb = FloatBackend()
    tol = 1e-8
    rng = np.random.default_rng(11)
    count = 0
    for k in range(6):
        # criterion 1 with floats
        doc = MatrixDocument.from_dict(fixture_doc(f"float_seminormal_{k}.json"))
        sp = SemiunitarySpace(*doc.space)
        assert sp.n <= 6
        A = KVMatrix(doc.entries, sp.m, fb)
        ref = seminormal_summands(A)
        for _ in range(3):
            B = apply_similarity(A, random_transform(sp, rng, fb))
            assert close_summands(seminormal_summands(B), ref, tol)
        # criterion 4 with floats
        doc = MatrixDocument.from_dict(fixture_doc(f"float_hermitian_{k}.json"))
        sp = SemiunitarySpace(*doc.space)
        F = KVMatrix(doc.entries, sp.m, fb)
        ref = hermitian_canon(F)[1]
        for _ in range(3):
            G = apply_star_congruence(F, random_transform(sp, rng, fb))
            assert close_summands(hermitian_canon(G)[1], ref, tol)
        w = np.linalg.eigvalsh(F.A22) if sp.n > sp.m else np.zeros(0)
        kinds = Counter(s.kind for s in ref)
        assert kinds["PlusOne0"] - kinds["MinusOne0"] == int(np.sum(w > tol)) - int(np.sum(w < -tol))
        # criterion 7 with floats
        raw = fixture_doc(f"float_belitskii_{k}.json")
        doc = MatrixDocument.from_dict(raw)
        n = doc.entries.shape[0]
        M = doc.entries
        r = canonicalize(M, belitskii(n), fb)
        W = weyr_form(M, fb)[1]
        assert np.max(np.abs(r.M_can - W), initial=0.0) <= tol * max(1.0, np.max(np.abs(W), initial=0.0))
        S = group_sample(belitskii(n), rng, fb)
        assert decide_similar(M, np.linalg.solve(S, M @ S), belitskii(n), fb)
        count += 3
    return f"{count} fixture inputs, 100% pass"
