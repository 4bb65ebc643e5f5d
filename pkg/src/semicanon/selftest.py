"""Deterministic invariant suites behind ``semicanon selftest``.

Each suite draws its own seeds from (seed, suite index) so suites can run
in any order or in parallel and still see the same inputs.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .backend import EXACT, ct
from .errors import UnsupportedSpectrum
from .hermitian import hermitian_canon, hermitian_summand_signature
from .kernel import jordan_structure, weyr_form
from .operators import seminormal_canonical_basis, seminormal_summands
from .reduced import canonicalize, decide_similar, group_sample, is_group_member
from .reduced.spec import belitskii, littlewood, semiunitary_similarity
from .scalars import GaussQ, format_gauss, parse_gauss
from .semiunitary import (
    SemiunitarySpace,
    apply_similarity,
    apply_star_congruence,
    gram_matrix,
    is_bounded,
    random_kv,
    random_transform,
)
from .serialize import MatrixDocument, ResultDocument

__all__ = ["SuiteResult", "SUITES", "run_selftest"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _space(rng, nmax=5, inner=False):
    n = int(rng.integers(2 if inner else 1, nmax + 1))
    m = int(rng.integers(1, n)) if inner else int(rng.integers(0, n + 1))
    return SemiunitarySpace(n, m)


def suite_scalars(rng, trials):
    for _ in range(trials):
        a, b, c, d = (int(x) for x in rng.integers(-50, 51, 4))
        z = GaussQ(a, 1) / (c or 1) + GaussQ(0, b) / (d or 1)
        if parse_gauss(format_gauss(z)) != z:
            return False, f"round trip failed for {z}"
    return True, f"{trials} round trips"


def suite_semiunitary(rng, trials):
    for _ in range(trials):
        sp = _space(rng)
        A = random_kv(sp, "general", rng)
        S, T = random_transform(sp, rng), random_transform(sp, rng)
        if apply_similarity(apply_similarity(A, S), S.inverse()) != A:
            return False, "inverse law"
        if apply_similarity(A, S @ T) != apply_similarity(apply_similarity(A, S), T):
            return False, "composition law"
        G = gram_matrix(sp)
        if not EXACT.equal(EXACT.mm(ct(S.full), G, S.full), G):
            return False, "Gram matrix not preserved"
        B = random_kv(sp, "bounded", rng)
        if not is_bounded(apply_similarity(B, S)):
            return False, "boundedness not invariant"
    return True, f"{trials} spaces"


def suite_kernel(rng, trials):
    for _ in range(trials):
        sp = _space(rng)
        A = random_kv(sp, "seminormal", rng).mat
        S = random_transform(SemiunitarySpace(sp.n, 0), rng).full
        B = EXACT.mm(EXACT.inv(S), A, S)
        ja, jb = jordan_structure(A), jordan_structure(B)
        if ja.blocks() != jb.blocks():
            return False, "Jordan structure not invariant"
        P, W, _ = weyr_form(A)
        if not EXACT.equal(EXACT.mm(A, P), EXACT.mm(P, W)):
            return False, "Weyr witness"
        if not EXACT.equal(weyr_form(B)[1], W):
            return False, "Weyr form not invariant"
    return True, f"{trials} matrices"


def suite_operators(rng, trials):
    for _ in range(trials):
        sp = _space(rng)
        A = random_kv(sp, "seminormal", rng)
        ref = seminormal_summands(A)
        for _ in range(2):
            B = apply_similarity(A, random_transform(sp, rng))
            if seminormal_summands(B) != ref:
                return False, "summands changed under conjugation"
        S, C = seminormal_canonical_basis(A)
        if not EXACT.equal(EXACT.mm(A.mat, S.full), EXACT.mm(S.full, C.mat)):
            return False, "canonical basis witness"
        if not EXACT.is_unitary(S.S11):
            return False, "witness leading block not unitary"
    return True, f"{trials} operators"


def suite_hermitian(rng, trials):
    for _ in range(trials):
        sp = _space(rng)
        F = random_kv(sp, "hermitian-form", rng)
        tr, summ = hermitian_canon(F)
        ref = hermitian_summand_signature(summ)
        for _ in range(2):
            G = apply_star_congruence(F, random_transform(sp, rng))
            if hermitian_summand_signature(hermitian_canon(G)[1]) != ref:
                return False, "census changed under congruence"
        w = np.linalg.eigvalsh(EXACT.to_complex(F.A22)) if F.n > F.m else np.zeros(0)
        kinds = [s.kind for s in summ]
        if (int(np.sum(w > 1e-9)), int(np.sum(w < -1e-9))) != (kinds.count("PlusOne0"), kinds.count("MinusOne0")):
            return False, "isotropic inertia disagrees with the census"
    return True, f"{trials} forms"


def suite_reduced(rng, trials):
    for k in range(trials):
        n = int(rng.integers(1, 5))
        spec = (belitskii(n), littlewood(n), semiunitary_similarity(n, int(rng.integers(0, n + 1))))[k % 3]
        for _ in range(20):
            M = random_kv(SemiunitarySpace(n, 0), "general", rng).mat
            try:
                r = canonicalize(M, spec)
            except UnsupportedSpectrum:  # inputs outside Q(i) are redrawn
                continue
            break
        else:
            continue
        S = group_sample(spec, int(rng.integers(0, 2**31)))
        if not is_group_member(S, spec, EXACT):
            return False, "group sample not admissible"
        N = EXACT.mm(EXACT.inv(S), M, S)
        if not decide_similar(M, N, spec):
            return False, "conjugate declared dissimilar"
        if not EXACT.equal(canonicalize(r.M_can, spec).M_can, r.M_can):
            return False, "canonicalization not idempotent"
    return True, f"{trials} orbit checks"


def suite_serialize(rng, trials):
    for _ in range(trials):
        sp = _space(rng)
        A = random_kv(sp, "general", rng)
        doc = MatrixDocument(A.mat, "exact", (sp.n, sp.m))
        if MatrixDocument.loads(doc.dumps()) != doc:
            return False, "exact matrix round trip"
        fdoc = MatrixDocument(EXACT.to_complex(A.mat), "float", (sp.n, sp.m))
        if MatrixDocument.loads(fdoc.dumps()) != fdoc:
            return False, "float matrix round trip"
        res = ResultDocument("canon-op", summands=seminormal_summands(random_kv(sp, "seminormal", rng)))
        if ResultDocument.loads(res.dumps()) != res:
            return False, "result round trip"
    return True, f"{trials} documents"


SUITES = [
    ("scalar-kernel/scalars", suite_scalars),
    ("scalar-kernel/forms", suite_kernel),
    ("semiunitary-core", suite_semiunitary),
    ("operator-canon", suite_operators),
    ("hermitian-canon", suite_hermitian),
    ("lambda-similarity", suite_reduced),
    ("cli/serialization", suite_serialize),
]


def _run_one(args):
    idx, trials, seed = args
    name, fn = SUITES[idx]
    rng = np.random.default_rng([seed, idx])
    try:
        ok, detail = fn(rng, trials)
    except Exception as e:  # a crash is a failure, reported by name
        ok, detail = False, f"{type(e).__name__}: {e}"
    return SuiteResult(name, ok, detail)


def run_selftest(trials: int = 20, seed: int = 0, jobs: int = 1) -> list:
    work = [(i, trials, seed) for i in range(len(SUITES))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_one, work))
    return [_run_one(w) for w in work]
