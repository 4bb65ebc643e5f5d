"""Semiunitary spaces, k-v matrices, semiunitary transforms and generators.

A semiorthonormal basis lists the unitary part first: the Gram matrix is
``I_m + 0_(n-m)``.  A k-v matrix keeps the full square matrix together
with ``m``; the four blocks are views, so empty strips (m = 0 or m = n)
need no special handling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backend import EXACT, Backend, backend_for, ct
from .errors import ContractViolation, MalformedInput
from .kernel import jordan_block
from .scalars import GaussQ, eigen_key

__all__ = [
    "SemiunitarySpace",
    "KVMatrix",
    "SemiunitaryTransform",
    "OperatorSummand",
    "HermitianSummand",
    "HERMITIAN_KINDS",
    "gram_matrix",
    "is_bounded",
    "is_selfadjoint",
    "is_metric",
    "is_seminormal",
    "adjoint_pair_check",
    "block_direct_sum",
    "apply_similarity",
    "apply_star_congruence",
    "random_unitary",
    "random_transform",
    "random_kv",
    "PROFILES",
    "random_operator_summands",
    "random_hermitian_summands",
    "summand_to_kv",
    "summands_to_kv",
    "sort_summands",
    "permutation_transform",
]


@dataclass(frozen=True)
class SemiunitarySpace:
    n: int
    m: int

    def __post_init__(self):
        if not (0 <= self.m <= self.n):
            raise MalformedInput(f"need 0 <= m <= n, got n={self.n}, m={self.m}")


class KVMatrix:
    """Square matrix with a designated leading m x m block."""

    __slots__ = ("mat", "space", "bk")

    def __init__(self, mat, m: int, bk: Backend | None = None):
        mat = np.asarray(mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise MalformedInput("k-v matrix must be square")
        self.bk = bk if bk is not None else backend_for(mat)
        self.mat = mat
        self.space = SemiunitarySpace(mat.shape[0], m)

    @classmethod
    def from_blocks(cls, A11, A12, A21, A22, bk: Backend | None = None):
        bk = bk or backend_for(A11)
        return cls(bk.block([[A11, A12], [A21, A22]]), A11.shape[0], bk)

    @property
    def n(self):
        return self.space.n

    @property
    def m(self):
        return self.space.m

    @property
    def A11(self):
        return self.mat[: self.m, : self.m]

    @property
    def A12(self):
        return self.mat[: self.m, self.m :]

    @property
    def A21(self):
        return self.mat[self.m :, : self.m]

    @property
    def A22(self):
        return self.mat[self.m :, self.m :]

    def __eq__(self, other):
        if not isinstance(other, KVMatrix):
            return NotImplemented
        return self.space == other.space and self.bk.equal(self.mat, other.mat)

    def __repr__(self):
        return f"KVMatrix(n={self.n}, m={self.m})"


class SemiunitaryTransform:
    """Block lower triangular transform with unitary leading block."""

    __slots__ = ("S11", "S21", "S22", "space", "bk")

    def __init__(self, S11, S21, S22, bk: Backend | None = None, check: bool = True):
        self.bk = bk or backend_for(S11 if S11.size else S22)
        m, k = S11.shape[0], S22.shape[0]
        if S11.shape != (m, m) or S22.shape != (k, k) or S21.shape != (k, m):
            raise MalformedInput("inconsistent transform blocks")
        self.S11, self.S21, self.S22 = S11, S21, S22
        self.space = SemiunitarySpace(m + k, m)
        if check:
            if not self.bk.is_unitary(S11):
                raise ContractViolation("leading block is not unitary")
            if self.bk.rank(S22) < k:
                raise ContractViolation("trailing block is singular")

    @classmethod
    def from_matrix(cls, S, m: int, bk: Backend | None = None, check: bool = True):
        bk = bk or backend_for(S)
        if not bk.is_zero_matrix(S[:m, m:]):
            raise ContractViolation("transform has a nonzero upper-right block")
        return cls(S[:m, :m], S[m:, :m], S[m:, m:], bk, check)

    @classmethod
    def identity(cls, space: SemiunitarySpace, bk: Backend = EXACT):
        m, k = space.m, space.n - space.m
        return cls(bk.eye(m), bk.zeros(k, m), bk.eye(k), bk, check=False)

    @property
    def full(self):
        bk = self.bk
        m = self.S11.shape[0]
        k = self.S22.shape[0]
        return bk.block([[self.S11, bk.zeros(m, k)], [self.S21, self.S22]])

    def inverse(self):
        bk = self.bk
        i22 = bk.inv(self.S22)
        i11 = ct(self.S11)
        i21 = -bk.mm(i22, self.S21, i11)
        return SemiunitaryTransform(i11, i21, i22, bk, check=False)

    def __matmul__(self, other):
        full = self.bk.mm(self.full, other.full)
        return SemiunitaryTransform.from_matrix(full, self.space.m, self.bk, check=False)

    def __repr__(self):
        return f"SemiunitaryTransform(n={self.space.n}, m={self.space.m})"


# ---------------------------------------------------------------- summands


@dataclass(frozen=True)
class OperatorSummand:
    """``[J_n(lam)]_l``: Jordan block with unitary part of size l."""

    n: int
    lam: object
    l: int

    def __post_init__(self):
        if self.n < 1 or self.l not in (0, 1):
            raise MalformedInput("operator summand needs n >= 1 and l in {0, 1}")

    def sort_key(self):
        return (eigen_key(self.lam), -self.l, -self.n)


HERMITIAN_KINDS = ("Pair1", "RealDiag1", "PlusOne0", "MinusOne0", "Zero0")


@dataclass(frozen=True)
class HermitianSummand:
    kind: str
    value: object = None

    def __post_init__(self):
        if self.kind not in HERMITIAN_KINDS:
            raise MalformedInput(f"unknown Hermitian summand {self.kind!r}")

    def sort_key(self):
        idx = HERMITIAN_KINDS.index(self.kind)
        v = -float(complex(self.value).real) if self.kind == "RealDiag1" else 0.0
        return (idx, v)


def _tolerant_ranks(values, eps):
    """(real rank, imaginary rank) per value; parts within eps count as equal."""
    zs = [complex(v) for v in values]
    tol = eps * max([1.0] + [abs(z) for z in zs])
    ranks = [None] * len(zs)
    by_re = sorted(range(len(zs)), key=lambda i: zs[i].real)
    groups = []
    for i in by_re:
        if groups and zs[i].real - zs[groups[-1][-1]].real <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    for g, idx in enumerate(groups):
        h, prev = 0, None
        for i in sorted(idx, key=lambda i: zs[i].imag):
            if prev is not None and zs[i].imag - prev > tol:
                h += 1
            prev = zs[i].imag
            ranks[i] = (g, h)
    return ranks


def sort_summands(items, get=None, eps: float = 1e-6):
    """Canonical order; ``get`` extracts the summand from each item.

    Float eigenvalues whose parts agree within ``eps`` (relative) are
    ordered as equal, so rounding noise cannot swap summands.
    """
    items = list(items)
    get = get or (lambda x: x)
    summ = [get(x) for x in items]
    ops = [s for s in summ if isinstance(s, OperatorSummand)]
    if len(ops) != len(summ) or all(isinstance(s.lam, GaussQ) for s in ops):
        return [x for _, x in sorted(zip(summ, items), key=lambda p: p[0].sort_key())]
    ranks = _tolerant_ranks([s.lam for s in ops], eps)
    order = sorted(range(len(items)), key=lambda i: (ranks[i], -summ[i].l, -summ[i].n))
    return [items[i] for i in order]


# ---------------------------------------------------------------- predicates


def gram_matrix(space: SemiunitarySpace, bk: Backend = EXACT):
    G = bk.zeros(space.n, space.n)
    for i in range(space.m):
        G[i, i] = bk.scalar(1)
    return G


def is_bounded(A: KVMatrix) -> bool:
    return A.bk.is_zero_matrix(A.A12, scale=max(1.0, A.bk.norm(A.mat)))


def is_selfadjoint(A: KVMatrix) -> bool:
    return is_bounded(A) and A.bk.is_hermitian(A.A11)


def is_metric(A: KVMatrix) -> bool:
    return is_bounded(A) and A.bk.is_unitary(A.A11)


def is_seminormal(A: KVMatrix) -> bool:
    return is_bounded(A) and A.bk.is_normal(A.A11)


def adjoint_pair_check(A: KVMatrix, B: KVMatrix) -> bool:
    """True iff B is the adjoint of A."""
    if A.space != B.space:
        raise ContractViolation("k-v matrices live on different spaces")
    return is_bounded(A) and is_bounded(B) and A.bk.equal(B.A11, ct(A.A11))


def _interleave_perm(nA, mA, nB, mB):
    """Positions of (A coords, B coords) in the block-direct sum layout."""
    pa = list(range(mA)) + list(range(mA + mB, mA + mB + nA - mA))
    pb = list(range(mA, mA + mB)) + list(range(mA + mB + nA - mA, nA + nB))
    return pa, pb


def block_direct_sum(A: KVMatrix, B: KVMatrix) -> KVMatrix:
    bk = A.bk if A.n else B.bk
    n = A.n + B.n
    pa, pb = _interleave_perm(A.n, A.m, B.n, B.m)
    out = bk.zeros(n, n)
    if A.n:
        out[np.ix_(pa, pa)] = A.mat
    if B.n:
        out[np.ix_(pb, pb)] = B.mat
    return KVMatrix(out, A.m + B.m, bk)


def apply_similarity(A: KVMatrix, S: SemiunitaryTransform) -> KVMatrix:
    """S^-1 A S."""
    if A.space != S.space:
        raise ContractViolation("transform and matrix spaces differ")
    bk = A.bk
    Sf = S.full
    return KVMatrix(bk.mm(S.inverse().full, A.mat, Sf), A.m, bk)


def apply_star_congruence(F: KVMatrix, S: SemiunitaryTransform) -> KVMatrix:
    """S* F S."""
    if F.space != S.space:
        raise ContractViolation("transform and matrix spaces differ")
    bk = F.bk
    Sf = S.full
    return KVMatrix(bk.mm(ct(Sf), F.mat, Sf), F.m, bk)


def summand_to_kv(s, bk: Backend = EXACT) -> KVMatrix:
    if isinstance(s, OperatorSummand):
        return KVMatrix(jordan_block(s.n, s.lam, bk), s.l, bk)
    if isinstance(s, HermitianSummand):
        one = bk.scalar(1)
        if s.kind == "Pair1":
            return KVMatrix(bk.asarray([[0, 1], [1, 0]]), 1, bk)
        if s.kind == "RealDiag1":
            return KVMatrix(bk.asarray([[s.value]]), 1, bk)
        val = {"PlusOne0": one, "MinusOne0": -one, "Zero0": bk.scalar(0)}[s.kind]
        return KVMatrix(bk.asarray([[val]]), 0, bk)
    raise MalformedInput(f"not a summand: {s!r}")


def summands_to_kv(summands: Sequence, bk: Backend = EXACT) -> KVMatrix:
    out = KVMatrix(bk.zeros(0, 0), 0, bk)
    for s in summands:
        out = block_direct_sum(out, summand_to_kv(s, bk))
    return out


def permutation_transform(summands, perm, bk: Backend = EXACT) -> SemiunitaryTransform:
    """P with P^-1 (assembly of summands) P = assembly of summands[perm]."""
    coords = []  # for each summand: (unitary coords, isotropic coords) in the assembly
    u = sum(_usize(s) for s in summands)
    ucur, icur = 0, u
    for s in summands:
        ms = _usize(s)
        ns = _nsize(s)
        coords.append((list(range(ucur, ucur + ms)), list(range(icur, icur + ns - ms))))
        ucur += ms
        icur += ns - ms
    order = [c for k in perm for c in coords[k][0]] + [c for k in perm for c in coords[k][1]]
    n = len(order)
    P = bk.zeros(n, n)
    for j, i in enumerate(order):
        P[i, j] = bk.scalar(1)
    return SemiunitaryTransform.from_matrix(P, u, bk)


def _usize(s):
    if isinstance(s, OperatorSummand):
        return s.l
    return 1 if s.kind in ("Pair1", "RealDiag1") else 0


def _nsize(s):
    if isinstance(s, OperatorSummand):
        return s.n
    return 2 if s.kind == "Pair1" else 1


# ---------------------------------------------------------------- generators


def _rng(seed):
    return np.random.default_rng(seed)


def _small_gauss(rng, lo=-2, hi=2, imag=True):
    re = int(rng.integers(lo, hi + 1))
    im = int(rng.integers(lo, hi + 1)) if imag else 0
    return GaussQ(re, im)


# (a, b, r) with |a|^2 + |b|^2 = r^2: rational Givens rotations
_GIVENS = [
    (GaussQ(3), GaussQ(4), 5),
    (GaussQ(0, 3), GaussQ(4), 5),
    (GaussQ(1, 1), GaussQ(1, 1), 2),
    (GaussQ(1, 1), GaussQ(1, -1), 2),
    (GaussQ(1, 2), GaussQ(2), 3),
    (GaussQ(2), GaussQ(2, 1), 3),
]


def random_unitary(k: int, rng, bk: Backend = EXACT):
    """Exact: a few rational Givens rotations times a signed permutation. Float: QR."""
    if k == 0:
        return bk.eye(0)
    if not bk.exact:
        Z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        Q, R = np.linalg.qr(Z)
        return Q * (np.diag(R) / np.abs(np.diag(R)))
    U = bk.eye(k)
    for _ in range(k - 1 if k > 1 else 0):
        i, j = sorted(int(x) for x in rng.choice(k, size=2, replace=False))
        a, b, r = _GIVENS[int(rng.integers(0, len(_GIVENS)))]
        G = bk.eye(k)
        G[i, i], G[i, j] = a / r, -b.conjugate() / r
        G[j, i], G[j, j] = b / r, a.conjugate() / r
        U = bk.mm(U, G)
    # random signed permutation keeps small cases from being near identity
    perm = rng.permutation(k)
    P = bk.zeros(k, k)
    units = (GaussQ(1), GaussQ(-1), GaussQ(0, 1), GaussQ(0, -1))
    for j, i in enumerate(perm):
        P[i, j] = units[int(rng.integers(0, 4))]
    return bk.mm(U, P)


def _random_nonsingular(k: int, rng, bk: Backend):
    if k == 0:
        return bk.eye(0)
    while True:
        if bk.exact:
            M = bk.asarray([[_small_gauss(rng, -2, 2) for _ in range(k)] for _ in range(k)])
        else:
            M = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        if bk.rank(M) == k:
            return M


def _random_block(r, c, rng, bk: Backend, density=1.0):
    if bk.exact:
        out = bk.zeros(r, c)
        for i in range(r):
            for j in range(c):
                if rng.random() < density:
                    out[i, j] = _small_gauss(rng)
        return out
    return (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))) * (rng.random((r, c)) < density)


def random_transform(space: SemiunitarySpace, seed, bk: Backend = EXACT) -> SemiunitaryTransform:
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    m, k = space.m, space.n - space.m
    S11 = random_unitary(m, rng, bk)
    S21 = _random_block(k, m, rng, bk)
    S22 = _random_nonsingular(k, rng, bk)
    return SemiunitaryTransform(S11, S21, S22, bk, check=False)


_POOL = [GaussQ(0), GaussQ(1), GaussQ(-1), GaussQ(0, 1), GaussQ(2), GaussQ(1, 1), GaussQ(1) / 2]
_REAL_POOL = [GaussQ(0), GaussQ(1), GaussQ(-1), GaussQ(2), GaussQ(1) / 2, GaussQ(-3)]
_CIRCLE_POOL = [GaussQ(1), GaussQ(-1), GaussQ(0, 1), GaussQ(0, -1), GaussQ(3, 4) / 5, GaussQ(-5, 12) / 13]


def random_operator_summands(n: int, m: int, rng, kind: str = "seminormal", pool=None):
    """Random list of ``[J_k(lam)]_l`` summands of total size n with m unitary parts."""
    if not 0 <= m <= n:
        raise ContractViolation("need 0 <= m <= n")
    pool = list(pool) if pool is not None else _POOL[: 2 + int(rng.integers(0, len(_POOL) - 1))]
    unit_pool = {"selfadjoint": _REAL_POOL, "metric": _CIRCLE_POOL}.get(kind, pool)
    iso_pool = pool
    if kind in ("selfadjoint", "metric"):
        iso_pool = list(unit_pool) + list(pool)
    sizes_left = n
    out = []
    # l = 1 summands first, each needs at least one coordinate
    for i in range(m):
        rest_units = m - i - 1
        spare = sizes_left - rest_units - 1 - (0)
        size = 1 + int(rng.integers(0, min(spare, 3) + 1)) if spare > 0 else 1
        # isotropic summands are optional, so spare can be used freely
        out.append(OperatorSummand(size, unit_pool[int(rng.integers(0, len(unit_pool)))], 1))
        sizes_left -= size
    while sizes_left > 0:
        size = 1 + int(rng.integers(0, min(sizes_left, 3)))
        lam = iso_pool[int(rng.integers(0, len(iso_pool)))]
        if out and rng.random() < 0.5:
            lam = out[int(rng.integers(0, len(out)))].lam
        out.append(OperatorSummand(size, lam, 0))
        sizes_left -= size
    perm = rng.permutation(len(out))
    return [out[i] for i in perm]


def random_hermitian_summands(n: int, m: int, rng):
    """Random Hermitian-form summand list with total size n and unitary size m."""
    out = []
    iso = n - m
    pairs = int(rng.integers(0, min(m, iso) + 1))
    out += [HermitianSummand("Pair1")] * pairs
    for _ in range(m - pairs):
        out.append(HermitianSummand("RealDiag1", _REAL_POOL[int(rng.integers(0, len(_REAL_POOL)))]))
    for _ in range(iso - pairs):
        out.append(HermitianSummand(("PlusOne0", "MinusOne0", "Zero0")[int(rng.integers(0, 3))]))
    perm = rng.permutation(len(out))
    return [out[i] for i in perm]


PROFILES = ("general", "bounded", "selfadjoint", "metric", "seminormal", "hermitian-form")


def random_kv(space: SemiunitarySpace, profile: str, seed, bk: Backend = EXACT, summands=None) -> KVMatrix:
    """Deterministic random k-v matrix of the given profile.

    Structured profiles are random semiunitary conjugates (or *congruences)
    of an assembly of canonical summands, which keeps every exact
    reduction inside the Gaussian rationals.  ``summands`` pins the
    spectrum explicitly.
    """
    if profile not in PROFILES:
        raise MalformedInput(f"unknown profile {profile!r}")
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    n, m = space.n, space.m
    if profile == "general":
        return KVMatrix(_random_block(n, n, rng, bk), m, bk)
    if profile == "bounded":
        return _random_bounded(space, rng, bk)
    S = random_transform(space, rng, bk)
    if profile == "hermitian-form":
        if summands is None:
            summands = random_hermitian_summands(n, m, rng)
        C = summands_to_kv(summands, bk)
        return apply_star_congruence(C, S)
    if summands is None:
        summands = random_operator_summands(n, m, rng, profile)
    C = summands_to_kv(summands, bk)
    return apply_similarity(C, S)


def _random_bounded(space, rng, bk):
    """Conjugate of [[T, 0], [C, L]] with T and L lower triangular.

    The diagonal of T is grouped and ascending, so an ordered Schur form
    of the leading block exists over the Gaussian rationals.
    """
    n, m = space.n, space.m
    k = n - m
    pool = _POOL[:4]
    t_diag = sorted((pool[int(rng.integers(0, len(pool)))] for _ in range(m)), key=eigen_key)
    l_diag = [pool[int(rng.integers(0, len(pool)))] for _ in range(k)]
    T = bk.zeros(m, m)
    for i in range(m):
        T[i, i] = bk.scalar(t_diag[i])
        for j in range(i):
            if rng.random() < 0.5:
                T[i, j] = bk.scalar(_small_gauss(rng, -1, 1))
    L = bk.zeros(k, k)
    for i in range(k):
        L[i, i] = bk.scalar(l_diag[i])
        for j in range(i):
            if rng.random() < 0.5:
                L[i, j] = bk.scalar(_small_gauss(rng, -1, 1))
    C = _random_block(k, m, rng, bk, density=0.7)
    A = KVMatrix.from_blocks(T, bk.zeros(m, k), C, L, bk)
    return apply_similarity(A, random_transform(space, rng, bk))
