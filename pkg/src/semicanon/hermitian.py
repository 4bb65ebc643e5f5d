"""Hermitian forms on semiunitary spaces under semiunitary *congruence.

Pipeline on F = [[A, B], [B*, D]]:

1. normalize D to I_p + (-I_q) + 0_z by a congruence of the isotropic part;
2. clear the columns of B over +-I with the lower-left block of S;
3. bring the remaining part of B to [[I_r, 0], [0, 0]] (unitary rows,
   arbitrary columns);
4. clear the part of A that meets the paired rows;
5. diagonalize what is left of A unitarily.
"""

from __future__ import annotations

import numpy as np

from .backend import Backend, ct
from .errors import ContractViolation, InternalInconsistency
from .scalars import GaussQ
from .semiunitary import (
    HermitianSummand,
    KVMatrix,
    SemiunitaryTransform,
    sort_summands,
    summands_to_kv,
)

__all__ = ["hermitian_canon", "hermitian_summand_signature", "is_hermitian_kv"]


def is_hermitian_kv(F: KVMatrix) -> bool:
    return F.bk.is_hermitian(F.mat)


def _right_normalizer(X, bk: Backend):
    """Nonsingular V with X V = [I_r, 0] for X (r x z) of full row rank."""
    r, z = X.shape
    R = bk.mm(ct(X), bk.inv(bk.mm(X, ct(X)))) if r else bk.zeros(z, 0)
    K = bk.nullspace(X) if r else bk.eye(z)
    return np.hstack([R, K])


def hermitian_canon(F: KVMatrix):
    """(S, summands) with S* F S equal to the sorted summand assembly."""
    bk = F.bk
    if not is_hermitian_kv(F):
        raise ContractViolation("form is not Hermitian")
    n, m = F.n, F.m
    k = n - m
    scale = max(1.0, bk.norm(F.mat))
    S = bk.eye(n)

    def cong(M, T):
        return bk.mm(ct(T), M, T)

    # 1. isotropic part
    X, (p, q, z) = bk.normalized_basis(F.A22, bk.eye(k))
    T = bk.direct_sum(bk.eye(m), X)
    S = bk.mm(S, T)
    G = cong(F.mat, T)
    # 2. clear B over +-I
    B = G[:m, m:]
    T = bk.eye(n)
    for j in range(p):
        T[m + j, :m] = -ct(B[:, j : j + 1])[0]
    for j in range(p, p + q):
        T[m + j, :m] = ct(B[:, j : j + 1])[0]
    S = bk.mm(S, T)
    G = cong(G, T)
    if not bk.exact:
        G[:m, m : m + p + q] = 0
        G[m : m + p + q, :m] = 0
    # 3. reduce B3 (m x z)
    B3 = G[:m, m + p + q :]
    U1 = bk.orthonormal_basis(B3) if B3.size else bk.zeros(m, 0)
    r = U1.shape[1]
    U = bk.unitary_completion(U1) if m else bk.eye(0)
    Xr = bk.mm(ct(U1), B3)
    V = _right_normalizer(Xr, bk) if z else bk.eye(0)
    T = bk.direct_sum(U, bk.eye(p + q), V)
    S = bk.mm(S, T)
    G = cong(G, T)
    if not bk.exact:
        zr = bk.zeros(m, z)
        zr[:r, :r] = np.eye(r)
        G[:m, m + p + q :] = zr
        G[m + p + q :, :m] = ct(zr)
    # 4. clear the rows of A meeting the paired coordinates
    Ap = G[:m, :m]
    T = bk.eye(n)
    half = bk.scalar(GaussQ(1, 0) / 2) if bk.exact else 0.5
    for i in range(r):
        row = m + p + q + i
        for j in range(m):
            T[row, j] = -Ap[i, j] * half if j < r else -Ap[i, j]
    S = bk.mm(S, T)
    G = cong(G, T)
    # 5. unitary diagonalization of the rest
    Z = G[r:m, r:m]
    vals = []
    if m - r:
        cols = []
        eig = bk.eigenvalues(Z) if bk.exact else _float_eig(Z, bk)
        eig = sorted(eig, key=lambda e: -complex(e[0] if bk.exact else e[0][0]).real)
        for lam, mult in eig:
            if bk.exact:
                Kb = bk.orthonormal_basis(bk.nullspace(Z - lam * bk.eye(m - r)))
            else:
                Kb = lam[1]
                lam = lam[0]
            for c in range(Kb.shape[1]):
                cols.append(Kb[:, c])
                vals.append(lam)
        Uz = np.column_stack(cols)
    else:
        Uz = bk.eye(0)
    T = bk.direct_sum(bk.eye(r), Uz, bk.eye(k))
    S = bk.mm(S, T)
    # reorder isotropic coordinates: paired, +1, -1, free zero
    iso = list(range(m + p + q, m + p + q + r)) + list(range(m, m + p + q)) + list(range(m + p + q + r, n))
    order = list(range(m)) + iso
    S = S[:, order]
    summands = (
        [HermitianSummand("Pair1")] * r
        + [HermitianSummand("RealDiag1", _real(v, bk)) for v in vals]
        + [HermitianSummand("PlusOne0")] * p
        + [HermitianSummand("MinusOne0")] * q
        + [HermitianSummand("Zero0")] * (z - r)
    )
    summands = sort_summands(summands)
    C = summands_to_kv(summands, bk)
    out = cong(F.mat, S)
    tr = SemiunitaryTransform.from_matrix(S, m, bk, check=False)
    if bk.exact:
        if not bk.equal(out, C.mat) or not bk.is_unitary(tr.S11):
            raise InternalInconsistency("congruence witness does not reproduce the canonical form")
    elif not bk.is_zero_matrix(out - C.mat, scale=scale * max(1.0, bk.norm(S)) ** 2 * 1e3):
        raise InternalInconsistency("congruence witness does not reproduce the canonical form")
    return tr, summands


def _float_eig(Z, bk):
    """Grouped eigen-decomposition of a Hermitian float matrix."""
    Z = (Z + ct(Z)) / 2
    w, Y = np.linalg.eigh(Z)
    groups = []
    for j in np.argsort(-w):
        if groups and abs(groups[-1][0] - w[j]) <= bk.policy.cluster_eps * max(1.0, float(np.max(np.abs(w)))):
            groups[-1][1].append(j)
        else:
            groups.append([w[j], [j]])
    return [((complex(np.mean(w[idx])), Y[:, idx]), len(idx)) for _, idx in groups]


def _real(v, bk):
    if bk.exact:
        return GaussQ(v.re)
    return complex(complex(v).real)


def hermitian_summand_signature(summands):
    """Order-independent key (#Pair1, RealDiag1 values descending, #PlusOne0, #MinusOne0, #Zero0)."""
    count = {k: 0 for k in ("Pair1", "PlusOne0", "MinusOne0", "Zero0")}
    diag = []
    for s in summands:
        if s.kind == "RealDiag1":
            diag.append(s.value)
        else:
            count[s.kind] += 1
    diag = tuple(sorted(diag, key=lambda v: -complex(v).real))
    return (count["Pair1"], diag, count["PlusOne0"], count["MinusOne0"], count["Zero0"])
