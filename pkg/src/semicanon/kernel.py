"""Dense factorizations shared by every reduction.

All functions take an optional backend; when omitted it is inferred from
the array dtype (object arrays are exact, complex arrays are float).
Jordan blocks are lower bidiagonal: ``J_n(lam)`` has ones below the
diagonal, so a chain ``g, Ng, ..., N^(n-1) g`` fills its columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import Backend, backend_for, ct
from .errors import ContractViolation, NoUniqueSolution, NonConvergence, NotRepresentable
from .scalars import eigen_key

__all__ = [
    "rank",
    "jordan_block",
    "schur_ordered",
    "jordan_structure",
    "JordanData",
    "weyr_form",
    "weyr_characteristic",
    "sylvester_solve",
    "svd_grouped",
    "hermitian_inertia",
    "unitary_staircase",
    "eigen_chains",
]


def _bk(M, bk):
    return bk if bk is not None else backend_for(M)


def _square(M):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation("expected a square matrix")


def rank(M, bk: Backend | None = None) -> int:
    return _bk(M, bk).rank(M)


def jordan_block(n: int, lam, bk: Backend) -> np.ndarray:
    """Lower bidiagonal Jordan block."""
    J = bk.eye(n) * bk.scalar(lam) if n else bk.zeros(0, 0)
    for i in range(n - 1):
        J[i + 1, i] = bk.scalar(1)
    return J


# ---------------------------------------------------------------- Schur


def _float_schur_upper(M, order_key):
    import scipy.linalg as sla
    from scipy.linalg.lapack import ztrexc

    T, Q = sla.schur(M.astype(complex), output="complex")
    n = T.shape[0]
    # selection sort with adjacent swaps; keys are recomputed after each move
    for target in range(n):
        keys = [order_key(T[j, j]) for j in range(target, n)]
        best = target + min(range(len(keys)), key=lambda j: keys[j])
        if best != target:
            T, Q, info = ztrexc(T, Q, best + 1, target + 1)
            if info != 0:
                raise NonConvergence("eigenvalue reordering failed", iterations=info)
    return Q, np.triu(T)


def schur_ordered(M, bk: Backend | None = None, order=None, shape: str = "lower"):
    """Unitary Q and triangular T = Q* M Q with a prescribed diagonal order.

    ``order`` is either None (ascending under the lexicographic order on
    C) or an explicit list of eigenvalues (with repetition) giving the
    diagonal from top to bottom.
    """
    bk = _bk(M, bk)
    _square(M)
    n = M.shape[0]
    if shape not in ("lower", "upper"):
        raise ContractViolation("shape must be 'lower' or 'upper'")
    if n == 0:
        return bk.eye(0), bk.zeros(0, 0)
    if order is None:
        order = [lam for lam, m in bk.eigenvalues(M) for _ in range(m)]
    order = list(order)
    if len(order) != n:
        raise ContractViolation("order length differs from matrix size")
    # a lower form with diagonal d is the reversal of an upper form with reversed d
    seq = order if shape == "upper" else order[::-1]
    if bk.exact:
        Q = _exact_schur_upper(M, seq, bk)
    else:
        rank_of = {}
        for idx, lam in enumerate(seq):
            rank_of.setdefault(complex(lam), idx)

        def key(z):
            best = min(rank_of, key=lambda w: abs(w - z))
            return rank_of[best]

        Q, _ = _float_schur_upper(M, key)
    if shape == "lower":
        Q = Q[:, ::-1]
    T = bk.mm(ct(Q), M, Q)
    if shape == "lower":
        T = _clean_triangle(T, bk, lower=True)
    else:
        T = _clean_triangle(T, bk, lower=False)
    return Q, T


def _clean_triangle(T, bk, lower):
    if bk.exact:
        return T
    T = T.copy()
    return np.tril(T) if lower else np.triu(T)


def _exact_schur_upper(M, seq, bk):
    n = M.shape[0]
    if bk.is_normal(M):
        # eigenspaces are orthogonal: no deflation needed
        bases = {}
        used = {}
        cols = []
        for lam in seq:
            if lam not in bases:
                bases[lam] = bk.orthonormal_basis(bk.nullspace(M - lam * bk.eye(n)))
                used[lam] = 0
            if used[lam] >= bases[lam].shape[1]:
                raise ContractViolation("prescribed eigenvalue order does not match spectrum")
            cols.append(bases[lam][:, used[lam]])
            used[lam] += 1
        return np.column_stack(cols)
    cols = _deflate(M, bk.eye(n), list(seq), bk)
    if cols is None:
        raise NotRepresentable("no Schur flag with Gaussian rational unit vectors was found")
    return np.column_stack(cols)


def _unit_candidates(A, lam, bk):
    """Unit eigenvectors of A for lam, bottoms of long Jordan chains first.

    With a repeated eigenvalue the eigenspace can hold unit vectors that
    start a representable flag and others that do not, so several are
    offered to the caller.
    """
    k = A.shape[0]
    N = A - lam * bk.eye(k)
    K = bk.nullspace(N)
    if K.shape[1] == 0:
        raise ContractViolation("prescribed eigenvalue order does not match spectrum")
    spaces = [K]
    if K.shape[1] > 1:
        P = bk.eye(k)
        for _ in range(k):
            P = bk.mm(P, N)
            if bk.is_zero_matrix(P):
                break
            C = bk.column_basis(P)
            Z = bk.nullspace(np.hstack([K, -C]))
            inter = bk.column_basis(bk.mm(K, Z[: K.shape[1], :])) if Z.shape[1] else Z[:0]
            if inter.shape[1] == 0:
                break
            spaces.insert(0, inter)
    out, seen = [], []
    for V in spaces:
        try:
            X, _ = bk.normalized_basis(bk.eye(k), V)
            vecs = [X[:, j : j + 1] for j in range(X.shape[1])]
        except NotRepresentable:
            try:
                vecs = [bk.unit_vector(V)]
            except NotRepresentable:
                continue
        for u in vecs:
            if not any(bk.column_basis(np.hstack([u, w])).shape[1] == 1 for w in seen):
                seen.append(u)
                out.append(u)
    return out


def _deflate(M, B, seq, bk):
    """Schur columns for the eigenvalues in seq, or None if no choice works."""
    if not seq:
        return []
    A = bk.mm(ct(B), M, B)
    lam = seq[0]
    for u in _unit_candidates(A, lam, bk):
        rest = _deflate(M, bk.mm(B, bk.orthonormal_complement(u)), seq[1:], bk)
        if rest is not None:
            return [bk.mm(B, u)[:, 0]] + rest
    return None


# ---------------------------------------------------------------- Jordan


def eigen_chains(N, bk: Backend, mult: int | None = None):
    """Chains of the nilpotent restriction of N to its generalized kernel.

    Returns a list of chains (each a list of column vectors g, Ng, ...)
    sorted by length descending.
    """
    n = N.shape[0]
    kernels = [bk.zeros(n, 0)]
    P = bk.eye(n)
    while True:
        P = bk.mm(P, N)
        K = bk.nullspace(P)
        if K.shape[1] == kernels[-1].shape[1]:
            break
        kernels.append(K)
        if mult is not None and K.shape[1] == mult:
            break
    p = len(kernels) - 1
    chains: list[list[np.ndarray]] = []
    for k in range(p, 0, -1):
        need = (kernels[k].shape[1] - kernels[k - 1].shape[1]) - sum(1 for c in chains if len(c) > k)
        # level-k vectors from longer chains: element at index len-k
        existing = [c[len(c) - k] for c in chains if len(c) > k]
        base = np.column_stack([kernels[k - 1][:, j] for j in range(kernels[k - 1].shape[1])] + existing) if (
            kernels[k - 1].shape[1] or existing
        ) else bk.zeros(n, 0)
        r = bk.rank(base) if base.shape[1] else 0
        for j in range(kernels[k].shape[1]):
            if need == 0:
                break
            g = kernels[k][:, j]
            trial = np.column_stack([base, g]) if base.shape[1] else g.reshape(n, 1)
            rt = bk.rank(trial)
            if rt > r:
                base, r = trial, rt
                chain = [g]
                for _ in range(k - 1):
                    chain.append(bk.mm(N, chain[-1].reshape(n, 1))[:, 0])
                chains.append(chain)
                need -= 1
        if need:
            raise NonConvergence("could not complete a Jordan chain basis")
    chains.sort(key=len, reverse=True)
    return chains


@dataclass
class JordanData:
    """Jordan sizes per eigenvalue, plus S with S^-1 M S = J (if requested)."""

    sizes: dict
    order: list
    S: np.ndarray | None = None
    J: np.ndarray | None = None

    def blocks(self):
        """List of (lam, size) in canonical order."""
        return [(lam, s) for lam in self.order for s in self.sizes[lam]]


def _sizes_from_ranks(M, lam, bk, mult):
    n = M.shape[0]
    N = M - lam * bk.eye(n)
    ranks = [n]
    P = bk.eye(n)
    while n - ranks[-1] < mult:
        P = bk.mm(P, N)
        ranks.append(bk.rank(P))
        if len(ranks) > n + 1:
            raise NonConvergence("rank sequence did not stabilize")
    ranks.append(ranks[-1])
    out = []
    # blocks of size >= k: r_{k-1} - r_k ; of size exactly k: that minus next
    for k in range(1, len(ranks) - 1):
        cnt = (ranks[k - 1] - ranks[k]) - (ranks[k] - ranks[k + 1])
        out.extend([k] * cnt)
    return sorted(out, reverse=True)


def jordan_structure(M, bk: Backend | None = None, with_basis: bool = False) -> JordanData:
    """Jordan block sizes per eigenvalue; blocks ordered by eigenvalue then size descending."""
    bk = _bk(M, bk)
    _square(M)
    n = M.shape[0]
    eig = bk.eigenvalues(M)
    sizes = {}
    order = []
    cols = []
    for lam, mult in eig:
        order.append(lam)
        if not with_basis:
            sizes[lam] = _sizes_from_ranks(M, lam, bk, mult)
            continue
        N = M - lam * bk.eye(n)
        chains = eigen_chains(N, bk, mult)
        sizes[lam] = [len(c) for c in chains]
        for c in chains:
            cols.extend(c)
    data = JordanData(sizes=sizes, order=order)
    if with_basis:
        data.S = np.column_stack(cols) if cols else bk.zeros(0, 0)
        data.J = bk.direct_sum(*[jordan_block(s, lam, bk) for lam, s in data.blocks()]) if n else bk.zeros(0, 0)
    return data


# ---------------------------------------------------------------- Weyr


def weyr_characteristic(sizes):
    """Conjugate partition of a list of Jordan sizes."""
    if not sizes:
        return []
    return [sum(1 for s in sizes if s >= i) for i in range(1, max(sizes) + 1)]


def weyr_form(M, bk: Backend | None = None):
    """(S, W, layout) with S^-1 M S = W in Weyr form.

    ``layout`` lists, per eigenvalue, the Weyr characteristic together
    with the Jordan sizes, i.e. ``[(lam, weyr, jordan_sizes), ...]``.
    Within block i of an eigenvalue the vectors are the height-i chain
    members ordered by chain length descending, which makes every
    superdiagonal block equal to [I; 0].
    """
    bk = _bk(M, bk)
    _square(M)
    n = M.shape[0]
    cols = []
    blocks = []
    layout = []
    for lam, mult in bk.eigenvalues(M):
        N = M - lam * bk.eye(n)
        chains = eigen_chains(N, bk, mult)
        sizes = [len(c) for c in chains]
        w = weyr_characteristic(sizes)
        layout.append((lam, w, sizes))
        for i in range(1, len(w) + 1):
            for c in chains:
                if len(c) >= i:
                    cols.append(c[len(c) - i])
        blocks.append(_weyr_block(lam, w, bk))
    S = np.column_stack(cols) if cols else bk.zeros(0, 0)
    W = bk.direct_sum(*blocks) if blocks else bk.zeros(0, 0)
    return S, W, layout


def _weyr_block(lam, w, bk):
    total = sum(w)
    W = bk.eye(total) * bk.scalar(lam)
    offs = np.cumsum([0] + w)
    for i in range(len(w) - 1):
        for c in range(w[i + 1]):
            W[offs[i] + c, offs[i + 1] + c] = bk.scalar(1)
    return W


# ---------------------------------------------------------------- Sylvester


def sylvester_solve(J, B, C, bk: Backend | None = None):
    """X with X B - J X = C; spectra of J and B must be disjoint."""
    bk = _bk(C, bk)
    p, q = C.shape
    if J.shape != (p, p) or B.shape != (q, q):
        raise ContractViolation("Sylvester dimensions mismatch")
    if p == 0 or q == 0:
        return bk.zeros(p, q)
    if bk.exact:
        # column-major vec: vec(XB) = (B^T kron I) vec X, vec(JX) = (I kron J) vec X
        K = np.kron(B.T, bk.eye(p)) - np.kron(bk.eye(q), J)
        K = bk.asarray(K)
        if bk.rank(K) < p * q:
            raise NoUniqueSolution("J and B share an eigenvalue")
        c = C.T.reshape(p * q, 1)
        x = bk.solve(K, c)
        return x.reshape(q, p).T.copy()
    import scipy.linalg as sla

    ej = np.linalg.eigvals(J)
    eb = np.linalg.eigvals(B)
    gap = min(abs(a - b) for a in ej for b in eb)
    if gap <= bk.policy.cluster_eps * max(1.0, bk.norm(J), bk.norm(B)):
        raise NoUniqueSolution("J and B share an eigenvalue")
    return sla.solve_sylvester(-J, B, C)


# ---------------------------------------------------------------- SVD


def svd_grouped(M, bk: Backend | None = None):
    """(U, V, values) with U* M V = a1 I + ... + ak I + 0, a1 > ... > ak > 0.

    ``values`` is a list of (a, multiplicity).
    """
    bk = _bk(M, bk)
    r, c = M.shape
    if bk.exact:
        H = bk.mm(ct(M), M)
        eig = [(lam, m) for lam, m in bk.eigenvalues(H)] if c else []
        eig.sort(key=lambda p: -p[0].re)
        vcols, ucols, values = [], [], []
        for lam, m in eig:
            K = bk.nullspace(H - lam * bk.eye(c))
            if not lam:
                continue
            Vb = bk.orthonormal_basis(K)
            a = bk.sqrt_nonneg(lam)
            values.append((a, m))
            for j in range(Vb.shape[1]):
                vcols.append(Vb[:, j])
                ucols.append(bk.mm(M, Vb[:, j : j + 1])[:, 0] / a)
        V1 = np.column_stack(vcols) if vcols else bk.zeros(c, 0)
        U1 = np.column_stack(ucols) if ucols else bk.zeros(r, 0)
        V = np.hstack([V1, bk.orthonormal_complement(V1, c)]) if c else bk.zeros(0, 0)
        U = np.hstack([U1, bk.orthonormal_complement(U1, r)]) if r else bk.zeros(0, 0)
        return U, V, values
    if M.size == 0:
        return bk.eye(r), bk.eye(c), []
    U, s, vh = np.linalg.svd(M)
    k = bk._rank_from_s(s)
    values = []
    for x in s[:k]:
        if values and abs(values[-1][0] - x) <= bk.policy.cluster_eps * max(1.0, s[0]):
            a, m = values[-1]
            values[-1] = ((a * m + x) / (m + 1), m + 1)
        else:
            values.append((float(x), 1))
    return U, ct(vh), [(complex(a), m) for a, m in values]


# ---------------------------------------------------------------- inertia


def hermitian_inertia(D, bk: Backend | None = None):
    """(S, p, q, z) with S* D S = I_p + (-I_q) + 0_z."""
    bk = _bk(D, bk)
    _square(D)
    if not bk.is_hermitian(D):
        raise ContractViolation("matrix is not Hermitian")
    n = D.shape[0]
    S, (p, q, z) = bk.normalized_basis(D, bk.eye(n))
    return S, p, q, z


# ---------------------------------------------------------------- staircase


def unitary_staircase(M, bk: Backend | None = None):
    """(Q, T, blocks) with Q* M Q = T block upper triangular.

    ``blocks`` is the list of (lam, size) of the diagonal blocks lam*I,
    ordered so that eigenvalues ascend and, within one eigenvalue, the
    sizes follow its Weyr characteristic.
    """
    bk = _bk(M, bk)
    _square(M)
    n = M.shape[0]
    B = bk.eye(n)
    cols = []
    blocks = []
    eig = [lam for lam, _ in bk.eigenvalues(M)]
    for lam in eig:
        while B.shape[1]:
            A = bk.mm(ct(B), M, B)
            k = A.shape[0]
            K = bk.nullspace(A - lam * bk.eye(k))
            if K.shape[1] == 0:
                break
            Kb = bk.orthonormal_basis(K)
            blocks.append((lam, Kb.shape[1]))
            cols.extend(bk.mm(B, Kb)[:, j] for j in range(Kb.shape[1]))
            B = bk.mm(B, bk.orthonormal_complement(Kb))
    Q = np.column_stack(cols) if cols else bk.eye(0)
    T = bk.mm(ct(Q), M, Q)
    if not bk.exact:
        # zero the strictly lower block part and snap diagonal blocks
        offs = np.cumsum([0] + [s for _, s in blocks])
        for i, (lam, s) in enumerate(blocks):
            T[offs[i] : offs[i + 1], offs[i] : offs[i + 1]] = complex(lam) * np.eye(s)
            T[offs[i + 1] :, offs[i] : offs[i + 1]] = 0
    return Q, T, blocks


def order_key(lam):
    return eigen_key(lam)
