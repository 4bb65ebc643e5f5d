"""Bounded operators on semiunitary spaces.

* ``reduce_bounded``: ordered Schur form of the unitary block, Jordan form
  of the isotropic block, and Sylvester sweeps that clear every coupling
  block joining different eigenvalues.
* ``seminormal_summands``: canonical summands read off from similarity
  invariants.
* ``seminormal_canonical_basis``: an explicit semiunitary basis change
  producing the canonical block-direct sum; an independent route to the
  same summands.
* ``verify_t22`` and ``t22_instance``: the multiplicity inequalities for
  indecomposable bounded operators and a generator of certified
  indecomposable inputs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .backend import Backend, ct
from .errors import (
    ContractViolation,
    HypothesisViolation,
    InternalInconsistency,
)
from .kernel import jordan_block, jordan_structure, schur_ordered, sylvester_solve
from .scalars import GaussQ, eigen_key
from .semiunitary import (
    KVMatrix,
    OperatorSummand,
    SemiunitarySpace,
    SemiunitaryTransform,
    apply_similarity,
    is_bounded,
    is_metric,
    is_selfadjoint,
    is_seminormal,
    random_transform,
    sort_summands,
    summands_to_kv,
)

__all__ = [
    "ReducedForm33",
    "reduce_bounded",
    "check_reduced_form",
    "seminormal_summands",
    "seminormal_canonical_basis",
    "selfadjoint_canon",
    "metric_canon",
    "MultiplicityReport",
    "EigenReport",
    "verify_t22",
    "t22_instance",
    "is_indecomposable",
]


# ---------------------------------------------------------------- helpers


class _Matcher:
    """Identifies eigenvalues computed separately (exact: equality)."""

    def __init__(self, bk: Backend, radius: float = 0.0):
        self.bk = bk
        self.radius = radius
        self.reps: list = []

    def key(self, lam):
        if self.bk.exact:
            return lam
        for r in self.reps:
            if abs(complex(r) - complex(lam)) <= self.radius:
                return r
        self.reps.append(lam)
        return lam


def _matcher_for(bk, M):
    if bk.exact:
        return _Matcher(bk)
    return _Matcher(bk, 4 * bk.cluster_radius(M))


def _groups(diag_vals, same):
    """Consecutive runs of equal values: list of (value, start, stop)."""
    out = []
    for i, v in enumerate(diag_vals):
        if out and same(out[-1][0], v):
            out[-1] = (out[-1][0], out[-1][1], i + 1)
        else:
            out.append((v, i, i + 1))
    return out


# ---------------------------------------------------------------- reduce_bounded


@dataclass
class ReducedForm33:
    """Result of ``reduce_bounded``.

    ``eigen_order`` lists (lam, multiplicity) of the unitary block in
    diagonal order; ``jordan_blocks`` lists (mu, size) of the isotropic
    block.
    """

    transform: SemiunitaryTransform
    result: KVMatrix
    eigen_order: list
    jordan_blocks: list


def reduce_bounded(A: KVMatrix, diagonal: bool = False) -> ReducedForm33:
    """Reduce a bounded k-v matrix by semiunitary similarity.

    With ``diagonal=True`` the unitary block is assumed normal and the
    triangular factor is cleaned to a diagonal one (float backend).
    """
    bk = A.bk
    if not is_bounded(A):
        raise ContractViolation("operator is not bounded")
    m, n = A.m, A.n
    k = n - m
    Q, T = schur_ordered(A.A11, bk, shape="lower")
    if not bk.exact:
        T = np.diag(np.diag(T)) if diagonal else np.tril(T)
    jd = jordan_structure(A.A22, bk, with_basis=True)
    P = jd.S if k else bk.eye(0)
    S = SemiunitaryTransform(Q, bk.zeros(k, m), P, bk, check=False)
    R = apply_similarity(A, S).mat.copy()
    R[:m, :m] = T
    R[:m, m:] = bk.zeros(m, k)
    if k:
        R[m:, m:] = jd.J
    same = bk.same_scalar
    tgroups = _groups([T[i, i] for i in range(m)], same)
    jblocks = jd.blocks()
    joffs = np.cumsum([0] + [s for _, s in jblocks])
    Sfull = S.full
    # clear C_qp for lam_p != mu_q; column groups right to left so that
    # the spill into earlier column groups is handled later
    for lam, a, b in reversed(tgroups):
        Tpp = R[a:b, a:b]
        for q, (mu, s) in enumerate(jblocks):
            if same(lam, mu):
                continue
            r0, r1 = m + joffs[q], m + joffs[q + 1]
            C = R[r0:r1, a:b]
            if bk.is_zero_matrix(C, scale=max(1.0, bk.norm(R))):
                continue
            Jq = R[r0:r1, r0:r1]
            X = sylvester_solve(Jq, Tpp, C, bk)
            E = bk.eye(n)
            E[r0:r1, a:b] = X
            Einv = bk.eye(n)
            Einv[r0:r1, a:b] = -X
            R = bk.mm(Einv, R, E)
            Sfull = bk.mm(Sfull, E)
            if not bk.exact:
                R[r0:r1, a:b] = 0
    S = SemiunitaryTransform.from_matrix(Sfull, m, bk, check=False)
    eig_order = [(lam, b - a) for lam, a, b in tgroups]
    return ReducedForm33(S, KVMatrix(R, m, bk), eig_order, jblocks)


def check_reduced_form(A: KVMatrix, rf: ReducedForm33) -> bool:
    """Verify the reduced-form contract, including the witness."""
    bk = A.bk
    R = rf.result
    m = R.m
    if not bk.equal(apply_similarity(A, rf.transform).mat, R.mat) if bk.exact else not bk.equal(
        bk.mm(A.mat, rf.transform.full), bk.mm(rf.transform.full, R.mat)
    ):
        return False
    if not bk.is_zero_matrix(R.A12):
        return False
    # A11 lower triangular with grouped diagonal
    T = R.A11
    for i in range(m):
        for j in range(i + 1, m):
            if not bk.is_zero(T[i, j], scale=max(1.0, bk.norm(T))):
                return False
    offs = [0]
    for lam, mult in rf.eigen_order:
        offs.append(offs[-1] + mult)
        for i in range(offs[-2], offs[-1]):
            if not bk.same_scalar(T[i, i], lam):
                return False
    J = bk.direct_sum(*[jordan_block(s, mu, bk) for mu, s in rf.jordan_blocks]) if rf.jordan_blocks else bk.zeros(0, 0)
    if not bk.equal(R.A22, J):
        return False
    joffs = np.cumsum([0] + [s for _, s in rf.jordan_blocks])
    for p, (lam, _) in enumerate(rf.eigen_order):
        for q, (mu, _) in enumerate(rf.jordan_blocks):
            if bk.same_scalar(lam, mu):
                continue
            blk = R.A21[joffs[q] : joffs[q + 1], offs[p] : offs[p + 1]]
            if not bk.is_zero_matrix(blk, scale=max(1.0, bk.norm(R.mat))):
                return False
    return True


# ---------------------------------------------------------------- invariant route


def _jordan_counts(M, bk, match):
    if M.shape[0] == 0:
        return {}
    jd = jordan_structure(M, bk)
    out = {}
    for lam in jd.order:
        out.setdefault(match.key(lam), []).extend(jd.sizes[lam])
    return out


def _solve_unit_sizes(S_sizes, D_sizes, k):
    """Sizes T (sub-multiset of S) with (S - T) + {t-1 : t in T, t >= 2} = D.

    Counting by size gives t_c = S_c - D_c + t_(c+1), so T is forced; it is
    then checked for consistency.  Returns None if no such T exists.
    """
    Sc, Dc = Counter(S_sizes), Counter(D_sizes)
    top = max(S_sizes, default=0)
    t = {top + 1: 0}
    for c in range(top, 0, -1):
        t[c] = Sc[c] - Dc[c] + t[c + 1]
        if t[c] < 0 or t[c] > Sc[c]:
            return None
    T = [c for c in range(top, 0, -1) for _ in range(t[c])]
    if len(T) != k:
        return None
    rebuilt = Counter(S_sizes) - Counter(T) + Counter(c - 1 for c in T if c >= 2)
    if rebuilt != Dc:
        return None
    return T


def seminormal_summands(A: KVMatrix) -> list:
    """Canonical summands of a seminormal operator, sorted canonically."""
    bk = A.bk
    if not is_seminormal(A):
        raise ContractViolation("operator is not seminormal")
    match = _matcher_for(bk, A.mat)
    full = _jordan_counts(A.mat, bk, match)
    unit = {}
    if A.m:
        for lam, mult in bk.eigenvalues(A.A11):
            key = match.key(lam)
            unit[key] = unit.get(key, 0) + mult
    iso = _jordan_counts(A.A22, bk, match)
    out = []
    for lam, sizes in full.items():
        k = unit.get(lam, 0)
        T = _solve_unit_sizes(sizes, iso.get(lam, []), k)
        if T is None:
            raise InternalInconsistency("no consistent split of Jordan sizes into unitary summands")
        rest = Counter(sizes) - Counter(T)
        out += [OperatorSummand(s, lam, 1) for s in T]
        out += [OperatorSummand(s, lam, 0) for s in rest.elements()]
    for lam in set(unit) | set(iso):
        if lam not in full:
            raise InternalInconsistency("eigenvalue of a diagonal block missing from the full spectrum")
    return sort_summands(out)


def selfadjoint_canon(A: KVMatrix) -> list:
    if not is_selfadjoint(A):
        raise ContractViolation("operator is not selfadjoint")
    out = seminormal_summands(A)
    for s in out:
        if s.l == 1 and not A.bk.is_real(s.lam):
            raise InternalInconsistency("selfadjoint summand with non-real eigenvalue")
    return out


def metric_canon(A: KVMatrix) -> list:
    if not is_metric(A):
        raise ContractViolation("operator is not metric")
    out = seminormal_summands(A)
    for s in out:
        if s.l == 1:
            z = s.lam
            mod2 = z.abs2() if isinstance(z, GaussQ) else abs(complex(z)) ** 2
            if not A.bk.same_scalar(A.bk.scalar(mod2), A.bk.scalar(1)):
                raise InternalInconsistency("metric summand off the unit circle")
    return out


# ---------------------------------------------------------------- constructive route


def _pinv_rows(X, bk):
    """Nonsingular G with G X = [I; 0] for X of full column rank."""
    c, r = X.shape
    Xh = ct(X)
    L = bk.mm(bk.inv(bk.mm(Xh, X)), Xh)
    # left null vectors: rows k with k X = 0, i.e. columns of null(X^T)
    K = bk.nullspace(X.T).T if c > r else bk.zeros(0, c)
    return np.vstack([L, K]) if c else bk.zeros(0, 0)


def seminormal_canonical_basis(A: KVMatrix):
    """(S, C) with S^-1 A S = C, the sorted canonical assembly.

    Steps: reduce the operator with a diagonal unitary block; then, for
    each eigenvalue, move every unitary vector so that it maps onto chain
    tops only, and bring the coefficient matrix of those tops into the
    form where each unitary vector pairs with at most one chain.
    """
    bk = A.bk
    if not is_seminormal(A):
        raise ContractViolation("operator is not seminormal")
    rf = reduce_bounded(A, diagonal=True)
    R = rf.result.mat
    n, m = A.n, A.m
    scale = max(1.0, bk.norm(R))
    zero = lambda M: bk.is_zero_matrix(M, scale=scale)  # noqa: E731
    joffs = np.cumsum([0] + [s for _, s in rf.jordan_blocks])
    # per eigenvalue: unitary coordinates and chains (offset, size)
    match = _matcher_for(bk, R)
    groups: dict = {}
    uoff = 0
    for lam, mult in rf.eigen_order:
        g = groups.setdefault(match.key(lam), {"units": [], "chains": []})
        g["units"].extend(range(uoff, uoff + mult))
        uoff += mult
    for q, (mu, s) in enumerate(rf.jordan_blocks):
        g = groups.setdefault(match.key(mu), {"units": [], "chains": []})
        g["chains"].append((m + int(joffs[q]), s))
    pieces = []  # (summand, unitary column or None, list of chain columns)
    for lam, g in groups.items():
        pieces += _canon_one_eigenvalue(R, lam, g["units"], g["chains"], n, bk, zero)
    pieces = sort_summands(pieces, get=lambda p: p[0])
    ucols = [p[1] for p in pieces if p[1] is not None]
    icols = [c for p in pieces for c in p[2]]
    if len(ucols) != m or len(ucols) + len(icols) != n:
        raise InternalInconsistency("canonical basis has the wrong size")
    Sloc = np.column_stack(ucols + icols) if n else bk.zeros(0, 0)
    Sfull = bk.mm(rf.transform.full, Sloc)
    S = SemiunitaryTransform.from_matrix(Sfull, m, bk, check=False)
    summands = [p[0] for p in pieces]
    C = summands_to_kv(summands, bk)
    if bk.exact:
        if not bk.equal(bk.mm(A.mat, Sfull), bk.mm(Sfull, C.mat)):
            raise InternalInconsistency("witness does not reproduce the canonical form")
        if not bk.is_unitary(S.S11):
            raise InternalInconsistency("witness leading block is not unitary")
    else:
        resid = bk.mm(A.mat, Sfull) - bk.mm(Sfull, C.mat)
        if not bk.is_zero_matrix(resid, scale=max(1.0, bk.norm(A.mat)) * max(1.0, bk.norm(Sfull)) * 1e3):
            raise InternalInconsistency("witness does not reproduce the canonical form")
    return S, C


def _canon_one_eigenvalue(R, lam, units, chains, n, bk, zero):
    """Summands and basis vectors for one eigenvalue block of a reduced form."""
    lam_s = bk.scalar(lam)
    B = R - lam_s * bk.eye(n)
    k = len(units)
    c = len(chains)
    # chains come sorted by size descending from the Jordan structure
    order = sorted(range(c), key=lambda j: -chains[j][1])
    chains = [chains[j] for j in order]
    sizes = [s for _, s in chains]
    # corrected unitary vectors and the top-coefficient matrix F (c x k)
    U0 = bk.zeros(n, k)
    F = bk.zeros(c, k)
    for i, u in enumerate(units):
        vec = bk.zeros(n, 1)
        vec[u, 0] = bk.scalar(1)
        img = bk.mm(B, vec)[:, 0]
        w = bk.zeros(n, 1)
        for j, (o, s) in enumerate(chains):
            F[j, i] = img[o]
            for h in range(1, s):
                w[o + h - 1, 0] = img[o + h]
        U0[:, i] = (vec - w)[:, 0]
    if not bk.exact:
        # the unitary images must lie in the chain span of this eigenvalue
        check = bk.mm(B, U0)
        tops = [o for o, _ in chains]
        rest = np.delete(check, tops, axis=0) if check.size else check
        if rest.size and not zero(rest):
            raise InternalInconsistency("unitary image leaves the eigenvalue block")
    Gacc = bk.eye(c)
    W = bk.eye(k)  # remaining unitary directions (orthonormal columns)
    Ycols = []  # (column vector in k-space, chain index)
    nonpivot = []
    distinct = sorted(set(sizes), reverse=True)
    for s in distinct:
        rows = [j for j in range(c) if sizes[j] == s]
        Fcur = bk.mm(Gacc, F)
        if W.shape[1] == 0:
            nonpivot += rows
            continue
        X = bk.mm(Fcur[rows, :], W)
        if zero(X):
            nonpivot += rows
            continue
        Zc = bk.orthonormal_basis(bk.nullspace(X)) if X.shape[1] else bk.zeros(0, 0)
        Yc = bk.orthonormal_complement(Zc, W.shape[1])
        Y = bk.mm(W, Yc)
        Z = bk.mm(W, Zc)
        XY = bk.mm(Fcur[rows, :], Y)
        r = Y.shape[1]
        Gs = _pinv_rows(XY, bk)
        Gstep = bk.eye(c)
        Gstep[np.ix_(rows, rows)] = Gs
        Fnew = bk.mm(Gstep, Fcur)
        pivots = rows[:r]
        # cancel pivot columns in rows of shorter chains
        Gcan = bk.eye(c)
        FY = bk.mm(Fnew, Y)
        for j in range(c):
            if sizes[j] < s:
                for a, pr in enumerate(pivots):
                    Gcan[j, pr] = -FY[j, a]
        Gacc = bk.mm(Gcan, Gstep, Gacc)
        for a, pr in enumerate(pivots):
            Ycols.append((Y[:, a], pr))
        nonpivot += rows[r:]
        W = Z
    # new chain tops: columns of tops * Gacc^-1
    Tops = bk.zeros(n, c)
    for j, (o, _) in enumerate(chains):
        Tops[o, j] = bk.scalar(1)
    NewTops = bk.mm(Tops, bk.inv(Gacc)) if c else Tops
    pieces = []

    def chain_cols(j):
        out = [NewTops[:, j]]
        for _ in range(sizes[j] - 1):
            out.append(bk.mm(B, out[-1].reshape(n, 1))[:, 0])
        return out

    for y, pr in Ycols:
        u = bk.mm(U0, y.reshape(k, 1))[:, 0]
        pieces.append((OperatorSummand(sizes[pr] + 1, lam, 1), u, chain_cols(pr)))
    for a in range(W.shape[1]):
        u = bk.mm(U0, W[:, a : a + 1])[:, 0]
        pieces.append((OperatorSummand(1, lam, 1), u, []))
    for j in nonpivot:
        pieces.append((OperatorSummand(sizes[j], lam, 0), None, chain_cols(j)))
    return pieces


# ---------------------------------------------------------------- multiplicities


@dataclass
class EigenReport:
    lam: object
    shared: bool
    alg_mult_A1: int
    geom_mult_A0: int
    geom_mult_A1: int
    jordan_counts_A0: dict
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.checks.values())


@dataclass
class MultiplicityReport:
    eigenvalues: list
    indecomposable_asserted: bool

    @property
    def all_pass(self):
        return all(e.passed for e in self.eigenvalues)


def verify_t22(A: KVMatrix, assert_indecomposable: bool = True) -> MultiplicityReport:
    """Per-eigenvalue multiplicity checks for an indecomposable bounded operator."""
    bk = A.bk
    if A.m == 0 or A.m == A.n:
        raise HypothesisViolation("need both a nonzero isotropic part and a nonzero unitary quotient")
    if not is_bounded(A):
        raise ContractViolation("operator is not bounded")
    match = _matcher_for(bk, A.mat)
    a1 = {}
    for lam, mult in bk.eigenvalues(A.A11):
        a1[match.key(lam)] = mult
    a0 = _jordan_counts(A.A22, bk, match)
    out = []
    for lam in sorted(a0, key=eigen_key):
        sizes = a0[lam]
        counts = dict(sorted(Counter(sizes).items()))
        shared = lam in a1
        alg1 = a1.get(lam, 0)
        if shared:
            geo1 = A.m - bk.rank(A.A11 - bk.scalar(lam) * bk.eye(A.m))
        else:
            geo1 = 0
        geo0 = len(sizes)
        rep = EigenReport(lam, shared, alg1, geo0, geo1, counts)
        rep.checks = {
            "a": shared,
            "b": alg1 >= geo0,
            "c": geo1 >= max(counts.values()),
        }
        out.append(rep)
    return MultiplicityReport(out, assert_indecomposable)


# ---------------------------------------------------------------- indecomposable instances


def _endomorphism_basis(A: KVMatrix):
    """Basis of {X : XA = AX, X maps the isotropic part into itself}."""
    bk = A.bk
    n, m = A.n, A.m
    M = A.mat
    # unknown positions: all except the upper-right block
    pos = [(i, j) for i in range(n) for j in range(n) if not (i < m and j >= m)]
    idx = {p: t for t, p in enumerate(pos)}
    rows = []
    for i in range(n):
        for j in range(n):
            row = [GaussQ.ZERO if bk.exact else 0j] * len(pos)
            # (XA - AX)[i, j] = sum_k X[i,k] A[k,j] - A[i,k] X[k,j]
            for kk in range(n):
                if M[kk, j] and (i, kk) in idx:
                    row[idx[(i, kk)]] = row[idx[(i, kk)]] + M[kk, j]
                if M[i, kk] and (kk, j) in idx:
                    row[idx[(kk, j)]] = row[idx[(kk, j)]] - M[i, kk]
            if any(bool(x) for x in row):
                rows.append(row)
    K = bk.nullspace(bk.asarray(rows)) if rows else bk.eye(len(pos))
    basis = []
    for t in range(K.shape[1]):
        X = bk.zeros(n, n)
        for (i, j), v in zip(pos, K[:, t]):
            X[i, j] = v
        basis.append(X)
    return basis


def _is_nilpotent_algebra(gens, n, bk) -> bool:
    """True iff the algebra generated by ``gens`` (n x n) is nilpotent.

    W_k, the span of all words of length k applied to C^n, is pushed
    through the generators; the algebra is nilpotent iff some W_k is 0,
    and then already W_n = 0.
    """
    gens = [G for G in gens if not bk.is_zero_matrix(G)]
    if not gens:
        return True
    W = bk.eye(n)
    for _ in range(n + 1):
        img = np.hstack([bk.mm(G, W) for G in gens])
        if bk.is_zero_matrix(img):
            return True
        W = bk.column_basis(img)
        if W.shape[1] == 0:
            return True
    return False


def is_indecomposable(A: KVMatrix) -> bool:
    """Exact certificate of indecomposability under semiunitary similarity.

    Let E be the endomorphisms of the operator that keep the isotropic
    part invariant, E11 their induced maps on the unitary quotient and K
    the ones inducing zero there.  A semiunitary splitting exists iff
    some X in E with Hermitian X11 has two eigenvalues; that happens iff
    E11 and its adjoint share more than the scalars, or K is not nil.
    """
    bk = A.bk
    if not bk.exact:
        raise ContractViolation("certificate requires the exact backend")
    n, m = A.n, A.m
    basis = _endomorphism_basis(A)
    if m:
        top = bk.asarray([[x for x in X[:m, :m].flat] for X in basis]).T  # m*m x dim E
        r1 = bk.rank(top)
        adj = bk.asarray([[x for x in ct(X[:m, :m]).flat] for X in basis]).T
        both = bk.rank(np.hstack([top, adj]))
        if 2 * r1 - both > 1:
            return False
        coeffs = bk.nullspace(top)
    else:
        coeffs = bk.eye(len(basis))
    K = []
    for t in range(coeffs.shape[1]):
        X = bk.zeros(n, n)
        for c, B in zip(coeffs[:, t], basis):
            if c:
                X = X + B * c
        K.append(X)
    return _is_nilpotent_algebra(K, n, bk)


def t22_instance(unit_dim: int, chain_counts, lam=0, seed=0, bk: Backend | None = None, conjugate: bool = False,
                 max_tries: int = 200) -> KVMatrix:
    """Certified indecomposable bounded operator with a shared eigenvalue.

    ``chain_counts[i-1]`` is the number of isotropic Jordan chains of
    length i.  The unitary block is lam + (random strictly lower matrix);
    the coupling sends unitary vectors onto chain tops through a matrix
    with independent rows, so there must be at most ``unit_dim`` chains.
    """
    from .backend import EXACT

    bk = bk or EXACT
    chain_sizes = [i + 1 for i, c in enumerate(chain_counts) for _ in range(c)]
    chain_sizes.sort(reverse=True)
    p = len(chain_sizes)
    k = unit_dim
    if k < 1 or p < 1 or p > k or any(c < 0 for c in chain_counts):
        raise ContractViolation("need 1 <= number of chains <= unitary dimension")
    n = k + sum(chain_sizes)
    rng = np.random.default_rng(seed)
    lam_s = bk.scalar(lam)
    need = max(chain_counts)  # geometric multiplicity the unitary block must reach
    for _ in range(max_tries):
        # nilpotent unitary block with at least ``need`` Jordan chains:
        # conjugate of a Jordan matrix by a unit lower triangular P
        g = int(rng.integers(need, k + 1))
        parts = _random_partition(k, g, rng)
        P = bk.eye(k)
        for i in range(k):
            for j in range(i):
                if rng.random() < 0.5:
                    P[i, j] = bk.scalar(int(rng.integers(-2, 3)))
        Jb = bk.direct_sum(*[jordan_block(s, 0, bk) for s in parts])
        B0 = bk.mm(P, Jb, bk.inv(P))
        F = bk.zeros(p, k)
        for i in range(p):
            for j in range(k):
                if rng.random() < 0.7:
                    F[i, j] = bk.scalar(int(rng.integers(-2, 3)))
        if bk.rank(F) < p:
            continue
        J = bk.direct_sum(*[jordan_block(s, 0, bk) for s in chain_sizes])
        C = bk.zeros(n - k, k)
        off = 0
        for i, s in enumerate(chain_sizes):
            C[off, :] = F[i, :]
            off += s
        A0 = KVMatrix.from_blocks(B0, bk.zeros(k, n - k), C, J, bk)
        if bk.exact and not is_indecomposable(A0):
            continue
        A = KVMatrix(A0.mat + lam_s * bk.eye(n), k, bk)
        if conjugate:
            A = apply_similarity(A, random_transform(SemiunitarySpace(n, k), rng, bk))
        return A
    raise ContractViolation("no indecomposable instance found for this shape")


def _random_partition(k, g, rng):
    """Random composition of k into g positive parts."""
    cuts = sorted(rng.choice(np.arange(1, k), size=g - 1, replace=False).tolist()) if g > 1 else []
    bounds = [0] + cuts + [k]
    return [bounds[i + 1] - bounds[i] for i in range(g)]


def trivial_t22(bk: Backend | None = None) -> KVMatrix:
    from .backend import EXACT

    return summands_to_kv([OperatorSummand(2, 0, 1)], bk or EXACT)
