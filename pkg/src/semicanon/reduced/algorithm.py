"""Canonical forms under (Lambda, U)-similarity.

The loop walks the blocks bottom row first, left to right inside a row,
finds the first block that admissible transforms can still change and
either clears it with a unipotent transform (additions from already
stable blocks reach it) or reduces it with block-diagonal transforms and
refines the algebra to the stabilizer of the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..backend import EXACT, Backend, backend_for, ct
from ..errors import ContractViolation, InternalInconsistency, MalformedInput
from ..kernel import svd_grouped, unitary_staircase, weyr_form
from ..scalars import GaussQ
from .spec import ReducedAlgebraSpec, is_group_member, refine

__all__ = [
    "AlgorithmState",
    "AdditionMap",
    "CanonicalResult",
    "block_order",
    "addition_map",
    "is_stable",
    "case_I",
    "case_II",
    "canonicalize",
    "decide_similar",
]


@dataclass
class AlgorithmState:
    M: np.ndarray
    spec: ReducedAlgebraSpec
    bk: Backend
    S: np.ndarray = None
    step_log: list = field(default_factory=list)

    def __post_init__(self):
        if self.M.shape != (self.spec.n, self.spec.n):
            raise MalformedInput(f"matrix is {self.M.shape}, partition needs {self.spec.n}")
        if self.S is None:
            self.S = self.bk.eye(self.spec.n)
        self.scale = max(1.0, self.bk.norm(self.M))

    def block(self, i: int, j: int):
        return self.M[self.spec.span(i), self.spec.span(j)]

    def stable_value(self, i: int, j: int):
        """The scalar a_ij of a block already known to be stable."""
        if not self.spec.same_class(i, j) or not self.spec.sizes[i]:
            return None
        a = self.block(i, j)[0, 0]
        return a if not self.bk.is_zero(a, self.scale) else None


@dataclass
class AdditionMap:
    """The functional x -> sum a_pj x_jq - sum x_pj a_jq on the free upper blocks.

    ``coeffs`` maps positions to scalars; ``positions``/``basis`` describe the
    solution space of the current equations for the class pair of (p, q).
    """

    pos: tuple
    coeffs: dict
    positions: list
    basis: np.ndarray
    values: list

    @property
    def is_zero(self) -> bool:
        return all(v is None for v in self.values)

    def image_dim(self, spec: ReducedAlgebraSpec) -> int:
        p, q = self.pos
        return 0 if self.is_zero else spec.sizes[p] * spec.sizes[q]


@dataclass
class CanonicalResult:
    M_can: np.ndarray
    S: np.ndarray
    step_log: list
    spec: ReducedAlgebraSpec  # the final refined spec
    exact: bool

    @property
    def label(self) -> str:
        return "canonical" if self.exact else "canonical up to TolerancePolicy"


def block_order(spec: ReducedAlgebraSpec):
    """Positions bottom row first, columns left to right."""
    for p in range(spec.t - 1, -1, -1):
        for q in range(spec.t):
            yield p, q


def addition_map(state: AlgorithmState, pos) -> AdditionMap:
    spec, bk = state.spec, state.bk
    p, q = pos
    coeffs: dict = {}

    def add(key, val):
        coeffs[key] = coeffs[key] + val if key in coeffs else val

    for j in range(q):
        a = state.stable_value(p, j)
        if a is not None:
            add((j, q), a)
    for j in range(p + 1, spec.t):
        a = state.stable_value(j, q)
        if a is not None:
            add((p, j), -a)
    positions, V = spec.pair_nullspace(spec.classes[p], spec.classes[q], bk)
    values = []
    for k in range(V.shape[1] if positions else 0):
        v = bk.scalar(0)
        for r, key in enumerate(positions):
            if key in coeffs and V[r, k]:
                v = v + coeffs[key] * V[r, k]
        values.append(None if bk.is_zero(v, state.scale) else v)
    return AdditionMap(pos, coeffs, positions, V, values)


def is_stable(state: AlgorithmState, pos, amap: AdditionMap | None = None):
    """(True, a) for a stable block with value a*I (a = 0 off the classes), else (False, None)."""
    spec, bk = state.spec, state.bk
    p, q = pos
    if not spec.sizes[p] or not spec.sizes[q]:
        return True, bk.scalar(0)
    amap = amap if amap is not None else addition_map(state, pos)
    if not amap.is_zero:
        return False, None
    B = state.block(p, q)
    if not spec.same_class(p, q):
        return (True, bk.scalar(0)) if bk.is_zero_matrix(B, state.scale) else (False, None)
    a = B[0, 0]
    if bk.is_zero_matrix(B - a * bk.eye(B.shape[0]), state.scale):
        return True, a
    return False, None


def _apply(state: AlgorithmState, T, T_inv=None):
    bk = state.bk
    T_inv = bk.inv(T) if T_inv is None else T_inv
    state.M = bk.mm(T_inv, state.M, T)
    state.S = bk.mm(state.S, T)


def case_I(state: AlgorithmState, pos, amap: AdditionMap) -> None:
    """Clear block (p, q) by a unipotent transform and freeze the additions into it."""
    spec, bk = state.spec, state.bk
    p, q = pos
    k = next(k for k, v in enumerate(amap.values) if v is not None)
    scale = amap.values[k]
    B = state.block(p, q).copy()
    sp = [spec.span(i) for i in range(spec.t)]
    E = bk.zeros(spec.n, spec.n)
    for r, (i, j) in enumerate(amap.positions):
        if amap.basis[r, k]:
            E[sp[i], sp[j]] = B * (-amap.basis[r, k] / scale)
    T = bk.eye(spec.n) + E
    _apply(state, T)
    residual = state.block(p, q)
    if not bk.is_zero_matrix(residual, state.scale):
        # the image of the addition map is all or nothing for block-scalar
        # equations, so a residual means an inconsistent state
        raise InternalInconsistency("additions did not clear the block")
    if not bk.exact:
        residual[...] = 0
    eq = {key: c for key, c in amap.coeffs.items() if key in set(amap.positions) and not bk.is_zero(c, state.scale)}
    state.spec = ReducedAlgebraSpec(spec.sizes, spec.classes, spec.equations + [eq], spec.unitary)
    state.step_log.append(_log_entry(state, pos, "I", {"equation": len(state.spec.equations) - 1}))


def _blockdiag(state: AlgorithmState, per_class: dict):
    """Block-diagonal transform with the given blocks on every member of each class."""
    spec, bk = state.spec, state.bk
    T = bk.eye(spec.n)
    for c, D in per_class.items():
        for i in spec.members(c):
            sl = spec.span(i)
            T[sl, sl] = D
    return T


def _rank_form(B, p_unitary: bool, q_unitary: bool, bk: Backend):
    """(Sp, Sq, r) with Sp^-1 B Sq = [[0, I_r], [0, 0]]."""
    n_p, n_q = B.shape
    if q_unitary:
        K = bk.orthonormal_basis(bk.nullspace(B)) if n_q else bk.zeros(0, 0)
        Sq = bk.unitary_completion(K) if n_q else bk.eye(0)
        Sq = np.hstack([Sq[:, : K.shape[1]], Sq[:, K.shape[1] :]])
    else:
        K = bk.nullspace(B)
        Sq = np.hstack([K, bk.complete_basis(K)[:, K.shape[1] :]]) if K.shape[1] < n_q else K
    r = n_q - K.shape[1]
    C = Sq[:, n_q - r :]
    BC = bk.mm(B, C)
    if p_unitary:
        U1 = bk.orthonormal_basis(BC)
        Sp = bk.unitary_completion(U1)
        # rescale the columns of Sq so that U1* B C becomes the identity
        X = bk.mm(ct(U1), BC)
        Sq = np.hstack([Sq[:, : n_q - r], bk.mm(C, bk.inv(X))])
    else:
        Sp = np.hstack([BC, bk.complete_basis(BC)[:, r:]]) if r < n_p else BC
    return Sp, Sq, r


def case_II(state: AlgorithmState, pos) -> None:
    spec, bk = state.spec, state.bk
    p, q = pos
    P, Q = spec.classes[p], spec.classes[q]
    B = state.block(p, q).copy()
    n_p, n_q = B.shape
    pu, qu = p in spec.unitary, q in spec.unitary
    one = GaussQ(1) if bk.exact else 1.0

    def zero_eqs(nparts):
        return [{(a, b): one} for a in range(nparts) for b in range(a + 1, nparts)]

    if P != Q:
        if pu and qu:
            tag = "II(d)"
            Up, Vq, values = svd_grouped(B, bk)
            mults = [m for _, m in values]
            r = sum(mults)
            target = bk.zeros(n_p, n_q)
            off = 0
            for a, m in values:
                for c in range(m):
                    target[off + c, off + c] = bk.scalar(a)
                off += m
            sizes_p = mults + ([n_p - r] if n_p > r else [])
            sizes_q = mults + ([n_q - r] if n_q > r else [])
            T = _blockdiag(state, {P: Up, Q: Vq})
            T_inv = _blockdiag(state, {P: ct(Up), Q: ct(Vq)})
            merges = [((P, a), (Q, a)) for a in range(len(mults))]
            local = {P: zero_eqs(len(sizes_p)), Q: zero_eqs(len(sizes_q))}
            info = {"values": [a for a, _ in values], "multiplicities": mults}
        else:
            tag = "II(b)" if pu else "II(c)" if qu else "II(a)"
            Sp, Sq, r = _rank_form(B, pu, qu, bk)
            target = bk.zeros(n_p, n_q)
            for c in range(r):
                target[c, n_q - r + c] = bk.scalar(1)
            sizes_p = [r] + ([n_p - r] if n_p > r else [])
            sizes_q = ([n_q - r] if n_q > r else []) + [r]
            T = _blockdiag(state, {P: Sp, Q: Sq})
            T_inv = _blockdiag(state, {P: bk.inv(Sp), Q: bk.inv(Sq)})
            merges = [((P, 0), (Q, len(sizes_q) - 1))]
            local = {}
            if pu and len(sizes_p) == 2:
                local[P] = [{(0, 1): one}]
            if qu and len(sizes_q) == 2:
                local[Q] = [{(0, 1): one}]
            info = {"rank": r}
        splits = {}
        if len(sizes_p) > 1:
            splits[P] = sizes_p
        if len(sizes_q) > 1:
            splits[Q] = sizes_q
        # merge labels refer to sub-block numbers; unsplit classes have one
    else:
        if pu:
            tag = "II(f)"
            Qm, Tm, blocks = unitary_staircase(B, bk)
            target = Tm
            sizes = [s for _, s in blocks]
            T = _blockdiag(state, {P: Qm})
            T_inv = _blockdiag(state, {P: ct(Qm)})
            merges = []
            local = {P: zero_eqs(len(sizes))}
            info = {"blocks": [(lam, s) for lam, s in blocks]}
        else:
            tag = "II(e)"
            Sw, W, layout = weyr_form(B, bk)
            target = W
            sizes, labels = [], []
            for e, (lam, weyr, jsizes) in enumerate(layout):
                lengths = sorted(set(jsizes), reverse=True)
                for lvl in range(1, len(weyr) + 1):
                    for ln in lengths:
                        if ln >= lvl:
                            sizes.append(sum(1 for s in jsizes if s == ln))
                            labels.append((e, lvl, ln))
            T = _blockdiag(state, {P: Sw})
            T_inv = _blockdiag(state, {P: bk.inv(Sw)})
            merges, local_eqs = _weyr_relations(labels, one)
            merges = [((P, a), (P, b)) for a, b in merges]
            local = {P: local_eqs}
            info = {"layout": [(lam, list(w), list(js)) for lam, w, js in layout]}
        splits = {P: sizes} if len(sizes) > 1 else {}
    _apply(state, T, T_inv)
    sl_p, sl_q = spec.span(p), spec.span(q)
    if bk.exact:
        if not bk.equal(state.M[sl_p, sl_q], target):
            raise InternalInconsistency(f"{tag} did not produce its normal form")
    else:
        if not bk.is_zero_matrix(state.M[sl_p, sl_q] - target, state.scale * 1e3):
            raise InternalInconsistency(f"{tag} did not produce its normal form")
        state.M[sl_p, sl_q] = target
    # merges on classes that were not split use sub-block 0
    merges = [((c1, a if c1 in splits else 0), (c2, b if c2 in splits else 0)) for (c1, a), (c2, b) in merges]
    new_spec, index_map = refine(spec, splits, merges, local)
    state.spec = new_spec
    info["parts"] = {str(c): list(s) for c, s in splits.items()}
    state.step_log.append(_log_entry(state, pos, tag, info))


def _weyr_relations(labels, one):
    """Ties and zeros among the sub-blocks of a Weyr matrix's commutant.

    Sub-block (e, i, l) holds the height-i vectors of the chains of length
    l for eigenvalue number e. An entry block of a commuting matrix from
    column (e, i, l) to row (e, i', l') is a free block depending only on
    (l', l, h) with h = (l' - i') - (l - i) when i' <= i and h >= 0, and is
    zero otherwise; different eigenvalues do not mix.
    """
    merges = []
    first_of_len = {}
    for a, (e, lvl, ln) in enumerate(labels):
        key = (e, ln)
        if key in first_of_len:
            merges.append((first_of_len[key], a))
        else:
            first_of_len[key] = a
    eqs = []
    groups: dict = {}
    for a, (e1, i1, l1) in enumerate(labels):
        for b in range(a + 1, len(labels)):
            e2, i2, l2 = labels[b]
            h = (l1 - i1) - (l2 - i2)
            if e1 != e2 or i1 > i2 or h < 0:
                eqs.append({(a, b): one})
                continue
            key = (e1, l1, l2, h)
            if key in groups:
                eqs.append({(a, b): one, groups[key]: -one})
            else:
                groups[key] = (a, b)
    return merges, eqs


def _log_entry(state: AlgorithmState, pos, tag: str, info: dict) -> dict:
    return {
        "position": list(pos),
        "case": tag,
        "blocks": state.spec.t,
        "algebra_dim": state.spec.dimension(state.bk),
        "info": info,
    }


def canonicalize(M, spec: ReducedAlgebraSpec, bk: Backend | None = None, max_steps: int = 10000) -> CanonicalResult:
    """(M_can, S, step log) with S^-1 M S = M_can and S admissible for ``spec``."""
    bk = bk if bk is not None else backend_for(M)
    M = bk.asarray(M)
    spec.validate(bk)
    state = AlgorithmState(M.copy(), spec, bk)
    for _ in range(max_steps):
        found = None
        for pos in block_order(state.spec):
            p, q = pos
            if not state.spec.sizes[p] or not state.spec.sizes[q]:
                continue
            amap = addition_map(state, pos)
            stable, _ = is_stable(state, pos, amap)
            if not stable:
                found = (pos, amap)
                break
        if found is None:
            break
        pos, amap = found
        if not amap.is_zero:
            case_I(state, pos, amap)
        else:
            case_II(state, pos)
    else:
        raise InternalInconsistency("canonicalization did not terminate")
    _verify(M, state, spec)
    return CanonicalResult(state.M, state.S, state.step_log, state.spec, bk.exact)


def _verify(M, state: AlgorithmState, spec: ReducedAlgebraSpec) -> None:
    bk = state.bk
    S = state.S
    lhs, rhs = bk.mm(M, S), bk.mm(S, state.M)
    if bk.exact:
        ok = bk.equal(lhs, rhs)
        member = is_group_member(S, spec, bk)
    else:
        sc = max(1.0, bk.norm(M)) * max(1.0, bk.norm(S)) * 1e3
        ok = bk.is_zero_matrix(lhs - rhs, sc)
        member = is_group_member(S, spec, bk, scale=1e3 * max(1.0, bk.norm(S)))
    if not ok:
        raise InternalInconsistency("witness does not conjugate the input to the canonical form")
    if not member:
        raise InternalInconsistency("witness is not an admissible transform of the original algebra")


def decide_similar(M, N, spec: ReducedAlgebraSpec, bk: Backend | None = None) -> bool:
    """Whether M and N are (Lambda, U)-similar: their canonical forms coincide."""
    bk = bk if bk is not None else backend_for(M)
    a = canonicalize(M, spec, bk)
    b = canonicalize(N, spec, bk)
    if bk.exact:
        return bk.equal(a.M_can, b.M_can)
    sc = max(1.0, bk.norm(a.M_can), bk.norm(b.M_can))
    return bool(np.max(np.abs(a.M_can - b.M_can), initial=0.0) <= bk.policy.cluster_eps * sc)
