"""Reduced matrix algebras and their groups of admissible transforms.

A spec describes the algebra of upper block triangular matrices with a
partition ``sizes``, an equivalence on block indices (tied diagonal blocks),
scalar linear equations between the strictly upper blocks, and the set of
indices whose diagonal blocks must be unitary.

Indices are 0-based. Equations are dicts ``{(i, j): coeff}`` over block
positions i < j; one equation reads ``sum coeff * S_ij = 0`` blockwise and
only mixes positions of a single pair of classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..backend import EXACT, Backend
from ..errors import ContractViolation, MalformedInput
from ..scalars import GaussQ
from ..semiunitary import _random_nonsingular, _small_gauss, random_unitary

__all__ = [
    "ReducedAlgebraSpec",
    "belitskii",
    "littlewood",
    "semiunitary_similarity",
    "group_sample",
    "is_group_member",
    "kv_to_isotropic_first",
    "isotropic_first_to_kv",
    "flip_permutation",
]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class ReducedAlgebraSpec:
    """Partition, tied diagonal blocks, block equations and unitary indices."""

    sizes: tuple
    classes: tuple  # class label of every index: the smallest index of its class
    equations: list = field(default_factory=list)
    unitary: frozenset = frozenset()

    @classmethod
    def build(
        cls,
        sizes: Sequence[int],
        equiv: Iterable[tuple[int, int]] = (),
        equations: Iterable[Mapping] = (),
        unitary: Iterable[int] = (),
        validate: bool = True,
    ) -> "ReducedAlgebraSpec":
        sizes = tuple(int(s) for s in sizes)
        uf = _UnionFind(len(sizes))
        for a, b in equiv:
            uf.union(int(a), int(b))
        spec = cls(
            sizes,
            tuple(uf.find(i) for i in range(len(sizes))),
            [{(int(i), int(j)): c for (i, j), c in eq.items()} for eq in equations],
            frozenset(int(u) for u in unitary),
        )
        if validate:
            spec.validate()
        return spec

    # --------------------------------------------------------------- shape
    @property
    def t(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def offsets(self) -> list[int]:
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return out

    def span(self, i: int) -> slice:
        off = self.offsets()
        return slice(off[i], off[i + 1])

    def members(self, c: int) -> list[int]:
        return [i for i in range(self.t) if self.classes[i] == c]

    def same_class(self, i: int, j: int) -> bool:
        return self.classes[i] == self.classes[j]

    def class_list(self) -> list[int]:
        return sorted(set(self.classes))

    def pair_positions(self, ci: int, cj: int) -> list[tuple[int, int]]:
        """Strictly upper positions (i, j) with i in class ci and j in class cj."""
        return [
            (i, j)
            for i in range(self.t)
            for j in range(i + 1, self.t)
            if self.classes[i] == ci and self.classes[j] == cj
        ]

    # ---------------------------------------------------------- validation
    def validate(self, bk: Backend = EXACT, closure_trials: int = 0, seed: int = 0) -> None:
        if any(s < 0 for s in self.sizes):
            raise MalformedInput("block sizes must be nonnegative")
        if self.t < 1:
            raise MalformedInput("a partition needs at least one block")
        for i in range(self.t):
            if self.sizes[i] != self.sizes[self.classes[i]]:
                raise MalformedInput(f"tied blocks {i} and {self.classes[i]} differ in size")
        for u in self.unitary:
            if not 0 <= u < self.t:
                raise MalformedInput(f"unitary index {u} out of range")
        for i in range(self.t):
            if (i in self.unitary) != (self.classes[i] in self.unitary):
                raise MalformedInput("the unitary set is not closed under the equivalence")
        for eq in self.equations:
            pairs = set()
            for i, j in eq:
                if not 0 <= i < j < self.t:
                    raise MalformedInput(f"equation position {(i, j)} is not strictly upper")
                pairs.add((self.classes[i], self.classes[j]))
            if len(pairs) > 1:
                raise MalformedInput("an equation mixes several pairs of classes")
        for trial in range(closure_trials):
            A = group_sample(self, seed + 2 * trial, bk, unitary=False)
            B = group_sample(self, seed + 2 * trial + 1, bk, unitary=False)
            if not is_group_member(bk.mm(A, B), self, bk, check_unitary=False, check_invertible=False):
                raise MalformedInput("the block equations do not define a matrix algebra")

    # ------------------------------------------------------------ geometry
    def pair_nullspace(self, ci: int, cj: int, bk: Backend):
        """(positions, basis) of the solution space of the equations of a class pair.

        ``basis`` has one column per free direction, rows follow ``positions``.
        """
        pos = self.pair_positions(ci, cj)
        if not pos:
            return pos, bk.zeros(0, 0)
        index = {p: k for k, p in enumerate(pos)}
        rows = [eq for eq in self.equations if eq and next(iter(eq)) in index]
        if not rows:
            return pos, bk.eye(len(pos))
        C = bk.zeros(len(rows), len(pos))
        for r, eq in enumerate(rows):
            for p, c in eq.items():
                C[r, index[p]] = C[r, index[p]] + bk.scalar(c)
        return pos, bk.nullspace(C)

    def dimension(self, bk: Backend = EXACT) -> int:
        """Dimension of the algebra as a complex vector space."""
        classes = self.class_list()
        dim = sum(self.sizes[c] ** 2 for c in classes)
        for ci in classes:
            for cj in classes:
                pos, V = self.pair_nullspace(ci, cj, bk)
                if pos:
                    dim += V.shape[1] * self.sizes[ci] * self.sizes[cj]
        return dim

    def to_dict(self) -> dict:
        from ..scalars import format_gauss

        def fmt(c):
            return format_gauss(c) if isinstance(c, GaussQ) else [complex(c).real, complex(c).imag]

        return {
            "sizes": list(self.sizes),
            "classes": list(self.classes),
            "unitary": sorted(self.unitary),
            "equations": [[[i, j, fmt(c)] for (i, j), c in eq.items()] for eq in self.equations],
        }


# -------------------------------------------------------------- builtins


def belitskii(n: int) -> ReducedAlgebraSpec:
    """Plain similarity of n x n matrices."""
    return ReducedAlgebraSpec.build([n])


def littlewood(n: int) -> ReducedAlgebraSpec:
    """Unitary similarity of n x n matrices."""
    return ReducedAlgebraSpec.build([n], unitary=[0])


def semiunitary_similarity(n: int, m: int) -> ReducedAlgebraSpec:
    """Semiunitary similarity on an (n, m) space, isotropic strip first."""
    if not 0 <= m <= n:
        raise MalformedInput("need 0 <= m <= n")
    return ReducedAlgebraSpec.build([n - m, m], unitary=[1])


def flip_permutation(n: int, m: int) -> list[int]:
    """Column order taking a unitary-first basis to the isotropic-first one."""
    return list(range(m, n)) + list(range(m))


def kv_to_isotropic_first(A, m: int):
    """P^-1 A P with the isotropic strip moved in front."""
    perm = flip_permutation(A.shape[0], m)
    return A[np.ix_(perm, perm)]


def isotropic_first_to_kv(M, m: int):
    n = M.shape[0]
    perm = flip_permutation(n, m)
    inv = np.argsort(perm)
    return M[np.ix_(inv, inv)]


# ------------------------------------------------------------ the group


def is_group_member(
    S,
    spec: ReducedAlgebraSpec,
    bk: Backend,
    check_unitary: bool = True,
    check_invertible: bool = True,
    scale: float | None = None,
) -> bool:
    """Whether S lies in the algebra (and in its group of admissible transforms)."""
    n = spec.n
    if S.shape != (n, n):
        return False
    sc = scale if scale is not None else max(1.0, bk.norm(S))
    sp = [spec.span(i) for i in range(spec.t)]
    for i in range(spec.t):
        for j in range(i):
            if not bk.is_zero_matrix(S[sp[i], sp[j]], scale=sc):
                return False
    for i in range(spec.t):
        c = spec.classes[i]
        if c != i and not bk.is_zero_matrix(S[sp[i], sp[i]] - S[sp[c], sp[c]], scale=sc):
            return False
    for eq in spec.equations:
        (i0, j0) = next(iter(eq))
        acc = bk.zeros(spec.sizes[i0], spec.sizes[j0])
        for (i, j), c in eq.items():
            acc = acc + S[sp[i], sp[j]] * bk.scalar(c)
        if not bk.is_zero_matrix(acc, scale=sc):
            return False
    if check_unitary:
        for i in spec.unitary:
            if spec.sizes[i] and not bk.is_unitary(S[sp[i], sp[i]]):
                return False
    if check_invertible and n and bk.rank(S) < n:
        return False
    return True


def group_sample(spec: ReducedAlgebraSpec, seed, bk: Backend = EXACT, unitary: bool = True, density: float = 0.6):
    """Random element of the group (``unitary=False``: of the algebra, any diagonal)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = spec.n
    S = bk.zeros(n, n)
    sp = [spec.span(i) for i in range(spec.t)]
    for c in spec.class_list():
        k = spec.sizes[c]
        if unitary and c in spec.unitary:
            D = random_unitary(k, rng, bk)
        else:
            D = _random_nonsingular(k, rng, bk)
        for i in spec.members(c):
            S[sp[i], sp[i]] = D
    for ci in spec.class_list():
        for cj in spec.class_list():
            pos, V = spec.pair_nullspace(ci, cj, bk)
            if not pos or not spec.sizes[ci] or not spec.sizes[cj]:
                continue
            for k in range(V.shape[1]):
                R = _sparse_block(spec.sizes[ci], spec.sizes[cj], rng, bk, density)
                for r, (i, j) in enumerate(pos):
                    if V[r, k]:
                        S[sp[i], sp[j]] = S[sp[i], sp[j]] + R * V[r, k]
    return S


def _sparse_block(r, c, rng, bk, density):
    if bk.exact:
        out = bk.zeros(r, c)
        for a in range(r):
            for b in range(c):
                if rng.random() < density:
                    out[a, b] = _small_gauss(rng, -1, 1)
        return out
    mask = rng.random((r, c)) < density
    return (rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))) * mask


# ------------------------------------------------------------ refinement


def refine(
    spec: ReducedAlgebraSpec,
    splits: Mapping[int, Sequence[int]],
    merges: Iterable[tuple[tuple[int, int], tuple[int, int]]] = (),
    local_equations: Mapping[int, Iterable[Mapping]] = (),
    new_equations: Iterable[Mapping] = (),
):
    """Split classes into sub-blocks and return (new spec, index map).

    ``splits`` maps a class label to the sizes of its sub-blocks (zero sizes
    are not allowed; every member of the class is split the same way).
    ``merges`` ties sub-block ``a`` of class ``P`` to sub-block ``b`` of
    class ``Q``. ``local_equations[P]`` are equations ``{(a, b): c}`` among
    the sub-blocks of one member of P; they are imposed on every member,
    and the off-diagonal sub-blocks of different members are tied together
    because the diagonal blocks of tied indices coincide. The index map
    sends an old index to the list of its new indices.
    """
    for c, parts in splits.items():
        if any(s <= 0 for s in parts) or sum(parts) != spec.sizes[c]:
            raise ContractViolation(f"bad split {list(parts)} of a block of size {spec.sizes[c]}")
    index_map: dict[int, list[int]] = {}
    new_sizes, origin = [], []  # origin: (old index, sub-block number)
    for i in range(spec.t):
        parts = splits.get(spec.classes[i], [spec.sizes[i]])
        index_map[i] = []
        for a, s in enumerate(parts):
            index_map[i].append(len(new_sizes))
            new_sizes.append(s)
            origin.append((i, a))
    uf = _UnionFind(len(new_sizes))
    for i in range(spec.t):
        rep = spec.classes[i]
        for a, k in enumerate(index_map[i]):
            uf.union(k, index_map[rep][a])
    for (P, a), (Q, b) in merges:
        uf.union(index_map[P][a], index_map[Q][b])
    equations = []
    for eq in spec.equations:
        (i0, j0) = next(iter(eq))
        for a in range(len(index_map[i0])):
            for b in range(len(index_map[j0])):
                equations.append({(index_map[i][a], index_map[j][b]): c for (i, j), c in eq.items()})
    one = GaussQ(1)
    for c, parts in splits.items():
        members = spec.members(c)
        for i in members[1:]:
            for a in range(len(parts)):
                for b in range(a + 1, len(parts)):
                    equations.append({(index_map[i][a], index_map[i][b]): one, (index_map[c][a], index_map[c][b]): -one})
        for eq in dict(local_equations).get(c, ()):
            equations.append({(index_map[c][a], index_map[c][b]): v for (a, b), v in eq.items()})
    equations.extend(new_equations)
    classes = tuple(uf.find(k) for k in range(len(new_sizes)))
    unitary = set()
    for k, (i, _) in enumerate(origin):
        if i in spec.unitary:
            unitary.add(classes[k])
    unitary = frozenset(k for k in range(len(new_sizes)) if classes[k] in unitary)
    new = ReducedAlgebraSpec(tuple(new_sizes), classes, [e for e in equations if e], unitary)
    return new, index_map
