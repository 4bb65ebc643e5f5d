"""Semiunitary quiver representations as one block matrix.

Every vertex becomes one or more copies of a pair of strips (isotropic
part first, unitary part second). A vertex needs as many copies as the
largest number of parallel arrows entering it from a single source; the
k-th such arrow lands in the k-th copy of its target and the first copy of
its source. Copies of one vertex are tied, all other upper blocks vanish
except the isotropic-to-unitary corner inside each copy, and those
corners are tied across copies.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..backend import EXACT, Backend
from ..errors import ContractViolation
from ..scalars import GaussQ
from .spec import ReducedAlgebraSpec, flip_permutation

__all__ = ["QuiverSpec", "quiver_encode", "quiver_layout"]


@dataclass(frozen=True)
class QuiverSpec:
    """Vertices with (n, m) space dimensions and arrows (source, target)."""

    vertices: tuple  # ((name, n, m), ...)
    arrows: tuple  # ((name, source, target), ...)

    def __post_init__(self):
        names = [v[0] for v in self.vertices]
        if len(set(names)) != len(names):
            raise ContractViolation("vertex names must be distinct")
        for name, n, m in self.vertices:
            if not 0 <= m <= n:
                raise ContractViolation(f"vertex {name}: need 0 <= m <= n")
        for a, s, t in self.arrows:
            if s not in names or t not in names:
                raise ContractViolation(f"arrow {a} has an unknown endpoint")

    @classmethod
    def from_dict(cls, doc: dict) -> "QuiverSpec":
        vertices = tuple((v["name"], int(v["n"]), int(v["m"])) for v in doc["vertices"])
        arrows = tuple((a["name"], a["source"], a["target"]) for a in doc["arrows"])
        return cls(vertices, arrows)

    def dims(self) -> dict:
        return {name: (n, m) for name, n, m in self.vertices}


def quiver_layout(q: QuiverSpec):
    """Copies per vertex, strip list and the block position of every arrow.

    Returns ``(strips, placement)``: ``strips`` lists (vertex, copy, part)
    with part 0 isotropic and 1 unitary, ``placement[arrow]`` is the pair of
    strip-pair starts (target copy index, source copy index) in ``strips``.
    """
    parallel = Counter((s, t) for _, s, t in q.arrows)
    copies = {name: 1 for name, _, _ in q.vertices}
    for (s, t), k in parallel.items():
        copies[t] = max(copies[t], k)
    strips = []
    start = {}
    for name, _, _ in q.vertices:
        for c in range(copies[name]):
            start[(name, c)] = len(strips)
            strips.append((name, c, 0))
            strips.append((name, c, 1))
    seen = Counter()
    placement = {}
    for a, s, t in q.arrows:
        k = seen[(s, t)]
        seen[(s, t)] += 1
        placement[a] = (start[(t, k)], start[(s, 0)])
    return strips, placement


def quiver_encode(q: QuiverSpec, matrices: dict, bk: Backend = EXACT):
    """(M, spec) such that (Lambda, U)-similarity of M is the quiver's classification.

    ``matrices[arrow]`` is the n_target x n_source matrix of the arrow in
    semiorthonormal bases with the unitary part first.
    """
    dims = q.dims()
    strips, placement = quiver_layout(q)
    if not strips:
        # no vertices: one empty block keeps the partition nonempty
        return bk.zeros(0, 0), ReducedAlgebraSpec.build([0])
    sizes = []
    for name, c, part in strips:
        n, m = dims[name]
        sizes.append(n - m if part == 0 else m)
    offs = np.cumsum([0] + sizes)
    N = int(offs[-1])
    M = bk.zeros(N, N)
    for a, s, t in q.arrows:
        X = bk.asarray(matrices[a])
        (nt, mt), (ns, ms) = dims[t], dims[s]
        if X.shape != (nt, ns):
            raise ContractViolation(f"arrow {a} needs a {nt} x {ns} matrix, got {X.shape}")
        rt, cs = placement[a]
        Xf = X[np.ix_(flip_permutation(nt, mt), flip_permutation(ns, ms))]
        M[offs[rt] : offs[rt] + nt, offs[cs] : offs[cs] + ns] = Xf
    equiv, equations, unitary = [], [], []
    first = {}
    one = GaussQ(1)
    for k, (name, c, part) in enumerate(strips):
        if part == 1:
            unitary.append(k)
        key = (name, part)
        if key in first:
            equiv.append((first[key], k))
        else:
            first[key] = k
    t = len(strips)
    for i in range(t):
        for j in range(i + 1, t):
            vi, ci, pi = strips[i]
            vj, cj, pj = strips[j]
            if (vi, ci) == (vj, cj) and (pi, pj) == (0, 1):
                if ci > 0:
                    equations.append({(i, j): one, (first[(vi, 0)], first[(vi, 1)]): -one})
                continue
            equations.append({(i, j): one})
    spec = ReducedAlgebraSpec.build(sizes, equiv, equations, unitary)
    return M, spec
