"""Exact and floating realizations of the dense linear algebra primitives.

Every reduction in the package is written once against the small
interface below; ``ExactBackend`` works over the Gaussian rationals with
``numpy`` object arrays of :class:`GaussQ`, ``FloatBackend`` over
``complex128`` with a :class:`TolerancePolicy`.
"""

from __future__ import annotations

import math
import os
import random
from fractions import Fraction
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from .errors import (
    ContractViolation,
    IndeterminateSpectrum,
    MalformedInput,
    NotRepresentable,
    NumericFailure,
    UnsupportedSpectrum,
)
from .scalars import DEFAULT_POLICY, EXACT_POLICY, GaussQ, TolerancePolicy, eigen_key, to_gauss

__all__ = ["Backend", "ExactBackend", "FloatBackend", "get_backend", "backend_for", "ct"]

_EPS = np.finfo(float).eps


def ct(M):
    """Conjugate transpose for both dtypes."""
    return np.conj(M).T


def _prime_two_squares(p: int):
    """a, b with a^2 + b^2 = p for a prime p = 1 mod 4 (Hermite-Serret)."""
    from sympy.ntheory import sqrt_mod

    t = sqrt_mod(p - 1, p)
    a, b = p, t
    lim = math.isqrt(p)
    while b > lim:
        a, b = b, a % b
    c = math.isqrt(p - b * b)
    return b, c


def _small_primes(bound: int):
    sieve = bytearray([1]) * bound
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [p for p in range(bound) if sieve[p]]


_TRIAL_PRIMES = _small_primes(1 << 12)


def _factor(n: int, full: bool):
    """Prime factorization as a dict, or None when it is too expensive.

    Trial division by small primes first; the cofactor is accepted when it
    is 1, a prime or a prime square. Otherwise sympy finishes the job for
    numbers below 10**12 (or always when ``full``).
    """
    from gmpy2 import is_prime, mpz

    fac = {}
    m = mpz(n)
    for p in _TRIAL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            fac[p] = e
    m = int(m)
    if m == 1:
        return fac
    if is_prime(m):
        fac[m] = fac.get(m, 0) + 1
        return fac
    r = math.isqrt(m)
    if r * r == m and is_prime(r):
        fac[r] = fac.get(r, 0) + 2
        return fac
    if not full and m >= 10**12:
        return None
    from sympy import factorint

    for p, e in factorint(m).items():
        fac[int(p)] = fac.get(int(p), 0) + e
    return fac


@lru_cache(maxsize=8192)
def _norm_split(n: int, full: bool = False):
    """Write n = N(g) * c with g a Gaussian integer and c squarefree.

    Returns ``(c, (re, im))`` where c is a product of distinct primes
    congruent to 3 mod 4; n is a sum of two squares exactly when c == 1.
    Returns None if n could not be factored cheaply.
    """
    if n <= 0:
        raise ValueError("positive integer expected")
    fac = _factor(n, full)
    if fac is None:
        return None
    cls, re_, im_ = 1, 1, 0
    for p, e in fac.items():
        if p % 4 == 3:
            if e % 2:
                cls *= p
            re_, im_ = re_ * p ** (e // 2), im_ * p ** (e // 2)
            continue
        a, b = (1, 1) if p == 2 else _prime_two_squares(p)
        for _ in range(e):
            re_, im_ = re_ * a - im_ * b, re_ * b + im_ * a
    assert (re_ * re_ + im_ * im_) * cls == n
    return cls, (abs(re_), abs(im_))


def _two_squares(n: int):
    """Return (a, b) with a*a + b*b == n, or None."""
    if n == 0:
        return (0, 0)
    split = _norm_split(n)
    if split is None or split[0] != 1:
        return None
    return split[1]


def _rational_class(r, full: bool = False):
    """(c, g) with |r| = c * N(g), c a squarefree integer class, g in Q(i)."""
    r = mpq(r)
    p, q = abs(int(r.numerator)), int(r.denominator)
    split = _norm_split(p * q, full)
    if split is None:
        return None
    c, (a, b) = split
    return c, GaussQ(mpq(a, q), mpq(b, q))


def _four_squares(c: int):
    """Gaussian integers (x, y) with N(x) + N(y) == c."""
    for t in range(math.isqrt(c) + 1):
        for u in range(t + 1):
            rest = c - t * t - u * u
            if rest < 0:
                break
            rep = _two_squares(rest)
            if rep is not None:
                return GaussQ(t, u), GaussQ(rep[0], rep[1])
    raise AssertionError("four-square decomposition not found")


def gauss_sqrt_norm(r: mpq):
    """A Gaussian rational ``s`` with ``|s|^2 == r`` (r > 0), or None."""
    p, q = int(r.numerator), int(r.denominator)
    rep = _two_squares(p * q)
    if rep is None:
        return None
    return GaussQ(mpq(rep[0], q), mpq(rep[1], q))


def _rational_sqrt(r: mpq):
    p, q = int(r.numerator), int(r.denominator)
    a, b = math.isqrt(p), math.isqrt(q)
    if a * a == p and b * b == q:
        return mpq(a, b)
    return None


def _merge_multipliers(bound: int = 160):
    """Gaussian integers with distinct small norms, smallest first."""
    out = []
    for nrm in range(bound + 1):
        rep = _two_squares(nrm)
        if rep is not None:
            out.append((nrm, GaussQ(rep[0], rep[1])))
    return out


def _class_product(x: int, y: int) -> int:
    g = math.gcd(x, y)
    return (x // g) * (y // g)


def _reflector_to(u, bk):
    """Exact unitary H with H e1 = u for a unit column u.

    H = I - tau w w* with w = u - e1 and tau = -1 / conj(u1 - 1); the
    choice of tau makes H unitary without any square root.
    """
    k = u.shape[0]
    u1 = u[0, 0]
    if u1 == GaussQ.ONE:
        return bk.eye(k)
    w = u.copy()
    w[0, 0] = u1 - GaussQ.ONE
    tau = -(GaussQ.ONE / (u1 - GaussQ.ONE).conjugate())
    return bk.eye(k) - bk.mm(w, ct(w)) * tau


class Backend:
    exact: bool
    policy: TolerancePolicy

    # construction -------------------------------------------------------
    def asarray(self, data) -> np.ndarray:
        raise NotImplementedError

    def eye(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, r: int, c: int) -> np.ndarray:
        raise NotImplementedError

    def scalar(self, x):
        raise NotImplementedError

    def mm(self, *mats) -> np.ndarray:
        out = mats[0]
        for m in mats[1:]:
            if out.shape[1] == 0:
                out = self.zeros(out.shape[0], m.shape[1])
            else:
                out = out @ m
        return out

    def block(self, rows) -> np.ndarray:
        """Assemble a 2-D block layout; tolerates empty blocks."""
        rows = [[np.asarray(b) for b in row] for row in rows]
        heights = [max((b.shape[0] for b in row), default=0) for row in rows]
        widths = [max(rows[r][c].shape[1] for r in range(len(rows))) for c in range(len(rows[0]))]
        out = self.zeros(sum(heights), sum(widths))
        r0 = 0
        for r, row in enumerate(rows):
            c0 = 0
            for c, b in enumerate(row):
                if b.size:
                    out[r0 : r0 + b.shape[0], c0 : c0 + b.shape[1]] = b
                c0 += widths[c]
            r0 += heights[r]
        return out

    def direct_sum(self, *mats) -> np.ndarray:
        n = sum(m.shape[0] for m in mats)
        c = sum(m.shape[1] for m in mats)
        out = self.zeros(n, c)
        r0 = c0 = 0
        for m in mats:
            out[r0 : r0 + m.shape[0], c0 : c0 + m.shape[1]] = m
            r0 += m.shape[0]
            c0 += m.shape[1]
        return out

    # decisions ----------------------------------------------------------
    def is_zero(self, x, scale: float = 1.0) -> bool:
        raise NotImplementedError

    def is_zero_matrix(self, M, scale=None) -> bool:
        raise NotImplementedError

    def equal(self, A, B) -> bool:
        if A.shape != B.shape:
            return False
        return self.is_zero_matrix(A - B, scale=max(self.norm(A), self.norm(B), 1.0))

    def norm(self, M) -> float:
        if M.size == 0:
            return 0.0
        return float(np.linalg.norm(np.asarray(M, dtype=complex)))

    # linear algebra -----------------------------------------------------
    def rank(self, M) -> int:
        raise NotImplementedError

    def nullspace(self, M) -> np.ndarray:
        raise NotImplementedError

    def column_basis(self, M) -> np.ndarray:
        raise NotImplementedError

    def solve(self, A, B) -> np.ndarray:
        raise NotImplementedError

    def inv(self, M) -> np.ndarray:
        raise NotImplementedError

    def eigenvalues(self, M):
        raise NotImplementedError

    def normalized_basis(self, G, V):
        raise NotImplementedError

    def sqrt_nonneg(self, x):
        raise NotImplementedError

    # shared helpers -----------------------------------------------------
    def orthonormal_basis(self, V) -> np.ndarray:
        """Orthonormal basis of the column span of V."""
        X, _ = self.normalized_basis(self.eye(V.shape[0]), self.column_basis(V))
        return X

    def unit_vector(self, V) -> np.ndarray:
        """One unit vector (n x 1) in the column span of V."""
        X, _ = self.normalized_basis(self.eye(V.shape[0]), V, limit=1)
        return X[:, :1]

    def orthonormal_complement(self, V, n: int | None = None) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement of span(V)."""
        n = V.shape[0] if n is None else n
        if V.shape[1] == 0:
            return self.eye(n)
        if not self.is_unitary(V):
            V = self.orthonormal_basis(V)
        return self.unitary_completion(V)[:, V.shape[1] :]

    def unitary_completion(self, V) -> np.ndarray:
        """Unitary matrix whose leading columns are the orthonormal columns V."""
        n, r = V.shape
        if not self.exact:
            Q, _ = np.linalg.qr(np.hstack([V, self.eye(n)]))
            Q = Q[:, :n].copy()
            # QR may flip phases of the leading columns
            Q[:, :r] = V
            return Q
        Q = self.eye(n)
        for j in range(r):
            # in the current coordinates the first j entries of v vanish
            v = self.mm(ct(Q), V[:, j : j + 1])[j:, :]
            H = _reflector_to(v, self)
            step = self.eye(n)
            step[j:, j:] = H
            Q = self.mm(Q, step)
        return Q

    def complete_basis(self, V) -> np.ndarray:
        """Extend independent columns V to a basis (columns appended)."""
        n = V.shape[0]
        cols = [V[:, j] for j in range(V.shape[1])]
        cur = V
        for j in range(n):
            if len(cols) == n:
                break
            e = self.zeros(n, 1)
            e[j, 0] = self.scalar(1)
            trial = np.hstack([cur, e])
            if self.rank(trial) > cur.shape[1]:
                cur = trial
                cols.append(e[:, 0])
        return cur

    def is_unitary(self, Q) -> bool:
        n = Q.shape[1]
        return self.equal(self.mm(ct(Q), Q), self.eye(n))

    def is_hermitian(self, M) -> bool:
        return M.shape[0] == M.shape[1] and self.equal(M, ct(M))

    def is_normal(self, M) -> bool:
        return self.equal(self.mm(M, ct(M)), self.mm(ct(M), M))

    def same_scalar(self, a, b) -> bool:
        return self.is_zero(a - b, scale=max(abs(complex(a)), abs(complex(b)), 1.0))

    def is_real(self, a) -> bool:
        return self.is_zero(complex(a).imag if not self.exact else GaussQ(a.im), scale=max(1.0, abs(complex(a))))

    def to_complex(self, M) -> np.ndarray:
        return np.asarray(M, dtype=complex) if M.size else np.zeros(M.shape, dtype=complex)


class ExactBackend(Backend):
    exact = True

    def __init__(self):
        self.policy = EXACT_POLICY

    def __repr__(self):
        return "ExactBackend()"

    def scalar(self, x):
        return to_gauss(x)

    def asarray(self, data) -> np.ndarray:
        arr = np.asarray(data, dtype=object)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise MalformedInput("expected a 2-D matrix")
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            if isinstance(x, np.generic):
                x = x.item()
            out[idx] = to_gauss(x)
        return out

    def eye(self, n):
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = GaussQ.ONE
        return out

    def zeros(self, r, c):
        out = np.empty((r, c), dtype=object)
        out.fill(GaussQ.ZERO)
        return out

    def mm(self, *mats):
        out = mats[0]
        for m in mats[1:]:
            out = self._mm2(out, m)
        return out

    @staticmethod
    def _split(M):
        re = np.empty(M.shape, dtype=object)
        im = np.empty(M.shape, dtype=object)
        flat_re, flat_im = re.reshape(-1), im.reshape(-1)
        for k, z in enumerate(M.flat):
            if not isinstance(z, GaussQ):
                z = GaussQ._coerce(z)
            flat_re[k] = z.re
            flat_im[k] = z.im
        return re, im

    def _mm2(self, A, B):
        """Product through real and imaginary mpq parts (fewer allocations)."""
        r, k = A.shape
        c = B.shape[1]
        if k == 0 or r == 0 or c == 0:
            return self.zeros(r, c)
        ar, ai = self._split(A)
        br, bi = self._split(B)
        a_real = not any(ai.flat)
        b_real = not any(bi.flat)
        cr = ar @ br
        if a_real and b_real:
            ci = None
        else:
            if not (a_real or b_real):
                cr = cr - ai @ bi
            ci = (ar @ bi if not b_real else 0) + (ai @ br if not a_real else 0)
        out = np.empty((r, c), dtype=object)
        flat = out.reshape(-1)
        if ci is None:
            for t, x in enumerate(cr.flat):
                flat[t] = GaussQ._raw(x, _ZQ)
        else:
            for t, (x, y) in enumerate(zip(cr.flat, ci.flat)):
                flat[t] = GaussQ._raw(x, y)
        return out

    def is_zero(self, x, scale=1.0):
        return not x

    def is_zero_matrix(self, M, scale=None):
        return not any(bool(x) for x in M.flat)

    def equal(self, A, B):
        return A.shape == B.shape and all(a == b for a, b in zip(A.flat, B.flat))

    def same_scalar(self, a, b):
        return a == b

    def is_real(self, a):
        return not to_gauss(a).im

    # elimination --------------------------------------------------------
    @staticmethod
    def _rref(M):
        rows = [list(r) for r in M]
        nr = len(rows)
        nc = M.shape[1]
        pivots = []
        r = 0
        for c in range(nc):
            piv = next((i for i in range(r, nr) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = GaussQ.ONE / rows[r][c]
            rows[r] = [x * inv if x else x for x in rows[r]]
            pr = rows[r]
            for i in range(nr):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], pr)]
            pivots.append(c)
            r += 1
            if r == nr:
                break
        return rows, pivots

    def rank(self, M):
        if M.size == 0:
            return 0
        return len(self._rref(M)[1])

    def nullspace(self, M):
        n = M.shape[1]
        if M.shape[0] == 0:
            return self.eye(n)
        rows, pivots = self._rref(M)
        free = [c for c in range(n) if c not in set(pivots)]
        out = self.zeros(n, len(free))
        for k, f in enumerate(free):
            out[f, k] = GaussQ.ONE
            for r, p in enumerate(pivots):
                out[p, k] = -rows[r][f]
        return out

    def column_basis(self, M):
        if M.size == 0:
            return self.zeros(M.shape[0], 0)
        _, pivots = self._rref(M)
        return M[:, pivots]

    def solve(self, A, B):
        """Some X with A X = B; raises if inconsistent."""
        n = A.shape[1]
        k = B.shape[1]
        if A.shape[0] == 0:
            return self.zeros(n, k)
        aug = np.hstack([A, B])
        rows, pivots = self._rref(aug)
        if any(p >= n for p in pivots):
            raise NumericFailure("inconsistent linear system")
        X = self.zeros(n, k)
        for r, p in enumerate(pivots):
            for j in range(k):
                X[p, j] = rows[r][n + j]
        return X

    def inv(self, M):
        n = M.shape[0]
        if M.shape != (n, n):
            raise ContractViolation("inverse of a non-square matrix")
        if n == 0:
            return self.zeros(0, 0)
        rows, pivots = self._rref(np.hstack([M, self.eye(n)]))
        if pivots[:n] != list(range(n)) or len(pivots) < n or pivots[n - 1] != n - 1:
            raise ContractViolation("matrix is singular")
        return self.asarray([r[n:] for r in rows])

    # spectrum -----------------------------------------------------------
    def _alg_mult(self, M, lam):
        n = M.shape[0]
        N = M - lam * self.eye(n)
        P = N
        prev = n - self.rank(P)
        if prev == 0:
            return 0
        for _ in range(n):
            P = self.mm(P, N)
            cur = n - self.rank(P)
            if cur == prev:
                return cur
            prev = cur
        return prev

    def eigenvalues(self, M):
        """Distinct eigenvalues with algebraic multiplicities, sorted by the order on C."""
        n = M.shape[0]
        if n == 0:
            return []
        approx = np.linalg.eigvals(self.to_complex(M))
        cands = set()
        centers = list(approx)
        # cluster means recover defective eigenvalues accurately
        for z in approx:
            near = [w for w in approx if abs(w - z) < 1e-2 * max(1.0, abs(z))]
            centers.append(sum(near) / len(near))
        for z in centers:
            for D in (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 50, 100, 1000, 10**6):
                cands.add(
                    GaussQ(
                        mpq(Fraction(float(z.real)).limit_denominator(D)),
                        mpq(Fraction(float(z.imag)).limit_denominator(D)),
                    )
                )
        found = []
        total = 0
        for lam in sorted(cands, key=eigen_key):
            m = self._alg_mult(M, lam)
            if m:
                found.append((lam, m))
                total += m
        if total != n:
            found = self._eigenvalues_symbolic(M)
        return sorted(found, key=lambda p: eigen_key(p[0]))

    def _eigenvalues_symbolic(self, M):
        import sympy

        def conv(z):
            return sympy.Rational(int(z.re.numerator), int(z.re.denominator)) + sympy.I * sympy.Rational(
                int(z.im.numerator), int(z.im.denominator)
            )

        x = sympy.Symbol("x")
        SM = sympy.Matrix(M.shape[0], M.shape[1], [conv(z) for z in M.flat])
        poly = sympy.Poly(SM.charpoly(x).as_expr(), x, domain="QQ_I")
        _, factors = poly.factor_list()
        out = {}
        for f, e in factors:
            if f.degree() != 1:
                raise UnsupportedSpectrum("eigenvalues are not Gaussian rationals")
            c1, c0 = f.all_coeffs()
            root = sympy.expand(sympy.radsimp(-sympy.sympify(c0) / sympy.sympify(c1)))
            re_, im_ = sympy.Rational(sympy.re(root)), sympy.Rational(sympy.im(root))
            lam = GaussQ(mpq(int(re_.p), int(re_.q)), mpq(int(im_.p), int(im_.q)))
            out[lam] = out.get(lam, 0) + e
        return list(out.items())

    # normalization ------------------------------------------------------
    def normalized_basis(self, G, V, limit=None):
        """Basis X of span(V) with X* G X = I_p + (-I_q) + 0_z (in that order).

        With ``limit`` set, stop after that many normalized vectors and
        return only those.

        The form is first diagonalized; every diagonal value is written as
        +-c N(g) with c a squarefree product of primes 3 mod 4, and the
        vector divided by g. Two entries with the same c are turned into
        two unit vectors in closed form (four squares for equal signs, a
        hyperbolic pair otherwise); entries with different c are merged by
        a short search over two-term combinations. Without ``limit`` the
        product of the classes decides representability up front.
        """
        n = V.shape[0]
        R = self.column_basis(V)
        entries, zero = [], []  # entries: [vector, sign, class]
        while R.shape[1]:
            H = self.mm(ct(R), G, R)
            k = R.shape[1]
            if self.is_zero_matrix(H):
                zero.extend(R[:, j] for j in range(k))
                break
            diag = [j for j in range(k) if H[j, j]]
            if not diag:
                a, b = next((a, b) for a in range(k) for b in range(k) if H[a, b])
                R = R.copy()
                R[:, a] = R[:, a] + R[:, b] * H[a, b].conjugate()
                continue
            j, entry = self._pick_pivot(H, diag)
            w = R[:, j]
            d = H[j, j].re
            coeffs = self.mm(ct(self.mm(G, w.reshape(n, 1))), R)[0]
            R = self.column_basis(R - np.outer(w, coeffs / GaussQ(d)))
            if R.shape[1] != k - 1:
                raise NumericFailure("projection lost rank unexpectedly")
            entries.append([w / entry[1], 1 if d > 0 else -1, entry[0]])
        if limit is None:
            total = 1
            for _, _, c in entries:
                total = _class_product(total, c)
            if total != 1:
                raise NotRepresentable(f"form is not congruent to a signed identity (class {total})")
        pos, neg = [], []
        while entries:
            for e in entries:
                if e[2] == 1:
                    (pos if e[1] > 0 else neg).append(e[0])
            entries = [e for e in entries if e[2] != 1]
            if limit is not None and len(pos) + len(neg) >= limit:
                break
            if not entries:
                break
            pair = next(
                ((i, j) for i in range(len(entries)) for j in range(i + 1, len(entries)) if entries[i][2] == entries[j][2]),
                None,
            )
            if pair is not None:
                i, j = pair
                ei, ej = entries[i], entries[j]
                del entries[j], entries[i]
                for w, sign in self._pair_units(ei, ej):
                    (pos if sign > 0 else neg).append(w)
                continue
            if not self._merge(entries):
                raise NotRepresentable("no vector with a square-normable value in Q(i)")
        if limit is not None:
            found = (pos + neg)[:limit]
            X = np.column_stack(found) if found else self.zeros(n, 0)
            np_ = min(len(pos), limit)
            return X, (np_, len(found) - np_, 0)
        cols = pos + neg + zero
        X = np.column_stack(cols) if cols else self.zeros(n, 0)
        return X, (len(pos), len(neg), len(zero))

    @staticmethod
    def _pick_pivot(H, diag):
        """Diagonal pivot with a cheaply known class; norms and small values first."""
        ranked = sorted(diag, key=lambda j: abs(int(H[j, j].re.numerator)) * int(H[j, j].re.denominator))
        best = None
        for j in ranked:
            split = _rational_class(H[j, j].re)
            if split is None:
                continue
            if split[0] == 1:
                return j, split
            if best is None:
                best = (j, split)
        if best is not None:
            return best
        j = ranked[0]
        return j, _rational_class(H[j, j].re, full=True)

    @staticmethod
    def _class_entry(w, value):
        split = _rational_class(value) or _rational_class(value, full=True)
        c, g = split
        return [w / g, 1 if value > 0 else -1, c]

    @staticmethod
    def _pair_units(ei, ej):
        """Two orthogonal unit vectors from entries of equal class."""
        (yi, si, c), (yj, sj, _) = ei, ej
        if si == sj:
            x, y = _four_squares(c)
            a, b = x / GaussQ(c), y / GaussQ(c)
            return [(yi * a + yj * b, si), (yi * (-b.conjugate()) + yj * a.conjugate(), si)]
        if si < 0:
            yi, yj = yj, yi
        inv = mpq(1, c)
        x, y = GaussQ((1 + inv) / 2), GaussQ((1 - inv) / 2)
        return [(yi * x + yj * y, 1), (yi * y + yj * x, -1)]

    def _merge(self, entries) -> bool:
        """Replace two entries of different class by two that pair up."""
        mults = _merge_multipliers()
        m = len(entries)
        for i in range(m):
            for j in range(i + 1, m):
                (yi, si, ci), (yj, sj, cj) = entries[i], entries[j]
                others = {1} | {entries[t][2] for t in range(m) if t not in (i, j)}
                di, dj = si * ci, sj * cj
                for na, a in mults[1:]:
                    for nb, b in mults[1:]:
                        v = di * na + dj * nb
                        if v == 0:
                            continue
                        split = _norm_split(abs(v))
                        if split is None:
                            continue
                        cv = split[0]
                        if cv not in others and _class_product(_class_product(cv, ci), cj) not in others:
                            continue
                        w1 = yi * a + yj * b
                        w2 = yi * (-b.conjugate() * GaussQ(dj)) + yj * (a.conjugate() * GaussQ(di))
                        new = [self._class_entry(w1, mpq(v)), self._class_entry(w2, mpq(di * dj * v))]
                        del entries[j], entries[i]
                        entries.extend(new)
                        return True
        return False

    def sqrt_nonneg(self, x):
        r = to_gauss(x)
        if r.im or r.re < 0:
            raise ContractViolation("square root of a non-real or negative value")
        s = _rational_sqrt(r.re)
        if s is None:
            raise UnsupportedSpectrum(f"singular value sqrt({r}) is not rational")
        return GaussQ(s)


class FloatBackend(Backend):
    exact = False

    def __init__(self, policy: TolerancePolicy = DEFAULT_POLICY):
        self.policy = policy

    def __repr__(self):
        return f"FloatBackend({self.policy!r})"

    def scalar(self, x):
        return complex(x)

    def asarray(self, data):
        try:
            arr = np.array(
                [[complex(x) for x in row] for row in data] if not isinstance(data, np.ndarray) else data,
                dtype=complex,
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInput(str(exc)) from exc
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise MalformedInput("expected a 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise MalformedInput("non-finite entry")
        return arr

    def eye(self, n):
        return np.eye(n, dtype=complex)

    def zeros(self, r, c):
        return np.zeros((r, c), dtype=complex)

    def _tol(self, scale):
        return self.policy.zero_eps * max(float(scale), 1.0)

    def is_zero(self, x, scale=1.0):
        return abs(complex(x)) <= self._tol(scale)

    def is_zero_matrix(self, M, scale=None):
        if M.size == 0:
            return True
        return float(np.max(np.abs(M))) <= self._tol(1.0 if scale is None else scale)

    def _svd(self, M):
        return np.linalg.svd(M)

    def _rank_from_s(self, s):
        if s.size == 0 or s[0] == 0:
            return 0
        cut = max(self.policy.rank_rel_eps * s[0], self.policy.zero_eps)
        return int(np.sum(s > cut))

    def rank(self, M):
        if M.size == 0:
            return 0
        if not np.all(np.isfinite(M)):
            raise MalformedInput("non-finite entry")
        return self._rank_from_s(np.linalg.svd(M, compute_uv=False))

    def nullspace(self, M):
        n = M.shape[1]
        if M.shape[0] == 0 or M.size == 0:
            return self.eye(n)
        _, s, vh = np.linalg.svd(M)
        r = self._rank_from_s(s)
        return ct(vh[r:])

    def column_basis(self, M):
        if M.size == 0:
            return self.zeros(M.shape[0], 0)
        u, s, _ = np.linalg.svd(M)
        r = self._rank_from_s(s)
        return u[:, :r]

    def solve(self, A, B):
        if A.shape[0] == 0:
            return self.zeros(A.shape[1], B.shape[1])
        X, *_ = np.linalg.lstsq(A, B, rcond=None)
        res = A @ X - B
        if not self.is_zero_matrix(res, scale=max(self.norm(A) * self.norm(X), self.norm(B), 1.0)):
            raise NumericFailure("inconsistent linear system")
        return X

    def inv(self, M):
        if M.shape[0] != M.shape[1]:
            raise ContractViolation("inverse of a non-square matrix")
        if M.shape[0] == 0:
            return self.zeros(0, 0)
        if self.rank(M) < M.shape[0]:
            raise ContractViolation("matrix is singular")
        return np.linalg.inv(M)

    def cluster_radius(self, M):
        n = max(M.shape[0], 1)
        return max(self.policy.cluster_eps, 4 * (_EPS * max(1.0, self.norm(M))) ** (1.0 / n))

    def eigenvalues(self, M):
        n = M.shape[0]
        if n == 0:
            return []
        ev = np.linalg.eigvals(M)
        rad = self.cluster_radius(M)
        clusters: list[list[complex]] = []
        for z in sorted(ev, key=lambda z: (z.real, z.imag)):
            for c in clusters:
                if min(abs(z - w) for w in c) <= rad:
                    c.append(z)
                    break
            else:
                clusters.append([z])
        # merge transitively
        merged = True
        while merged:
            merged = False
            for a in range(len(clusters)):
                for b in range(a + 1, len(clusters)):
                    if min(abs(x - y) for x in clusters[a] for y in clusters[b]) <= rad:
                        clusters[a] += clusters.pop(b)
                        merged = True
                        break
                if merged:
                    break
        centers = [(complex(np.mean(c)), len(c)) for c in clusters]
        for a in range(len(centers)):
            for b in range(a + 1, len(centers)):
                if abs(centers[a][0] - centers[b][0]) <= 4 * rad:
                    raise IndeterminateSpectrum("eigenvalue clusters too close to separate")
        cleaned = []
        for z, m in centers:
            re_ = 0.0 if abs(z.real) <= rad else z.real
            im_ = 0.0 if abs(z.imag) <= rad else z.imag
            cleaned.append((complex(re_, im_), m))
        # lexicographic order with real parts equal up to the cluster radius
        cleaned.sort(key=lambda p: p[0].real)
        groups: list[list] = []
        for item in cleaned:
            if groups and abs(item[0].real - groups[-1][0][0].real) <= 4 * rad:
                groups[-1].append(item)
            else:
                groups.append([item])
        return [item for g in groups for item in sorted(g, key=lambda p: p[0].imag)]

    def normalized_basis(self, G, V, limit=None):
        n = V.shape[0]
        R = self.column_basis(V)
        if R.shape[1] == 0:
            return self.zeros(n, 0), (0, 0, 0)
        H = ct(R) @ G @ R
        H = (H + ct(H)) / 2
        w, Y = np.linalg.eigh(H)
        scale = max(float(np.max(np.abs(w))), 1.0)
        cut = max(self.policy.rank_rel_eps * scale, self.policy.zero_eps)
        pos = [j for j in np.argsort(-w) if w[j] > cut]
        neg = [j for j in np.argsort(w) if w[j] < -cut]
        zer = [j for j in range(len(w)) if abs(w[j]) <= cut]
        cols = [R @ Y[:, j] / math.sqrt(abs(w[j])) for j in pos + neg]
        zb = R @ Y[:, zer] if zer else self.zeros(n, 0)
        if zer:
            zb, _ = np.linalg.qr(zb)
        X = np.column_stack(cols + [zb[:, j] for j in range(zb.shape[1])]) if (cols or zer) else self.zeros(n, 0)
        if limit is not None:
            return X[:, :limit], (min(len(pos), limit), 0, 0)
        return X, (len(pos), len(neg), len(zer))

    def orthonormal_basis(self, V):
        B = self.column_basis(V)
        return B

    def sqrt_nonneg(self, x):
        x = complex(x)
        return complex(math.sqrt(max(x.real, 0.0)))


_ZQ = mpq(0)

EXACT = ExactBackend()


def get_backend(name: str | None = None, policy: TolerancePolicy | None = None) -> Backend:
    """Backend by name; ``SEMICANON_BACKEND`` supplies the default."""
    name = name or os.environ.get("SEMICANON_BACKEND", "exact")
    if name == "exact":
        return EXACT
    if name == "float":
        return FloatBackend(policy or DEFAULT_POLICY)
    raise MalformedInput(f"unknown backend {name!r}")


def backend_for(M) -> Backend:
    """Infer the backend from an array's dtype."""
    return EXACT if np.asarray(M).dtype == object else FloatBackend()
