"""Scalar realizations, tolerance policy and the lexicographic order on C."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from numbers import Complex, Rational

from gmpy2 import mpq

from .errors import MalformedInput

__all__ = [
    "GaussQ",
    "TolerancePolicy",
    "EXACT_POLICY",
    "DEFAULT_POLICY",
    "eigen_key",
    "precedes",
    "parse_gauss",
    "to_gauss",
]


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise MalformedInput(f"non-finite value {x!r}")
        return mpq(x)
    return mpq(x)


_ZERO_Q = mpq(0)


class GaussQ:
    """Exact Gaussian rational ``re + im*i`` with ``mpq`` components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re, im):
        """Construct from two mpq values without conversion."""
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    # -- coercion -------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, (int, Rational)) or type(other) is type(mpq(0)):
            return GaussQ(other, 0)
        if isinstance(other, complex):
            return GaussQ(other.real, other.imag)
        if isinstance(other, float):
            return GaussQ(other, 0)
        return NotImplemented

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussQ._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussQ._raw(a * c, _ZERO_Q)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussQ((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.sqrt(float(self.abs2()))

    # -- text -----------------------------------------------------------
    def __str__(self):
        return format_gauss(self)

    def __repr__(self):
        return f"GaussQ({format_gauss(self)!r})"


GaussQ.ZERO = GaussQ(0)
GaussQ.ONE = GaussQ(1)
GaussQ.I = GaussQ(0, 1)


def _fmt_q(x: mpq) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_gauss(z: GaussQ) -> str:
    if not z.im:
        return _fmt_q(z.re)
    im = _fmt_q(abs(z.im))
    im = "" if im == "1" else im
    sign = "-" if z.im < 0 else "+"
    if not z.re:
        return f"{'-' if z.im < 0 else ''}{im}i"
    return f"{_fmt_q(z.re)}{sign}{im}i"


_NUM = r"\d+(?:/\d+)?"
_GAUSS_RE = re.compile(
    rf"^(?:(?P<re>[+-]?{_NUM})(?![\d/]*i))?(?:(?P<im>[+-]?(?:{_NUM})?)i)?$"
)


def _rat(txt: str) -> mpq:
    try:
        return mpq(txt.lstrip("+"))
    except (ValueError, ZeroDivisionError) as e:
        raise MalformedInput(f"bad rational {txt!r}") from e


def parse_gauss(text: str) -> GaussQ:
    """Parse ``"a/b+c/di"`` style strings (any part optional)."""
    s = str(text).replace(" ", "")
    m = _GAUSS_RE.match(s)
    if not s or m is None or (m.group("re") is None and m.group("im") is None):
        raise MalformedInput(f"cannot parse Gaussian rational {text!r}")
    re_part = _rat(m.group("re")) if m.group("re") else mpq(0)
    im_txt = m.group("im")
    if im_txt is None:
        im_part = mpq(0)
    elif im_txt in ("", "+"):
        im_part = mpq(1)
    elif im_txt == "-":
        im_part = mpq(-1)
    else:
        im_part = _rat(im_txt)
    return GaussQ(re_part, im_part)


def to_gauss(x) -> GaussQ:
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, str):
        return parse_gauss(x)
    if isinstance(x, complex):
        if not (math.isfinite(x.real) and math.isfinite(x.imag)):
            raise MalformedInput(f"non-finite value {x!r}")
        return GaussQ(x.real, x.imag)
    if isinstance(x, Complex) or isinstance(x, (int, float)) or type(x) is type(mpq(0)):
        return GaussQ(x)
    raise MalformedInput(f"cannot convert {x!r} to a Gaussian rational")


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds for float decisions; the exact backend uses all zeros.

    ``zero_eps`` is relative to the Frobenius norm of the matrix being
    inspected (an absolute floor of the same size applies to zero matrices).
    """

    zero_eps: float = 1e-10
    cluster_eps: float = 1e-8
    rank_rel_eps: float = 1e-10

    def __post_init__(self):
        for name in ("zero_eps", "cluster_eps", "rank_rel_eps"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise MalformedInput(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def is_exact(self) -> bool:
        return self.zero_eps == 0 and self.cluster_eps == 0 and self.rank_rel_eps == 0


EXACT_POLICY = TolerancePolicy(0.0, 0.0, 0.0)
DEFAULT_POLICY = TolerancePolicy()


def eigen_key(z):
    """Sort key realizing ``a+bi < c+di`` iff ``a<c`` or (``a==c`` and ``b<d``)."""
    return (z.real, z.imag)


def precedes(a, b) -> bool:
    return eigen_key(a) < eigen_key(b)
