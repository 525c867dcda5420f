"""Exact arithmetic in the number field Q(i, sqrt2).

Elements are stored as four rationals ``(r, s, t, u)`` standing for
``r + s*sqrt2 + t*i + u*sqrt2*i``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

_SQRT2 = 2.0 ** 0.5


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class QI2:
    """An element of Q(i, sqrt2)."""

    __slots__ = ("r", "s", "t", "u", "_hash")

    def __init__(self, r=0, s=0, t=0, u=0):
        self.r = _frac(r)
        self.s = _frac(s)
        self.t = _frac(t)
        self.u = _frac(u)
        self._hash = None

    # construction helpers
    @classmethod
    def coerce(cls, x) -> "QI2":
        if isinstance(x, QI2):
            return x
        return cls(_frac(x))

    @classmethod
    def sqrt2(cls) -> "QI2":
        return cls(0, 1)

    @classmethod
    def i(cls) -> "QI2":
        return cls(0, 0, 1)

    # predicates
    def is_zero(self) -> bool:
        return not (self.r or self.s or self.t or self.u)

    def is_real(self) -> bool:
        return not (self.t or self.u)

    def is_rational(self) -> bool:
        return not (self.s or self.t or self.u)

    # arithmetic
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return QI2(self.r + o.r, self.s + o.s, self.t + o.t, self.u + o.u)

    __radd__ = __add__

    def __neg__(self):
        return QI2(-self.r, -self.s, -self.t, -self.u)

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return QI2(self.r - o.r, self.s - o.s, self.t - o.t, self.u - o.u)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        # (p + q i)(p' + q' i) with p, q in Q(sqrt2)
        p1, q1 = (self.r, self.s), (self.t, self.u)
        p2, q2 = (o.r, o.s), (o.t, o.u)
        re = _sub2(_mul2(p1, p2), _mul2(q1, q2))
        im = _add2(_mul2(p1, q2), _mul2(q1, p2))
        return QI2(re[0], re[1], im[0], im[1])

    __rmul__ = __mul__

    def conjugate(self) -> "QI2":
        return QI2(self.r, self.s, -self.t, -self.u)

    def inverse(self) -> "QI2":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(i, sqrt2)")
        # 1/(p + q i) = (p - q i) / (p^2 + q^2); p^2 + q^2 lies in Q(sqrt2)
        p, q = (self.r, self.s), (self.t, self.u)
        n = _add2(_mul2(p, p), _mul2(q, q))
        # 1/(x + y sqrt2) = (x - y sqrt2) / (x^2 - 2 y^2)
        d = n[0] * n[0] - 2 * n[1] * n[1]
        ninv = (n[0] / d, -n[1] / d)
        re = _mul2(p, ninv)
        im = _mul2((-q[0], -q[1]), ninv)
        return QI2(re[0], re[1], im[0], im[1])

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QI2(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def real_part(self) -> "QI2":
        return QI2(self.r, self.s)

    def imag_part(self) -> "QI2":
        return QI2(self.t, self.u)

    def sign(self) -> int:
        """Exact sign of a real element."""
        if not self.is_real():
            raise ValueError("sign is only defined for real elements")
        return _sign2(self.r, self.s)

    def __abs__(self) -> "QI2":
        # exact for real elements only; |z| of a complex element is not in the field
        return self if self.sign() >= 0 else -self

    def __lt__(self, other):
        return (self - QI2.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - QI2.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - QI2.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - QI2.coerce(other)).sign() >= 0

    # comparison / hashing
    def _key(self):
        return (self.r, self.s, self.t, self.u)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._key() == o._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key()) if not self.is_rational() else hash(self.r)
        return self._hash

    def __complex__(self):
        return complex(float(self.r) + float(self.s) * _SQRT2,
                       float(self.t) + float(self.u) * _SQRT2)

    def __float__(self):
        if not self.is_real():
            raise TypeError("complex field element has no float value")
        return float(self.r) + float(self.s) * _SQRT2

    def __bool__(self):
        return not self.is_zero()

    def to_text(self) -> str:
        """Canonical text form, e.g. ``(3/2)+(1/2)*sqrt2*i`` or ``2*sqrt2``."""
        parts = []
        for q, basis in ((self.r, ""), (self.s, "sqrt2"), (self.t, "i"), (self.u, "sqrt2*i")):
            if not q:
                continue
            sign = "-" if q < 0 else "+"
            mag = -q if q < 0 else q
            if mag.denominator == 1:
                num = str(mag.numerator)
            else:
                num = f"({mag.numerator}/{mag.denominator})"
            if basis and mag == 1:
                body = basis
            elif basis:
                body = f"{num}*{basis}"
            else:
                body = num
            parts.append((sign, body))
        if not parts:
            return "0"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += sign + body
        return text

    def n_terms(self) -> int:
        return sum(1 for q in self._key() if q)

    def __repr__(self):
        return f"QI2({self.to_text()})"

    __str__ = to_text


def _coerce_or_none(x):
    if isinstance(x, QI2):
        return x
    if isinstance(x, (int, Fraction)):
        return QI2(x)
    return None


def _mul2(a, b):
    return (a[0] * b[0] + 2 * a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _add2(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _sub2(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _sign2(x: Fraction, y: Fraction) -> int:
    """Sign of x + y*sqrt2 without floating point."""
    sx = (x > 0) - (x < 0)
    sy = (y > 0) - (y < 0)
    if sy == 0:
        return sx
    if sx == 0:
        return sy
    if sx == sy:
        return sx
    # opposite signs: compare x^2 with 2 y^2
    lhs, rhs = x * x, 2 * y * y
    if lhs == rhs:
        return 0
    return sx if lhs > rhs else sy


ZERO = QI2(0)
ONE = QI2(1)
I = QI2(0, 0, 1)
SQRT2 = QI2(0, 1)
INV_SQRT2 = QI2(0, Fraction(1, 2))
