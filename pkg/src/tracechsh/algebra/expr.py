"""Formal sums of scalar-weighted words over generators."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .field import QI2
from .generators import Generator, adjoint_word, word_text
from .scalar import Scalar

Coeff = "Scalar | complex"


# Coefficients are exact Scalars; a float/complex anywhere switches that
# coefficient to numeric mode (used for arbitrary float measurement axes).

def as_coeff(c):
    if isinstance(c, Scalar):
        return c
    if isinstance(c, (complex, float)):
        return complex(c)
    return Scalar.coerce(c)


def cadd(x, y):
    if isinstance(x, complex) or isinstance(y, complex):
        return _num(x) + _num(y)
    return x + y


def cmul(x, y):
    if isinstance(x, complex) or isinstance(y, complex):
        return _num(x) * _num(y)
    return x * y


def cneg(x):
    return -x


def cconj(x):
    return x.conjugate()


def cis_zero(x) -> bool:
    if isinstance(x, complex):
        return x == 0
    return x.is_zero()


def _num(x) -> complex:
    if isinstance(x, complex):
        return x
    return complex(x)


class OperatorExpr:
    """Immutable map word -> coefficient; zero coefficients are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            for w, c in terms.items():
                c = as_coeff(c)
                if not cis_zero(c):
                    clean[tuple(w)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "OperatorExpr":
        e = cls.__new__(cls)
        e._terms = terms
        e._hash = None
        return e

    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls._raw({})

    @classmethod
    def one(cls) -> "OperatorExpr":
        return cls.scalar(1)

    @classmethod
    def scalar(cls, c) -> "OperatorExpr":
        c = as_coeff(c)
        return cls._raw({} if cis_zero(c) else {(): c})

    @classmethod
    def gen(cls, g: Generator) -> "OperatorExpr":
        return cls._raw({(g,): Scalar.coerce(1)})

    @classmethod
    def word(cls, *gens: Generator) -> "OperatorExpr":
        return cls._raw({tuple(gens): Scalar.coerce(1)})

    @classmethod
    def coerce(cls, x) -> "OperatorExpr":
        if isinstance(x, OperatorExpr):
            return x
        if isinstance(x, Generator):
            return cls.gen(x)
        return cls.scalar(x)

    # access
    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def coefficient(self, word) -> object:
        return self._terms.get(tuple(word), Scalar.coerce(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(not w for w in self._terms)

    def scalar_part(self):
        return self._terms.get((), Scalar.coerce(0))

    def generators(self) -> set:
        return {g for w in self._terms for g in w}

    def is_exact(self) -> bool:
        return all(isinstance(c, Scalar) for c in self._terms.values())

    # arithmetic
    def __add__(self, other):
        try:
            o = OperatorExpr.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for w, c in o._terms.items():
            v = out.get(w)
            if v is None:
                out[w] = c
            else:
                v = cadd(v, c)
                if cis_zero(v):
                    del out[w]
                else:
                    out[w] = v
        return OperatorExpr._raw(out)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return OperatorExpr._raw({w: cneg(c) for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-OperatorExpr.coerce(other))

    def __rsub__(self, other):
        return OperatorExpr.coerce(other) + (-self)

    def __mul__(self, other):
        """Free concatenation product; no reordering is performed."""
        if isinstance(other, (OperatorExpr, Generator)):
            o = OperatorExpr.coerce(other)
            out: dict = {}
            for w1, c1 in self._terms.items():
                for w2, c2 in o._terms.items():
                    w = w1 + w2
                    c = cmul(c1, c2)
                    v = out.get(w)
                    out[w] = c if v is None else cadd(v, c)
            return OperatorExpr._raw({w: c for w, c in out.items() if not cis_zero(c)})
        c = as_coeff(other)
        if cis_zero(c):
            return OperatorExpr.zero()
        return OperatorExpr._raw({w: cmul(v, c) for w, v in self._terms.items()
                                  if not cis_zero(cmul(v, c))})

    def __rmul__(self, other):
        if isinstance(other, Generator):
            return OperatorExpr.gen(other) * self
        # scalars commute with every word
        return self * other

    def __truediv__(self, other):
        c = as_coeff(other)
        if isinstance(c, complex):
            return self * (1 / c)
        return self * (Scalar.coerce(1) / c)

    def __pow__(self, n: int):
        out = OperatorExpr.one()
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "OperatorExpr":
        return OperatorExpr._raw({adjoint_word(w): cconj(c) for w, c in self._terms.items()})

    def map_coefficients(self, fn: Callable) -> "OperatorExpr":
        return OperatorExpr({w: fn(c) for w, c in self._terms.items()})

    def filter(self, keep: Callable) -> "OperatorExpr":
        return OperatorExpr._raw({w: c for w, c in self._terms.items() if keep(w)})

    def substitute(self, mapping: Mapping[Generator, object]) -> "OperatorExpr":
        """Replace generators by expressions (the adjoint generator follows automatically)."""
        full = {}
        for g, e in mapping.items():
            e = OperatorExpr.coerce(e)
            full[g] = e
            full.setdefault(g.adjoint(), e.adjoint())
        out = OperatorExpr.zero()
        for w, c in self._terms.items():
            term = OperatorExpr.scalar(c)
            for g in w:
                term = term * (full[g] if g in full else OperatorExpr.gen(g))
                if term.is_zero():
                    break
            out = out + term
        return out

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            try:
                other = OperatorExpr.coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def to_text(self) -> str:
        """Canonical text: sorted words, exact coefficients, e.g. ``(1/2)*[a1+ a1] + (-1/2)*[a2+ a2]``."""
        if not self._terms:
            return "0"
        pieces = []
        for w in sorted(self._terms, key=_word_sort_key):
            c = self._terms[w]
            ctext = _coeff_text(c)
            if not w:
                pieces.append(f"({ctext})")
            elif ctext == "1":
                pieces.append(f"[{word_text(w)}]")
            else:
                pieces.append(f"({ctext})*[{word_text(w)}]")
        return " + ".join(pieces)

    __str__ = to_text

    def __repr__(self):
        text = self.to_text()
        if len(text) > 200:
            text = text[:200] + "..."
        return f"OperatorExpr({text})"


def _word_sort_key(w):
    return (len(w), tuple(g.key for g in w))


def _coeff_text(c) -> str:
    if isinstance(c, complex):
        return repr(c)
    return c.to_text()


def gens(*gs: Generator) -> list:
    return [OperatorExpr.gen(g) for g in gs]


def total(exprs: Iterable) -> OperatorExpr:
    out = OperatorExpr.zero()
    for e in exprs:
        out = out + e
    return out


def commutator(x, y) -> OperatorExpr:
    x, y = OperatorExpr.coerce(x), OperatorExpr.coerce(y)
    return x * y - y * x


def anticommutator(x, y) -> OperatorExpr:
    x, y = OperatorExpr.coerce(x), OperatorExpr.coerce(y)
    return x * y + y * x


HALF = Scalar.coerce(Fraction(1, 2))
I_UNIT = Scalar.coerce(QI2(0, 0, 1))
