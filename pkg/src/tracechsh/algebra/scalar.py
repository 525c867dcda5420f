"""Exact polynomials over Q(i, sqrt2) in named indeterminates.

An indeterminate ``x`` has the conjugate partner ``x*``; conjugating a
polynomial conjugates every field coefficient and swaps each indeterminate
with its partner.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .field import QI2

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by name


def conjugate_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def _mono_conj(m: Monomial) -> Monomial:
    return tuple(sorted((conjugate_name(n), e) for n, e in m))


class Scalar:
    """Immutable element of Q(i, sqrt2)[x1, ..., xk]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, QI2] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = QI2.coerce(c)
                if not c.is_zero():
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Scalar":
        s = cls.__new__(cls)
        s._terms = terms
        s._hash = None
        return s

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        c = QI2.coerce(x)
        return cls._raw({(): c} if not c.is_zero() else {})

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls._raw({((name, 1),): QI2(1)})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def variables(self) -> set:
        return {n for mono in self._terms for n, _ in mono}

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant(self) -> QI2:
        """The constant term."""
        return self._terms.get((), QI2(0))

    def coefficient(self, name: str) -> QI2:
        """Coefficient of the linear monomial ``name``."""
        return self._terms.get(((name, 1),), QI2(0))

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    # arithmetic
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, c in o._terms.items():
            v = out.get(mono)
            if v is None:
                out[mono] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[mono]
                else:
                    out[mono] = v
        return Scalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return Scalar._raw({})
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m)
                c = c1 * c2
                out[m] = c if v is None else v + c
        return Scalar._raw({m: c for m, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if not o.is_constant():
            raise TypeError("division by a non-constant polynomial")
        inv = o.constant().inverse()
        return Scalar._raw({m: c * inv for m, c in self._terms.items()})

    def __pow__(self, n: int):
        out = Scalar.coerce(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw({_mono_conj(m): c.conjugate() for m, c in self._terms.items()})

    def real(self) -> "Scalar":
        """Re(p) = (p + p*)/2 through the declared conjugate pairing."""
        return (self + self.conjugate()) * QI2(Fraction(1, 2))

    def imag(self) -> "Scalar":
        return (self - self.conjugate()) * QI2(0, 0, Fraction(-1, 2))

    def substitute(self, values: Mapping[str, object]) -> "Scalar | complex":
        """Evaluate indeterminates.

        Values may be exact (Scalar/QI2/int) or numeric; a conjugate name
        missing from ``values`` takes the conjugate of its partner's value.
        With any numeric value the result is a Python complex.
        """
        vals = dict(values)
        for name in list(vals):
            partner = conjugate_name(name)
            if partner not in vals:
                v = vals[name]
                vals[partner] = v.conjugate() if hasattr(v, "conjugate") else v
        numeric = any(isinstance(v, (float, complex)) for v in vals.values())
        if numeric:
            total = 0j
            for mono, c in self._terms.items():
                term = complex(c)
                for name, e in mono:
                    term *= complex(vals[name]) ** e
                total += term
            return total
        total = Scalar.coerce(0)
        for mono, c in self._terms.items():
            term = Scalar.coerce(c)
            for name, e in mono:
                v = vals.get(name)
                factor = Scalar.var(name) if v is None else Scalar.coerce(v)
                term = term * factor ** e
            total = total + term
        return total

    def __complex__(self):
        if not self.is_constant():
            raise TypeError("polynomial with indeterminates has no numeric value")
        return complex(self.constant())

    def __float__(self):
        return float(self.constant()) if self.is_constant() else float("nan")

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono in sorted(self._terms, key=lambda m: (len(m), m)):
            c = self._terms[mono]
            vars_txt = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            ctext = c.to_text()
            if not mono:
                pieces.append(ctext)
            elif ctext == "1":
                pieces.append(vars_txt)
            elif ctext == "-1":
                pieces.append("-" + vars_txt)
            elif c.n_terms() == 1:
                pieces.append(f"{ctext}*{vars_txt}")
            else:
                pieces.append(f"({ctext})*{vars_txt}")
        text = pieces[0]
        for p in pieces[1:]:
            text += p if p.startswith("-") else "+" + p
        return text

    __str__ = to_text

    def __repr__(self):
        return f"Scalar({self.to_text()})"


def _coerce_or_none(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (QI2, int, Fraction)):
        return Scalar.coerce(x)
    return None
