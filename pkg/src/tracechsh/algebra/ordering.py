"""Normal ordering, epsilon-grade truncation and vacuum expectation values."""

from __future__ import annotations

from typing import Iterable, Mapping

from ..errors import ConfigurationError, UnresolvedExpectation
from .expr import OperatorExpr, cadd, cis_zero, cmul
from .generators import adjoint_word, word_grade, word_text
from .rules import RewriteRules
from .scalar import Scalar, conjugate_name

_ONE = Scalar.coerce(1)


def _accumulate(out: dict, word: tuple, c) -> None:
    v = out.get(word)
    v = c if v is None else cadd(v, c)
    if cis_zero(v):
        out.pop(word, None)
    else:
        out[word] = v


def _nf(word: tuple, rules: RewriteRules) -> dict:
    cache = rules.nf_cache
    hit = cache.get(word)
    if hit is not None:
        return hit
    if word in rules.nf_active:
        raise ConfigurationError(
            f"rule set {rules.name} does not terminate on [{word_text(word)}] (cyclic remainder)")
    rules.nf_active.add(word)
    try:
        result = _nf_compute(word, rules)
    finally:
        rules.nf_active.discard(word)
    cache[word] = result
    return result


def _nf_compute(word: tuple, rules: RewriteRules) -> dict:
    n = len(word)
    if n <= 1:
        return {word: _ONE}
    # pick the smallest letter that can be moved to the front (ties: leftmost)
    best = 0
    for k in range(1, n):
        g = word[k]
        if not g.key < word[best].key:
            continue
        if all(rules.swap(word[j], g) is not None for j in range(k)):
            best = k
    g = word[best]
    out: dict = {}
    cur = list(word)
    coeff = _ONE
    for j in range(best - 1, -1, -1):
        h = cur[j]
        sign, rem = rules.swap(h, g)
        for rw, rc in rem.items():
            sub = tuple(cur[:j]) + rw + tuple(cur[j + 2:])
            c = cmul(coeff, rc)
            for w, cw in _nf(sub, rules).items():
                _accumulate(out, w, cmul(c, cw))
        cur[j], cur[j + 1] = g, h
        if sign == -1:
            coeff = -coeff
    rest = tuple(cur[1:])
    square = rules.squares.get(g)
    for w, cw in _nf(rest, rules).items():
        c = cmul(coeff, cw)
        if square is not None and w and w[0] == g:
            for rw, rc in square.items():
                for w2, c2 in _nf(rw + w[1:], rules).items():
                    _accumulate(out, w2, cmul(cmul(c, rc), c2))
            continue
        full = (g,) + w
        if len(full) == n:
            _accumulate(out, full, c)
        else:
            for w2, c2 in _nf(full, rules).items():
                _accumulate(out, w2, cmul(c, c2))
    return out


def normal_order(x, rules: RewriteRules) -> OperatorExpr:
    """Rewrite ``x`` into the canonical normal form defined by ``rules``.

    Each output word has, at every position, the smallest generator that
    could legally be moved there; with no blocked pairs this places all
    daggered generators left of all undaggered ones.
    """
    x = OperatorExpr.coerce(x)
    out: dict = {}
    for w, c in x.items():
        for w2, c2 in _nf(w, rules).items():
            _accumulate(out, w2, cmul(c, c2))
    return OperatorExpr._raw(out)


def is_normal(x, rules: RewriteRules) -> bool:
    x = OperatorExpr.coerce(x)
    return normal_order(x, rules) == x


def epsilon_truncate(x, max_grade: int = 1) -> OperatorExpr:
    """Drop every word carrying two or more grade-1 generators."""
    x = OperatorExpr.coerce(x)
    return x.filter(lambda w: word_grade(w) <= max_grade)


class VacuumSpec:
    """How the reference vector psi_0 acts.

    ``annihilators`` kill psi_0 from the left (and their adjoints kill
    psi_0+ from the right); ``fixed`` generators act as the identity on
    psi_0 from both sides; ``indeterminates`` maps irreducible words to
    indeterminate names (the adjoint word resolves to the conjugate name).
    ``sector_eigenvector`` declares psi_0 an i_eff eigenvector, so words of
    odd grade have zero expectation.
    """

    def __init__(self, annihilators: Iterable, fixed: Iterable = (),
                 indeterminates: Mapping | None = None, sector_eigenvector: bool = False):
        self.annihilators = frozenset(annihilators)
        self.sector_eigenvector = sector_eigenvector
        self.creators = frozenset(g.adjoint() for g in self.annihilators)
        self.fixed = frozenset(fixed)
        self.indeterminates = dict(indeterminates or {})

    def resolve(self, word: tuple):
        name = self.indeterminates.get(word)
        if name is not None:
            return Scalar.var(name)
        name = self.indeterminates.get(adjoint_word(word))
        if name is not None:
            return Scalar.var(conjugate_name(name))
        raise UnresolvedExpectation(word)


def _strip_fixed(word: tuple, fixed) -> tuple:
    lo, hi = 0, len(word)
    while lo < hi and word[lo] in fixed:
        lo += 1
    while hi > lo and word[hi - 1] in fixed:
        hi -= 1
    return word[lo:hi]


def vev(x, rules: RewriteRules, vacuum: VacuumSpec | Iterable):
    """<psi_0| x |psi_0> after normal ordering."""
    if not isinstance(vacuum, VacuumSpec):
        vacuum = VacuumSpec(vacuum)
    nx = normal_order(x, rules)
    total = Scalar.coerce(0)
    for w, c in nx.items():
        w = _strip_fixed(w, vacuum.fixed)
        if not w:
            total = cadd(total, c)
            continue
        if w[-1] in vacuum.annihilators or w[0] in vacuum.creators:
            continue
        if vacuum.sector_eigenvector and word_grade(w) % 2:
            continue
        total = cadd(total, cmul(c, vacuum.resolve(w)))
    return total


def apply_to_vacuum(x, rules: RewriteRules, vacuum: VacuumSpec | Iterable) -> OperatorExpr:
    """The creator polynomial representing x|0>."""
    if not isinstance(vacuum, VacuumSpec):
        vacuum = VacuumSpec(vacuum)
    nx = normal_order(x, rules)
    out: dict = {}
    for w, c in nx.items():
        hi = len(w)
        while hi and w[hi - 1] in vacuum.fixed:
            hi -= 1
        w = w[:hi]
        if w and w[-1] in vacuum.annihilators:
            continue
        _accumulate(out, w, c)
    return OperatorExpr._raw(out)
