"""(Anti)commutation rule tables that define normal ordering.

A rule for the ordered pair ``(g, h)`` rewrites the product ``g h`` as
``sign * h g + remainder``. Pairs with no declared rule follow the default
graded convention: they (anti)commute with zero remainder. Pairs marked
``BLOCKED`` have an opaque nonzero (anti)commutator and are never swapped.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from ..errors import ConfigurationError
from .expr import OperatorExpr, cis_zero
from .generators import BOSON, FERMION, Generator, ieff_token, ladder

BLOCKED = "blocked"


class RewriteRules:
    def __init__(self, swaps: Mapping | None = None, squares: Mapping | None = None,
                 name: str = "rules"):
        self.name = name
        self._swaps: dict = {}
        for (g, h), rule in (swaps or {}).items():
            if rule == BLOCKED:
                self._swaps[(g, h)] = BLOCKED
                self._swaps[(h, g)] = BLOCKED
                continue
            sign, rem = rule
            if sign not in (1, -1):
                raise ConfigurationError(f"rule sign must be +1 or -1, got {sign}")
            rem = OperatorExpr.coerce(rem)
            self._swaps[(g, h)] = (sign, rem)
            # h g = sign * g h - sign * remainder
            self._swaps.setdefault((h, g), (sign, rem * (-sign)))
        self.squares = {g: OperatorExpr.coerce(r) for g, r in (squares or {}).items()}
        self.nf_cache: dict = {}
        self.nf_active: set = set()

    def swap(self, g: Generator, h: Generator):
        """(sign, remainder) with ``g h = sign h g + remainder``, or None if blocked."""
        rule = self._swaps.get((g, h))
        if rule is None:
            return (-1 if (g.fermionic and h.fermionic) else 1), _ZERO
        if rule == BLOCKED:
            return None
        return rule

    def declared(self) -> dict:
        return dict(self._swaps)

    def check_adjoint_consistency(self) -> None:
        """The rule for (h+, g+) must be the adjoint of the rule for (g, h)."""
        for (g, h), rule in self._swaps.items():
            mirror = self.swap(h.adjoint(), g.adjoint())
            if rule == BLOCKED:
                if mirror is not None:
                    raise ConfigurationError(f"blocked pair ({g}, {h}) has a swappable adjoint pair")
                continue
            sign, rem = rule
            if mirror is None or mirror[0] != sign or mirror[1] != rem.adjoint():
                raise ConfigurationError(f"rule for ({g}, {h}) is not adjoint-consistent")
        for g, r in self.squares.items():
            ga = g.adjoint()
            if ga in self.squares and self.squares[ga] != r.adjoint():
                raise ConfigurationError(f"square rule for {g} is not adjoint-consistent")

    def __repr__(self):
        return f"RewriteRules({self.name}, {len(self._swaps)} declared pairs)"


_ZERO = OperatorExpr.zero()


def ladder_generators(statistics: str = BOSON, species: Iterable[str] = ("a", "b"),
                      modes: Iterable[int] = (1, 2)) -> list:
    out = []
    for s in species:
        for m in modes:
            out.append(ladder(s, m, False, statistics))
            out.append(ladder(s, m, True, statistics))
    return out


def canonical_rules(statistics: str = BOSON, abstract: bool = False, emergent: bool = False,
                    species: Iterable[str] = ("a", "b"), modes: Iterable[int] = (1, 2)) -> RewriteRules:
    """Rules (a1)-(a3) style: [x_i, x_j+]_(-+) = delta_ij, all other (anti)commutators vanish.

    ``abstract`` adds the grade-1 parts A_i, B_i whose (anti)commutators with
    the matching creators are opaque. ``emergent`` replaces the delta_ij
    unit by the central token 1_eff.
    """
    species = tuple(species)
    modes = tuple(modes)
    sign = -1 if statistics == FERMION else 1
    unit = OperatorExpr.gen(ieff_token()) if emergent else OperatorExpr.one()
    swaps: dict = {}
    squares: dict = {}
    for s in species:
        for i in modes:
            for j in modes:
                g = ladder(s, i, False, statistics)
                h = ladder(s, j, True, statistics)
                swaps[(g, h)] = (sign, unit if i == j else OperatorExpr.zero())
    partner = {"a": "A", "b": "B"}
    if abstract:
        for s in species:
            big = partner[s]
            for i in modes:
                for j in modes:
                    A = ladder(big, i, False, statistics)
                    c = ladder(s, j, True, statistics)
                    swaps[(A, c)] = BLOCKED
                    swaps[(c.adjoint(), A.adjoint())] = BLOCKED
    if statistics == FERMION:
        all_species = species + (tuple(partner[s] for s in species) if abstract else ())
        for s in all_species:
            for i in modes:
                for d in (False, True):
                    squares[ladder(s, i, d, statistics)] = OperatorExpr.zero()
    if emergent:
        E = ieff_token()
        squares[E] = OperatorExpr.one()
        if abstract:
            for s in species:
                for i in modes:
                    for d in (False, True):
                        swaps[(ladder(partner[s], i, d, statistics), E)] = (-1, OperatorExpr.zero())
    name = f"{statistics}{'+abstract' if abstract else ''}{'+emergent' if emergent else ''}"
    return RewriteRules(swaps, squares, name=name)


def is_zero_remainder(rem: OperatorExpr) -> bool:
    return all(cis_zero(c) for _, c in rem.items())
