"""Graded generators of the free *-algebra.

Species symbols:

    a, b     concrete ladder operators (the emergent a_i, b_i)
    al, be   the trace-dynamics matrices alpha_i, beta_i used as opaque letters
    A, B     the i_eff-anticommuting parts (script A_i, script B_i), grade 1
    Ieff     the central token 1_eff = i_eff / i (self-adjoint, squares to 1)
"""

from __future__ import annotations

from dataclasses import dataclass, field

SPECIES_RANK = {"a": 0, "b": 1, "al": 2, "be": 3, "A": 4, "B": 5}
SELF_ADJOINT = {"Ieff"}
ABSTRACT = {"A", "B"}
BOSON = "boson"
FERMION = "fermion"


@dataclass(frozen=True, slots=True)
class Generator:
    species: str
    mode: int = 0
    dagger: bool = False
    statistics: str = BOSON
    grade: int = 0
    _key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.species not in SPECIES_RANK and self.species not in SELF_ADJOINT:
            raise ValueError(f"unknown species {self.species!r}")
        if self.statistics not in (BOSON, FERMION):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        # creators < grade-1 parts < annihilators: the grade-1 parts have opaque
        # brackets with the ladder letters, so they sit between the two blocks
        if self.species in SELF_ADJOINT:
            key = (-1, 0, 0, 0)
        elif self.species in ABSTRACT:
            key = (1, 0 if self.dagger else 1, SPECIES_RANK[self.species], self.mode)
        else:
            key = (0 if self.dagger else 2, 0, SPECIES_RANK[self.species], self.mode)
        object.__setattr__(self, "_key", key)

    @property
    def key(self) -> tuple:
        """Position in the normal-ordering total order (smaller goes left)."""
        return self._key

    @property
    def fermionic(self) -> bool:
        return self.statistics == FERMION

    @property
    def name(self) -> str:
        if self.species in SELF_ADJOINT:
            return self.species
        return f"{self.species}{self.mode}" + ("+" if self.dagger else "")

    def adjoint(self) -> "Generator":
        if self.species in SELF_ADJOINT:
            return self
        return Generator(self.species, self.mode, not self.dagger, self.statistics, self.grade)

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"<{self.name}>"


def ladder(species: str, mode: int, dagger: bool = False, statistics: str = BOSON) -> Generator:
    grade = 1 if species in ("A", "B") else 0
    return Generator(species, mode, dagger, statistics, grade)


def ieff_token() -> Generator:
    return Generator("Ieff")


def word_text(word) -> str:
    return " ".join(g.name for g in word)


def adjoint_word(word) -> tuple:
    return tuple(g.adjoint() for g in reversed(word))


def word_grade(word) -> int:
    return sum(g.grade for g in word)
