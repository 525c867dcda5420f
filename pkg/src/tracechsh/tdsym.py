"""Symbolic reduction of the trace-dynamics CHSH sandwich.

The matrices alpha_i, beta_i are split as alpha_i = a_i + A_i and
beta_i = b_i + B_i, where a_i, b_i commute with i_eff and obey the ladder
relations while A_i, B_i anticommute with i_eff and carry epsilon-grade 1.
The sandwich psi_0+ Bra X Ket psi_0 is truncated at first order, normal
ordered and evaluated with a_i psi_0 = b_i psi_0 = 0. First-order words
that the rules cannot reduce become the indeterminates x[A_i a_j+] etc.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

from .algebra import (BOSON, FERMION, INV_SQRT2, QI2, SQRT2, OperatorExpr, Scalar, VacuumSpec,
                      canonical_rules, commutator, anticommutator, epsilon_truncate, ieff_token,
                      normal_order, vev)
from .algebra.generators import ladder, word_grade
from .errors import DerivationFailure

MODES = (1, 2)
PARTNER = {"a": "A", "b": "B"}
HALF = QI2(Fraction(1, 2))
TSIRELSON = Scalar.coerce(2 * SQRT2)


def indeterminate_name(big: str, i: int, small: str, j: int) -> str:
    return f"x[{big}{i} {small}{j}+]"


@dataclass(frozen=True)
class CaseSpec:
    """Constraint family (a1)-(a3) plus the bookkeeping for psi_0 expectations.

    ``emergent`` replaces the unit in [a_i, a_j+] by the central token
    1_eff and takes psi_0 in one i_eff sector. ``flipped`` replaces
    A_i, B_i by -A_i, -B_i. ``perturbed`` False drops A, B altogether.
    """

    statistics: str = BOSON
    emergent: bool = False
    flipped: bool = False
    perturbed: bool = True

    @cached_property
    def rules(self):
        return canonical_rules(self.statistics, abstract=True, emergent=self.emergent)

    @cached_property
    def vacuum(self) -> VacuumSpec:
        table = {}
        for small, big in PARTNER.items():
            for i in MODES:
                for j in MODES:
                    w = (ladder(big, i, False, self.statistics), ladder(small, j, True, self.statistics))
                    table[w] = indeterminate_name(big, i, small, j)
        return VacuumSpec(self.annihilators, fixed=[ieff_token()] if self.emergent else [],
                          indeterminates=table, sector_eigenvector=self.emergent)

    @property
    def annihilators(self) -> list:
        return [ladder(s, i, False, self.statistics) for s in PARTNER for i in MODES]

    def gen(self, species: str, mode: int, dagger: bool = False) -> OperatorExpr:
        return OperatorExpr.gen(ladder(species, mode, dagger, self.statistics))

    def alpha(self, i: int) -> OperatorExpr:
        return self._split("a", i)

    def beta(self, i: int) -> OperatorExpr:
        return self._split("b", i)

    def _split(self, small: str, i: int) -> OperatorExpr:
        x = self.gen(small, i)
        if self.perturbed:
            x = x + self.gen(PARTNER[small], i) * (-1 if self.flipped else 1)
        return x

    def indeterminates(self, diagonal: bool | None = None) -> list:
        out = []
        for small, big in PARTNER.items():
            for i in MODES:
                for j in MODES:
                    if diagonal is None or diagonal == (i == j):
                        out.append(indeterminate_name(big, i, small, j))
        return out

    def check(self) -> None:
        """Every generator of the sandwich is covered by the rules; (a3)
        annihilators are exactly the grade-0 undaggered letters."""
        self.rules.check_adjoint_consistency()
        letters = td_chsh_expression(self).generators()
        grade0 = {g for g in letters if g.grade == 0 and not g.dagger and g.species in PARTNER}
        if grade0 - set(self.annihilators):
            raise ValueError("annihilator set does not match the grade-0 letters")


def fermionic_case(**kw) -> CaseSpec:
    return CaseSpec(statistics=FERMION, **kw)


def sign_flip(case: CaseSpec) -> CaseSpec:
    """A_i, B_i -> -A_i, -B_i; the relations (a1)-(a3) are unchanged."""
    return replace(case, flipped=not case.flipped)


def chsh_sandwich(al1, al2, be1, be2) -> OperatorExpr:
    """Bra X Ket for the canonical axes, with Ket = Bra+.

    X is the Z(x)Z plus X(x)X combination the canonical CHSH sum collapses
    to; the normalized F is |<Bra X Ket>| / sqrt2.
    """
    ad1, ad2, bd1, bd2 = al1.adjoint(), al2.adjoint(), be1.adjoint(), be2.adjoint()
    bra = be2 * al1 - be1 * al2
    ket = bra.adjoint()
    x = (ad1 * al1 - ad2 * al2) * (bd1 * be1 - bd2 * be2) \
        + (ad1 * al2 + ad2 * al1) * (bd1 * be2 + bd2 * be1)
    return bra * x * ket


def quantum_chsh_expression(statistics: str = BOSON) -> OperatorExpr:
    g = lambda s, i: OperatorExpr.gen(ladder(s, i, False, statistics))
    return chsh_sandwich(g("a", 1), g("a", 2), g("b", 1), g("b", 2))


def td_chsh_expression(case: CaseSpec | None = None) -> OperatorExpr:
    case = case or CaseSpec()
    return chsh_sandwich(case.alpha(1), case.alpha(2), case.beta(1), case.beta(2))


def norm_expression(case: CaseSpec | None = None) -> OperatorExpr:
    case = case or CaseSpec()
    bra = case.beta(2) * case.alpha(1) - case.beta(1) * case.alpha(2)
    return bra * bra.adjoint()


def perturbation_operator(case: CaseSpec) -> OperatorExpr:
    """P = sum_ij A_i a_j+ + B_i b_j+."""
    out = OperatorExpr.zero()
    for small, big in PARTNER.items():
        for i in MODES:
            for j in MODES:
                out = out + case.gen(big, i) * case.gen(small, j, True)
    return out


def first_order_vev(x: OperatorExpr, case: CaseSpec) -> Scalar:
    return vev(epsilon_truncate(x), case.rules, case.vacuum)


@dataclass(frozen=True)
class ReducedCHSH:
    """Outcome of the first-order reduction.

    ``raw`` is <Bra X Ket> itself. ``value`` is F_TD in real-part form,
    sign(constant) * Re(raw) / sqrt2, which equals |raw| / sqrt2 to first
    order. ``expected`` is 2 sqrt2 + Re(P0)/sqrt2 and ``residual`` is
    value - expected.
    """

    case: CaseSpec
    raw: Scalar
    value: Scalar
    imaginary: Scalar
    P0: Scalar
    expected: Scalar
    residual: Scalar

    @property
    def holds(self) -> bool:
        return self.residual.is_zero()

    def diagonal_form(self) -> Scalar:
        """2 sqrt2 + 4 sqrt2 Re(sum_i x[A_i a_i+] + x[B_i b_i+]), the form the
        reduction actually produces for (a1)-(a3)."""
        if self.case.emergent or not self.case.perturbed:
            return TSIRELSON
        d = sum((Scalar.var(n) for n in self.case.indeterminates(diagonal=True)), Scalar.coerce(0))
        sign = -1 if self.case.flipped else 1
        return TSIRELSON + d.real() * (4 * SQRT2 * sign)

    def evaluate(self, values: dict) -> dict:
        """Numeric value, formula and P0 at the given indeterminate values."""
        return {
            "abs_raw": abs(complex(self.raw.substitute(values))) / float(SQRT2),
            "value": complex(self.value.substitute(values)).real,
            "formula": complex(self.expected.substitute(values)).real,
            "P0": complex(self.P0.substitute(values)),
        }

    def to_dict(self) -> dict:
        return {
            "statistics": self.case.statistics,
            "emergent": self.case.emergent,
            "flipped": self.case.flipped,
            "raw": self.raw.to_text(),
            "F_TD": self.value.to_text(),
            "imaginary_part": self.imaginary.to_text(),
            "P0": self.P0.to_text(),
            "expected": self.expected.to_text(),
            "residual": self.residual.to_text(),
            "holds": self.holds,
        }


def derive_F_TD(case: CaseSpec | None = None) -> ReducedCHSH:
    """Truncate, normal order and evaluate; never raises on a mismatch."""
    case = case or CaseSpec()
    raw = first_order_vev(td_chsh_expression(case), case)
    c0 = raw.substitute({n: 0 for n in raw.variables()}) if raw.variables() else raw
    sign = -1 if Scalar.coerce(c0).constant().real_part().sign() < 0 else 1
    value = raw.real() * (INV_SQRT2 * sign)
    imag = raw.imag() * INV_SQRT2
    P0 = vev(perturbation_operator(case), case.rules, case.vacuum) if case.perturbed else Scalar.coerce(0)
    if case.flipped:
        # P0 is defined with the perturbation actually present
        P0 = -P0
    expected = TSIRELSON + P0.real() * INV_SQRT2
    return ReducedCHSH(case, raw, value, imag, P0, expected, value - expected)


def reduce_F_TD(case: CaseSpec | None = None) -> ReducedCHSH:
    """As ``derive_F_TD`` but asserts F_TD = 2 sqrt2 + Re(P0)/sqrt2 exactly."""
    r = derive_F_TD(case)
    if not r.holds:
        raise DerivationFailure(
            f"F_TD = {r.value.to_text()} does not reduce to 2*sqrt2 + Re(P0)/sqrt2",
            r.residual, derived=r)
    return r


@dataclass(frozen=True)
class NormalizationReport:
    """(1/2) psi_0+ Bra Ket psi_0 = 1 rewritten as ``constraint`` = 0."""

    lhs: Scalar
    constraint: Scalar
    expected: Scalar
    ratio: QI2 | None
    P0_after: Scalar

    @property
    def holds(self) -> bool:
        return self.ratio is not None

    def to_dict(self) -> dict:
        return {"lhs": self.lhs.to_text(), "constraint": self.constraint.to_text(),
                "expected": self.expected.to_text(), "equivalent": self.holds,
                "P0_after_constraint": self.P0_after.to_text()}


def _proportional(p: Scalar, q: Scalar):
    """Nonzero constant k with p = k q, else None (0 = 0 gives k = 1)."""
    if q.is_zero():
        return QI2(1) if p.is_zero() else None
    mono, c = next(iter(q.terms.items()))
    k = p.terms.get(mono)
    if k is None:
        return None
    k = k / c
    return k if p == q * k else None


def normalization_constraint(case: CaseSpec | None = None) -> NormalizationReport:
    """Reduce the unit-norm condition; it must be equivalent to
    Re(sum_i x[A_i a_i+] + x[B_i b_i+]) = 0."""
    case = case or CaseSpec()
    lhs = first_order_vev(norm_expression(case), case) * HALF
    constraint = lhs - 1
    if case.perturbed and not case.emergent:
        diag = sum((Scalar.var(n) for n in case.indeterminates(diagonal=True)), Scalar.coerce(0))
        off = sum((Scalar.var(n) for n in case.indeterminates(diagonal=False)), Scalar.coerce(0))
        expected = diag.real()
    else:
        expected = Scalar.coerce(0)
        off = Scalar.coerce(0)
    ratio = _proportional(constraint, expected)
    rep = NormalizationReport(lhs, constraint, expected, ratio, off)
    if ratio is None:
        raise DerivationFailure("normalization does not reduce to the diagonal real-part condition",
                                constraint - expected, derived=rep)
    return rep


def grading_audit(case: CaseSpec | None = None) -> bool:
    """Normal ordering never moves content between epsilon grades, so
    truncating before or after ordering gives the same grade <= 1 part."""
    case = case or CaseSpec()
    full = td_chsh_expression(case)
    before = normal_order(epsilon_truncate(full), case.rules)
    after = epsilon_truncate(normal_order(full, case.rules))
    return before == after


def adler_millard_symbolic(case: CaseSpec | None = None) -> OperatorExpr:
    """C = i sum_k ([alpha_k, alpha_k+] + [beta_k, beta_k+]), normal ordered."""
    case = case or CaseSpec()
    c = OperatorExpr.zero()
    for k in MODES:
        for x in (case.alpha(k), case.beta(k)):
            c = c + commutator(x, x.adjoint())
    return normal_order(c * QI2(0, 0, 1), case.rules)


def trace_hamiltonian_symbolic(case: CaseSpec | None = None) -> OperatorExpr:
    """(1/2) sum_k ({alpha_k, alpha_k+} + {beta_k, beta_k+}), normal ordered."""
    case = case or CaseSpec()
    h = OperatorExpr.zero()
    for k in MODES:
        for x in (case.alpha(k), case.beta(k)):
            h = h + anticommutator(x, x.adjoint())
    return normal_order(h * HALF, case.rules)


def emergent_charge_value() -> OperatorExpr:
    """The emergent value of C at zero perturbation: 4 i_eff = 4 i 1_eff."""
    return OperatorExpr.gen(ieff_token()) * QI2(0, 0, 4)


def is_first_order(x: OperatorExpr) -> bool:
    return all(word_grade(w) <= 1 for w in x.words())
