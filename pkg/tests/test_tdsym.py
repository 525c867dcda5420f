"""td-symbolic: the perturbed CHSH sandwich and its first-order reduction."""

import json

import pytest

from tracechsh import spin
from tracechsh.algebra import SQRT2, OperatorExpr, Scalar, epsilon_truncate, normal_order
from tracechsh.errors import DerivationFailure
from tracechsh.tdsym import (CaseSpec, adler_millard_symbolic, derive_F_TD, emergent_charge_value,
                             fermionic_case, grading_audit, indeterminate_name, normalization_constraint,
                             perturbation_operator, quantum_chsh_expression, reduce_F_TD, sign_flip,
                             td_chsh_expression, trace_hamiltonian_symbolic)

TSIRELSON = Scalar.coerce(2 * SQRT2)


@pytest.fixture(scope="module")
def boson():
    return derive_F_TD(CaseSpec())


def _var(big, i, small, j):
    return Scalar.var(indeterminate_name(big, i, small, j))


def test_case_is_consistent():
    CaseSpec().check()
    fermionic_case().check()
    CaseSpec(emergent=True).check()


def test_unperturbed_expression_is_the_quantum_one():
    assert td_chsh_expression(CaseSpec(perturbed=False)) == quantum_chsh_expression()


def test_truncation_removes_words():
    x = td_chsh_expression(CaseSpec())
    assert len(x) > len(epsilon_truncate(x))


def test_sandwich_is_self_adjoint():
    """Self-adjoint in the quotient algebra: the A and B spin factors commute
    only through the rules, so compare after normal ordering."""
    case = CaseSpec()
    x = epsilon_truncate(td_chsh_expression(case))
    assert x.adjoint() != x
    assert normal_order(x - x.adjoint(), case.rules).is_zero()


def test_zero_perturbation_gives_tsirelson(boson):
    assert derive_F_TD(CaseSpec(perturbed=False)).value == TSIRELSON
    zero = {n: 0 for n in boson.value.variables()}
    assert boson.value.substitute(zero) == TSIRELSON


def test_emergent_independent_of_perturbation():
    em = derive_F_TD(CaseSpec(emergent=True))
    assert em.value == TSIRELSON
    assert em.value == spin.chsh(spin.singlet())


def test_reduced_value_is_diagonal_form(boson):
    """The reduction gives 2 sqrt2 + 4 sqrt2 Re(sum_i x[A_i a_i+] + x[B_i b_i+])."""
    assert boson.value == boson.diagonal_form()
    diag = _var("A", 1, "a", 1) + _var("A", 2, "a", 2) + _var("B", 1, "b", 1) + _var("B", 2, "b", 2)
    assert boson.value == TSIRELSON + diag.real() * (4 * SQRT2)


def test_P0_is_full_first_order_sum(boson):
    expected = sum((_var(big, i, small, j) for big, small in (("A", "a"), ("B", "b"))
                    for i in (1, 2) for j in (1, 2)), Scalar.coerce(0))
    assert boson.P0 == expected


def test_closed_form_residual_is_reported(boson):
    """2 sqrt2 + Re(P0)/sqrt2 does not follow: the residual has (7/4) sqrt2 on
    each diagonal term and -(1/4) sqrt2 on each off-diagonal one."""
    assert not boson.holds
    for big, small in (("A", "a"), ("B", "b")):
        for i in (1, 2):
            for j in (1, 2):
                c = boson.residual.coefficient(indeterminate_name(big, i, small, j))
                assert c == (SQRT2 * 7 / 4 if i == j else SQRT2 * (-1) / 4)
    with pytest.raises(DerivationFailure) as err:
        reduce_F_TD(CaseSpec())
    assert err.value.residual == boson.residual
    assert err.value.derived is not None


def test_closed_form_holds_under_normalization_off_diagonal_free(boson):
    """With the off-diagonal terms zero the residual is (7/2) sqrt2 Re(diag),
    which the normalization constraint sets to zero: both forms then give 2 sqrt2."""
    vals = {n: 0 for n in CaseSpec().indeterminates()}
    for name in ("x[A1 a1+]", "x[A1 a1+]*"):
        vals[name] = 1
    for name in ("x[A2 a2+]", "x[A2 a2+]*"):
        vals[name] = -1
    assert boson.value.substitute(vals) == TSIRELSON
    assert boson.residual.substitute(vals) == 0


def test_normalization_constraint(boson):
    rep = normalization_constraint(CaseSpec())
    diag = _var("A", 1, "a", 1) + _var("A", 2, "a", 2) + _var("B", 1, "b", 1) + _var("B", 2, "b", 2)
    assert rep.holds
    assert rep.expected == diag.real()
    assert rep.lhs == Scalar.coerce(1) + diag.real()
    off = _var("A", 1, "a", 2) + _var("A", 2, "a", 1) + _var("B", 1, "b", 2) + _var("B", 2, "b", 1)
    assert rep.P0_after == off
    assert boson.P0 - diag == off


def test_normalization_vacuous_without_perturbation():
    rep = normalization_constraint(CaseSpec(perturbed=False))
    assert rep.lhs == Scalar.coerce(1) and rep.constraint.is_zero()


def test_sign_flip(boson):
    case = CaseSpec()
    flip = derive_F_TD(sign_flip(case))
    assert flip.P0 == -boson.P0
    assert sign_flip(sign_flip(case)) == case
    assert boson.value + flip.value == TSIRELSON * 2
    assert flip.value == flip.diagonal_form()


def test_perturbation_operator_first_order():
    P = perturbation_operator(CaseSpec())
    assert len(P) == 8
    assert epsilon_truncate(P) == P


def test_grading_audit():
    assert grading_audit(CaseSpec())


def test_adler_millard_anti_self_adjoint():
    case = CaseSpec()
    C = adler_millard_symbolic(case)
    assert normal_order(C + C.adjoint(), case.rules).is_zero()
    H = trace_hamiltonian_symbolic(case)
    assert normal_order(H - H.adjoint(), case.rules).is_zero()


def test_emergent_charge_is_four_ieff():
    assert adler_millard_symbolic(CaseSpec(emergent=True, perturbed=False)) == emergent_charge_value()


def test_report_serializes(boson):
    d = boson.to_dict()
    json.dumps(d)
    assert d["holds"] is False and d["F_TD"].startswith("2*sqrt2")
    json.dumps(normalization_constraint(CaseSpec()).to_dict())


def test_evaluate_at_values(boson):
    vals = {n: 0 for n in CaseSpec().indeterminates()}
    vals["x[A1 a2+]"] = 0.01 + 0.02j
    vals["x[A1 a2+]*"] = 0.01 - 0.02j
    out = boson.evaluate(vals)
    assert abs(out["value"] - 2 * 2 ** 0.5) < 1e-15
    assert abs(out["formula"] - (2 * 2 ** 0.5 + 0.01 / 2 ** 0.5)) < 1e-15
    assert isinstance(OperatorExpr.coerce(1), OperatorExpr)
