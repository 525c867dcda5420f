"""Noncommutative operator algebra with exact Q(i, sqrt2) scalars."""

from .expr import OperatorExpr, anticommutator, commutator
from .field import I, INV_SQRT2, ONE, QI2, SQRT2, ZERO
from .generators import BOSON, FERMION, Generator, ieff_token, ladder
from .ordering import VacuumSpec, apply_to_vacuum, epsilon_truncate, is_normal, normal_order, vev
from .rules import BLOCKED, RewriteRules, canonical_rules
from .scalar import Scalar, conjugate_name


def adjoint(x) -> OperatorExpr:
    return OperatorExpr.coerce(x).adjoint()


def mul(x, y) -> OperatorExpr:
    return OperatorExpr.coerce(x) * OperatorExpr.coerce(y)


__all__ = [
    "BLOCKED", "BOSON", "FERMION", "Generator", "I", "INV_SQRT2", "ONE", "OperatorExpr",
    "QI2", "RewriteRules", "SQRT2", "Scalar", "VacuumSpec", "ZERO", "adjoint",
    "anticommutator", "apply_to_vacuum", "canonical_rules", "commutator", "conjugate_name",
    "epsilon_truncate", "ieff_token", "is_normal", "ladder", "mul", "normal_order", "vev",
]
