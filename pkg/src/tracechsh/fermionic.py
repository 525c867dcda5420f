"""Anticommuting variant of the pipeline and the n-dimensional SU(2) family."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (BOSON, FERMION, QI2, OperatorExpr, Scalar, apply_to_vacuum, normal_order,
                      vev)
from .algebra.generators import ladder
from .algebra.rules import BLOCKED
from .spin import (chsh, commutator_check, quantum_rules, quantum_vacuum, singlet, spin_operator,
                   total_spin)
from .tdsym import CaseSpec, ReducedCHSH, derive_F_TD, fermionic_case, reduce_F_TD


@dataclass
class CheckReport:
    name: str
    checks: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": dict(self.checks),
                "values": dict(self.values)}


def rules_are_anticommutators(case: CaseSpec) -> bool:
    """Every declared swap between two fermionic letters carries sign -1."""
    for (g, h), rule in case.rules.declared().items():
        if rule == BLOCKED or not (g.fermionic and h.fermionic):
            continue
        if rule[0] != -1:
            return False
    return True


def fermionic_spin_check() -> CheckReport:
    rep = CheckReport("fermionic-spin")
    for k, ok in commutator_check(FERMION).items():
        rep.checks[k] = ok
    rules, vac = quantum_rules(FERMION), quantum_vacuum(FERMION)
    s = singlet(FERMION)
    for k in (1, 2, 3):
        rep.checks[f"S{k} singlet = 0"] = apply_to_vacuum(total_spin(k, FERMION) * s.ket(), rules, vac).is_zero()
    F = chsh(s)
    rep.values["chsh"] = F.to_text()
    rep.checks["chsh = 2*sqrt2"] = F == Scalar.coerce(2 * QI2.sqrt2())
    a1d = OperatorExpr.gen(ladder("a", 1, True, FERMION))
    rep.checks["(a1+)^2 = 0"] = normal_order(a1d * a1d, rules).is_zero()
    # number operator on the one-mode occupation states has spectrum {0, 1}
    n1 = a1d * a1d.adjoint()
    occ = [apply_to_vacuum(n1, rules, vac), apply_to_vacuum(n1 * a1d, rules, vac)]
    rep.checks["N1 spectrum in {0,1}"] = occ[0].is_zero() and occ[1] == a1d
    return rep


def fermionic_F_TD(case: CaseSpec | None = None) -> ReducedCHSH:
    """Fermionic reduction; raises DerivationFailure like ``reduce_F_TD``."""
    case = case or fermionic_case()
    if case.statistics != FERMION:
        raise ValueError("fermionic_F_TD needs a fermionic case")
    return reduce_F_TD(case)


def fermionic_derivation(case: CaseSpec | None = None) -> ReducedCHSH:
    return derive_F_TD(case or fermionic_case())


@dataclass
class SU2RepReport:
    n: int
    spin: Fraction
    commutators_exact: bool
    casimir_exact: bool
    s3_eigenvalues: list
    casimir_eigenvalues: list
    matrices: tuple

    @property
    def passed(self) -> bool:
        return self.commutators_exact and self.casimir_exact

    def to_dict(self) -> dict:
        return {"n": self.n, "s": str(self.spin), "commutators_exact": self.commutators_exact,
                "casimir_exact": self.casimir_exact, "s3_eigenvalues": [str(x) for x in self.s3_eigenvalues],
                "casimir": [round(x, 12) for x in self.casimir_eigenvalues]}


def _mat_mul(x, y):
    n = len(x)
    return [[sum((x[i][k] * y[k][j] for k in range(n)), QI2(0)) for j in range(n)] for i in range(n)]


def _mat_sub(x, y):
    return [[x[i][j] - y[i][j] for j in range(len(x))] for i in range(len(x))]


def su2_rep_family(n: int) -> SU2RepReport:
    """Spin s = (n-1)/2 carried by {(a1+)^l (a2+)^m |0> : l + m = n - 1}.

    The S_k act on coefficient vectors through T_k = G^-1 M_k (G the Gram
    matrix), which keeps every entry rational; the orthonormal float form
    G^-1/2 M_k G^-1/2 is returned for inspection.
    """
    if not 2 <= n <= 8:
        raise ValueError("n must lie in 2..8")
    rules, vac = quantum_rules(BOSON), quantum_vacuum(BOSON)
    a1d = OperatorExpr.gen(ladder("a", 1, True, BOSON))
    a2d = OperatorExpr.gen(ladder("a", 2, True, BOSON))
    basis = [a1d ** l * a2d ** (n - 1 - l) for l in range(n - 1, -1, -1)]
    gram = [[vev(u.adjoint() * v, rules, vac).constant() for v in basis] for u in basis]
    T = []
    for k in (1, 2, 3):
        S = spin_operator("A", k, BOSON)
        M = [[vev(u.adjoint() * S * v, rules, vac).constant() for v in basis] for u in basis]
        # Gram matrix is diagonal (distinct occupation patterns are orthogonal)
        T.append([[M[i][j] / gram[i][i] for j in range(n)] for i in range(n)])
    i_unit = QI2(0, 0, 1)
    comm_ok = True
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        lhs = _mat_sub(_mat_mul(T[i], T[j]), _mat_mul(T[j], T[i]))
        comm_ok &= all(lhs[r][c] == i_unit * T[k][r][c] for r in range(n) for c in range(n))
    s = Fraction(n - 1, 2)
    sq = [_mat_mul(t, t) for t in T]
    cas = [[sq[0][r][c] + sq[1][r][c] + sq[2][r][c] for c in range(n)] for r in range(n)]
    target = QI2(s * (s + 1))
    cas_ok = all(cas[r][c] == (target if r == c else QI2(0)) for r in range(n) for c in range(n))
    s3 = [T[2][r][r].r for r in range(n)]
    g = np.diag([1 / np.sqrt(float(gram[r][r])) for r in range(n)])
    gh = np.diag([np.sqrt(float(gram[r][r])) for r in range(n)])
    ortho = tuple(gh @ np.array([[complex(x) for x in row] for row in t]) @ g for t in T)
    cas_f = sum(m @ m for m in ortho)
    return SU2RepReport(n, s, comm_ok, cas_ok, s3, sorted(np.linalg.eigvalsh(cas_f).tolist()), ortho)
