"""Second-quantized spin-1/2 algebra: spin bilinears, two-particle states,
correlations, CHSH and marginal measurement probabilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import (BOSON, INV_SQRT2, QI2, OperatorExpr, Scalar, VacuumSpec,
                      canonical_rules, normal_order, vev)
from .algebra.expr import cmul
from .algebra.generators import ladder, word_grade

LETTER = {"A": "a", "B": "b"}
HALF = QI2(Fraction(1, 2))
UNIT_TOL = 1e-12

X_AXIS = (QI2(1), QI2(0), QI2(0))
Y_AXIS = (QI2(0), QI2(1), QI2(0))
Z_AXIS = (QI2(0), QI2(0), QI2(1))


@lru_cache(maxsize=None)
def quantum_rules(statistics: str = BOSON):
    return canonical_rules(statistics)


@lru_cache(maxsize=None)
def quantum_vacuum(statistics: str = BOSON) -> VacuumSpec:
    return VacuumSpec([ladder(s, i, False, statistics) for s in "ab" for i in (1, 2)])


def _op(species: str, mode: int, dagger: bool, statistics: str) -> OperatorExpr:
    return OperatorExpr.gen(ladder(LETTER[species], mode, dagger, statistics))


def _is_exact(x) -> bool:
    if isinstance(x, Scalar):
        return x.is_constant()
    return isinstance(x, (int, Fraction, QI2)) and not isinstance(x, bool)


def _exact(x) -> QI2:
    return x.constant() if isinstance(x, Scalar) else QI2.coerce(x)


def unit_axis(axis: Sequence) -> tuple:
    """Validate a 3-vector: exact components must have norm exactly 1,
    float components within 1e-12. Returns QI2 or float components."""
    comps = tuple(axis)
    if len(comps) != 3:
        raise ValueError(f"axis needs 3 components, got {len(comps)}")
    if all(_is_exact(c) for c in comps):
        q = tuple(_exact(c) for c in comps)
        if not all(c.is_real() for c in q):
            raise ValueError("axis components must be real")
        if sum((c * c for c in q), QI2(0)) != QI2(1):
            raise ValueError(f"axis {[c.to_text() for c in q]} is not a unit vector")
        return q
    v = np.array([float(c) for c in comps])
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError(f"axis {v.tolist()} is not a unit vector (|n| = {np.linalg.norm(v)!r})")
    return tuple(float(c) for c in v)


def spin_operator(species: str, component: int, statistics: str = BOSON) -> OperatorExpr:
    """S_k for one species as a bilinear in its two ladder modes."""
    c1d, c2d = _op(species, 1, True, statistics), _op(species, 2, True, statistics)
    c1, c2 = _op(species, 1, False, statistics), _op(species, 2, False, statistics)
    if component == 1:
        return (c1d * c2 + c2d * c1) * HALF
    if component == 2:
        return (c2d * c1 - c1d * c2) * QI2(0, 0, Fraction(1, 2))
    if component == 3:
        return (c1d * c1 - c2d * c2) * HALF
    raise ValueError(f"spin component must be 1, 2 or 3, got {component}")


def total_spin(component: int, statistics: str = BOSON) -> OperatorExpr:
    return spin_operator("A", component, statistics) + spin_operator("B", component, statistics)


def spin_along(species: str, axis: Sequence, statistics: str = BOSON) -> OperatorExpr:
    n = unit_axis(axis)
    out = OperatorExpr.zero()
    for k, nk in enumerate(n, start=1):
        if nk:
            out = out + spin_operator(species, k, statistics) * nk
    return out


@dataclass(frozen=True)
class CHSHAxes:
    c: tuple
    c_prime: tuple
    d: tuple
    d_prime: tuple

    def __post_init__(self):
        for name in ("c", "c_prime", "d", "d_prime"):
            object.__setattr__(self, name, unit_axis(getattr(self, name)))

    def rotated(self, R) -> "CHSHAxes":
        """All four axes rotated by the same 3x3 rotation (float)."""
        R = np.asarray(R, dtype=float)
        f = lambda n: tuple(R @ np.array([float(x) for x in n]))
        return CHSHAxes(f(self.c), f(self.c_prime), f(self.d), f(self.d_prime))


CANONICAL_AXES = CHSHAxes(
    Z_AXIS, X_AXIS,
    (INV_SQRT2, QI2(0), INV_SQRT2),
    (INV_SQRT2, QI2(0), -INV_SQRT2),
)


@dataclass(frozen=True)
class StateExpr:
    """creator * normalization applied to the vacuum."""

    creator: OperatorExpr
    normalization: object = field(default_factory=lambda: Scalar.coerce(1))
    statistics: str = BOSON

    def ket(self) -> OperatorExpr:
        return self.creator * self.normalization

    def norm(self):
        k = self.ket()
        return vev(k.adjoint() * k, quantum_rules(self.statistics), quantum_vacuum(self.statistics))

    def normalized(self) -> "StateExpr":
        """Numerically rescaled copy with unit norm."""
        n = abs(complex(self.norm()))
        return StateExpr(self.creator, complex(self.normalization) / np.sqrt(n), self.statistics)


def singlet(statistics: str = BOSON) -> StateExpr:
    a = lambda i: _op("A", i, True, statistics)
    b = lambda i: _op("B", i, True, statistics)
    return StateExpr(a(1) * b(2) - a(2) * b(1), Scalar.coerce(INV_SQRT2), statistics)


def triplet(m: int, statistics: str = BOSON) -> StateExpr:
    a = lambda i: _op("A", i, True, statistics)
    b = lambda i: _op("B", i, True, statistics)
    if m == 1:
        return StateExpr(a(1) * b(1), Scalar.coerce(1), statistics)
    if m == 0:
        return StateExpr(a(1) * b(2) + a(2) * b(1), Scalar.coerce(INV_SQRT2), statistics)
    if m == -1:
        return StateExpr(a(2) * b(2), Scalar.coerce(1), statistics)
    raise ValueError(f"triplet m must be -1, 0 or 1, got {m}")


def state_from_amplitudes(c, statistics: str = BOSON) -> StateExpr:
    """sum_ij c[i][j] a_(i+1)+ b_(j+1)+ |0>, amplitudes taken as given."""
    out = OperatorExpr.zero()
    for i in range(2):
        for j in range(2):
            cij = c[i][j]
            if cij:
                cij = cij if _is_exact(cij) else complex(cij)
                out = out + _op("A", i + 1, True, statistics) * _op("B", j + 1, True, statistics) * cij
    return StateExpr(out, Scalar.coerce(1), statistics)


def single_particle(species: str, mode: int, statistics: str = BOSON) -> StateExpr:
    return StateExpr(_op(species, mode, True, statistics), Scalar.coerce(1), statistics)


def expectation(state: StateExpr, obs: OperatorExpr):
    obs = OperatorExpr.coerce(obs)
    if any(word_grade(w) for w in obs.words()):
        raise ValueError("observable must have epsilon-grade 0")
    k = state.ket()
    return vev(k.adjoint() * obs * k, quantum_rules(state.statistics), quantum_vacuum(state.statistics))


def _real(x):
    """Exact constant Scalar stays exact; numeric collapses to float."""
    if isinstance(x, Scalar):
        return x
    return complex(x).real


def correlation(state: StateExpr, axis_a: Sequence, axis_b: Sequence):
    """E(M, N) normalized to +-1: four times <(n.S^A)(m.S^B)>."""
    st = state.statistics
    e = expectation(state, spin_along("A", axis_a, st) * spin_along("B", axis_b, st))
    return _real(cmul(e, Scalar.coerce(4)))


def chsh(state: StateExpr, axes: CHSHAxes = CANONICAL_AXES):
    e = [correlation(state, axes.c, axes.d), correlation(state, axes.c, axes.d_prime),
         correlation(state, axes.c_prime, axes.d), correlation(state, axes.c_prime, axes.d_prime)]
    if all(isinstance(x, Scalar) for x in e):
        s = (e[0] - e[1] + e[2] + e[3]).constant()
        if not s.is_real():
            raise ValueError(f"CHSH combination is not real: {s.to_text()}")
        return Scalar.coerce(abs(s))
    return abs(float(complex(e[0]).real - complex(e[1]).real + complex(e[2]).real + complex(e[3]).real))


# --- SU(2) basis rotations -------------------------------------------------

def su2_matrix(U) -> tuple:
    """Validate a 2x2 unitary; returns ("exact", QI2 rows) or ("float", ndarray)."""
    rows = [list(r) for r in U]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("rotation must be a 2x2 matrix")
    if all(_is_exact(x) for r in rows for x in r):
        q = [[_exact(x) for x in r] for r in rows]
        for i in range(2):
            for j in range(2):
                s = q[i][0] * q[j][0].conjugate() + q[i][1] * q[j][1].conjugate()
                if s != QI2(1 if i == j else 0):
                    raise ValueError("rotation is not unitary")
        return "exact", tuple(tuple(r) for r in q)
    m = np.array([[complex(x) for x in r] for r in rows])
    err = np.abs(m @ m.conj().T - np.eye(2)).max()
    if err > UNIT_TOL:
        raise ValueError(f"rotation is not unitary (deviation {err:.3g})")
    return "float", m


IDENTITY_SU2 = ((QI2(1), QI2(0)), (QI2(0), QI2(1)))


def _rotated_annihilator(species: str, kind: str, m, k: int, statistics: str) -> OperatorExpr:
    # basis vector k of the rotated frame is column k of U
    out = OperatorExpr.zero()
    for mode in (1, 2):
        u = m[mode - 1][k]
        u = u.conjugate() if kind == "exact" else complex(np.conj(u))
        if u:
            out = out + _op(species, mode, False, statistics) * u
    return out


def _outcome_index(outcome) -> int:
    if outcome in ("+", 1, +1):
        return 0
    if outcome in ("-", -1):
        return 1
    raise ValueError(f"outcome must be '+' or '-', got {outcome!r}")


def measurement_probability(state: StateExpr, species: str, rotation, outcome,
                            far_rotation=None):
    """Probability that ``species`` is found in basis vector ``outcome`` of
    ``rotation``, summed over the other particle's ``far_rotation`` basis."""
    far = "B" if species == "A" else "A"
    kind, m = su2_matrix(rotation)
    fkind, fm = su2_matrix(IDENTITY_SU2 if far_rotation is None else far_rotation)
    st = state.statistics
    near_op = _rotated_annihilator(species, kind, m, _outcome_index(outcome), st)
    ket = state.ket()
    rules, vac = quantum_rules(st), quantum_vacuum(st)
    total = None
    for k in (0, 1):
        far_op = _rotated_annihilator(far, fkind, fm, k, st)
        amp = vev(far_op * near_op * ket, rules, vac)
        p = amp * amp.conjugate() if isinstance(amp, Scalar) else abs(complex(amp)) ** 2
        total = p if total is None else total + p
    return _real(total)


@dataclass(frozen=True)
class CausalityReport:
    max_deviation: float
    exact: bool
    n_rotations: int
    deviations: tuple

    @property
    def exact_zero(self) -> bool:
        return self.exact and self.max_deviation == 0.0

    def to_dict(self) -> dict:
        return {"max_deviation": self.max_deviation, "exact": self.exact,
                "n_rotations": self.n_rotations}


def causality_check(state: StateExpr, rotations, near_rotation=None) -> CausalityReport:
    """Near-particle marginals must not depend on the far particle's basis."""
    near_rotation = IDENTITY_SU2 if near_rotation is None else near_rotation
    base = {}
    for near in ("A", "B"):
        for o in ("+", "-"):
            base[near, o] = measurement_probability(state, near, near_rotation, o)
    devs = []
    exact = True
    for U in rotations:
        worst = 0.0
        for near in ("A", "B"):
            for o in ("+", "-"):
                p = measurement_probability(state, near, near_rotation, o, far_rotation=U)
                b = base[near, o]
                if isinstance(p, Scalar) and isinstance(b, Scalar):
                    worst = max(worst, abs(float((p - b).constant())))
                else:
                    exact = False
                    worst = max(worst, abs(float(p) - float(b)))
        devs.append(worst)
    return CausalityReport(max(devs, default=0.0), exact, len(devs), tuple(devs))


# --- seeded sampling -------------------------------------------------------

def random_axis(rng: np.random.Generator) -> tuple:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return tuple(float(x) for x in v)


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a, b = complex(q[0], q[1]), complex(q[2], q[3])
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]])


def exact_su2_elements() -> list:
    """A few SU(2) elements with entries in Q(i, sqrt2)."""
    h, i = INV_SQRT2, QI2(0, 0, 1)
    z = QI2(0)
    gens = [
        ((h, -h), (h, h)),
        ((h, i * h), (i * h, h)),
        ((i, z), (z, -i)),
        ((h + i * h, z), (z, h - i * h)),
    ]
    out = list(gens)
    for g in gens:
        for k in gens:
            out.append(tuple(tuple(sum((g[r][t] * k[t][c] for t in range(2)), QI2(0))
                                   for c in range(2)) for r in range(2)))
    return out


def rotation_matrix(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SO(3) element via QR with sign fix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def commutator_check(statistics: str = BOSON) -> dict:
    """Exact residuals of [S_i, S_j] - i eps_ijk S_k and the cross-species commutators."""
    rules = quantum_rules(statistics)
    out = {}
    eps = {(1, 2): 3, (2, 3): 1, (3, 1): 2}
    for sp in ("A", "B"):
        for (i, j), k in eps.items():
            si, sj = spin_operator(sp, i, statistics), spin_operator(sp, j, statistics)
            lhs = normal_order(si * sj - sj * si, rules)
            rhs = normal_order(spin_operator(sp, k, statistics) * QI2(0, 0, 1), rules)
            out[f"[S{i}^{sp},S{j}^{sp}]"] = (lhs - rhs).is_zero()
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            sa, sb = spin_operator("A", i, statistics), spin_operator("B", j, statistics)
            out[f"[S{i}^A,S{j}^B]"] = normal_order(sa * sb - sb * sa, rules).is_zero()
    return out
