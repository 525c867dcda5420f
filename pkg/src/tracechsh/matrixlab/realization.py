"""Concrete matrix realizations of alpha_i = a_i + A_i, beta_i = b_i + B_i.

Space: four truncated bosonic modes (a1, a2, b1, b2; occupations 0..L-1)
tensored with an internal factor C^d carrying i_eff = i diag(1, -1, ...).
The grade-1 parts are

    A_k = sum_m f_m (x) T_k[m],   f_0 = 1, f_1 = c_first, f_2 = c_second

with c the two ladder modes of A_k's own species and every T_k[m] off-block
in the i_eff eigenbasis. Then A_k anticommutes with i_eff, commutes with the
other species' ladders, and [c_j, A_k+] = 1 (x) T_k[j]+ is nonzero exactly
when T_k[j] is. psi_0 = |0000> (x) chi.

Sandwiched words never put more than two quanta into one mode, so every
reported scalar is exact for L >= 4 ("physical subspace": occupations <= 2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidRealization
from . import kernels
from .ieff import IEffStructure, anticommutator_norm, commutator_norm, effective_projection, frobenius, split_commuting

SQRT2 = np.sqrt(2.0)
TSIRELSON = 2 * SQRT2
PHYS_MAX = 2
CONVENTIONS = ("standard", "emergent")
SPECIES = (("A", "a", 1), ("A", "a", 2), ("B", "b", 1), ("B", "b", 2))
STRUCT_TOL = 1e-12


@dataclass(frozen=True)
class RealizationConfig:
    cutoff: int = 5
    epsilon: float = 0.1
    seed: int = 0
    internal_dim: int = 2
    convention: str = "standard"

    def check(self) -> None:
        if self.cutoff < 4:
            raise ValueError(f"cutoff L must be >= 4, got {self.cutoff}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon scale must be >= 0, got {self.epsilon}")
        if self.internal_dim < 2 or self.internal_dim % 2:
            raise ValueError(f"internal dimension must be even and >= 2, got {self.internal_dim}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")


def internal_signs(d: int) -> np.ndarray:
    s = np.ones(d)
    s[1::2] = -1.0
    return s


def off_block_mask(d: int) -> np.ndarray:
    s = internal_signs(d)
    return s[:, None] != s[None, :]


def n_params(d: int) -> int:
    """Real parameters: off-block entries of 4 x 3 blocks plus (theta, phi)."""
    return 4 * 3 * int(off_block_mask(d).sum()) * 2 + 2


def _ladder(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n)), 1)


_A3 = _ladder(PHYS_MAX + 1)
_I3 = np.eye(PHYS_MAX + 1)
_PAIR_FACTORS = np.stack([np.kron(_I3, _I3), np.kron(_A3, _I3), np.kron(_I3, _A3)])


def physical_norms(T: np.ndarray) -> np.ndarray:
    """Spectral norms of sum_m f_m (x) T[..., m, :, :] on occupations <= 2
    of the two modes involved; T has shape (..., 3, d, d)."""
    d = T.shape[-1]
    M = np.einsum("mij,...mpq->...ipjq", _PAIR_FACTORS, T).reshape(T.shape[:-3] + (9 * d, 9 * d))
    top = np.linalg.eigvalsh(np.conj(np.swapaxes(M, -1, -2)) @ M)[..., -1]
    return np.sqrt(np.maximum(top, 0.0))


def physical_norm(T: np.ndarray) -> float:
    return float(physical_norms(T))


def blocks_from_params(p: np.ndarray, d: int, epsilon: float):
    """Map the real parameter vector to (T4, chi) with ||A_k||_phys = epsilon."""
    p = np.asarray(p, dtype=float)
    mask = off_block_mask(d)
    n_off = int(mask.sum())
    raw = p[: 4 * 3 * n_off * 2].reshape(4, 3, n_off, 2)
    T4 = np.zeros((4, 3, d, d), dtype=complex)
    T4[:, :, mask] = raw[..., 0] + 1j * raw[..., 1]
    nrm = physical_norms(T4)
    scale = np.divide(epsilon, nrm, out=np.zeros_like(nrm), where=nrm > 0)
    T4 *= scale[:, None, None, None]
    theta, phi = p[-2], p[-1]
    chi = np.zeros(d, dtype=complex)
    chi[0], chi[1] = np.cos(theta), np.sin(theta) * np.exp(1j * phi)
    return T4, chi


def random_params(rng: np.random.Generator, d: int) -> np.ndarray:
    p = rng.normal(size=n_params(d))
    p[-2] = rng.uniform(0, np.pi)
    p[-1] = rng.uniform(0, 2 * np.pi)
    return p


class MatrixRealization:
    """Immutable realization; sparse matrices are built on first use."""

    def __init__(self, T4, chi, cutoff: int, epsilon: float, convention: str = "standard",
                 seed: int | None = None, params=None):
        self.T4 = np.array(T4, dtype=complex)
        self.chi = np.array(chi, dtype=complex)
        self.T4.setflags(write=False)
        self.chi.setflags(write=False)
        self.cutoff = int(cutoff)
        self.epsilon = float(epsilon)
        self.convention = convention
        self.seed = seed
        self.params = None if params is None else np.array(params, dtype=float)
        self.internal_dim = self.chi.shape[0]
        RealizationConfig(self.cutoff, self.epsilon, 0, self.internal_dim, convention).check()
        if self.T4.shape != (4, 3, self.internal_dim, self.internal_dim):
            raise ValueError(f"T4 must have shape (4, 3, d, d), got {self.T4.shape}")

    # -- spaces ---------------------------------------------------------------

    @property
    def fock_dim(self) -> int:
        return self.cutoff ** 4

    @property
    def dim(self) -> int:
        return self.fock_dim * self.internal_dim

    @cached_property
    def ieff(self) -> IEffStructure:
        return IEffStructure(self.dim)

    @cached_property
    def physical_indices(self) -> np.ndarray:
        L, d = self.cutoff, self.internal_dim
        idx = []
        for occ in itertools.product(range(PHYS_MAX + 1), repeat=4):
            f = ((occ[0] * L + occ[1]) * L + occ[2]) * L + occ[3]
            idx.extend(f * d + p for p in range(d))
        return np.array(sorted(idx))

    def compress(self, M) -> np.ndarray:
        ix = self.physical_indices
        M = M.tocsr() if sp.issparse(M) else M
        out = M[ix][:, ix]
        return out.toarray() if sp.issparse(out) else np.asarray(out)

    # -- operators ------------------------------------------------------------

    def _fock_ladder(self, mode: int) -> sp.csr_matrix:
        L = self.cutoff
        a = sp.csr_matrix(_ladder(L))
        eye = sp.identity(L, format="csr")
        m = sp.identity(1, format="csr")
        for j in range(4):
            m = sp.kron(m, a if j == mode else eye, format="csr")
        return m

    @cached_property
    def _ladders(self) -> list:
        d = self.internal_dim
        out = []
        for k in range(4):
            c = self._fock_ladder(k)
            if self.convention == "emergent":
                s = internal_signs(d)
                Pp, Pm = sp.diags((s > 0).astype(float)), sp.diags((s < 0).astype(float))
                out.append((sp.kron(c, Pp) + sp.kron(c.T.conj(), Pm)).tocsr())
            else:
                out.append(sp.kron(c, sp.identity(d), format="csr"))
        return out

    @cached_property
    def _perturbations(self) -> list:
        out = []
        eye = sp.identity(self.fock_dim, format="csr")
        for k in range(4):
            first = 0 if k < 2 else 2
            f = (eye, self._fock_ladder(first), self._fock_ladder(first + 1))
            m = sum(sp.kron(f[j], sp.csr_matrix(self.T4[k, j])) for j in range(3))
            out.append(sp.csr_matrix(m))
        return out

    def ladder(self, k: int) -> sp.csr_matrix:
        """Commuting part of species index k (0..3 = a1, a2, b1, b2)."""
        return self._ladders[k]

    def perturbation(self, k: int) -> sp.csr_matrix:
        return self._perturbations[k]

    def split_operator(self, k: int) -> sp.csr_matrix:
        return (self._ladders[k] + self._perturbations[k]).tocsr()

    def alpha(self, i: int) -> sp.csr_matrix:
        return self.split_operator(i - 1)

    def beta(self, i: int) -> sp.csr_matrix:
        return self.split_operator(i + 1)

    @cached_property
    def psi0(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[: self.internal_dim] = self.chi
        return v

    def flipped(self) -> "MatrixRealization":
        """A_i, B_i -> -A_i, -B_i."""
        params = None if self.params is None else self.params.copy()
        return MatrixRealization(-self.T4, self.chi, self.cutoff, self.epsilon, self.convention,
                                 self.seed, params)

    def with_cutoff(self, cutoff: int) -> "MatrixRealization":
        return MatrixRealization(self.T4, self.chi, cutoff, self.epsilon, self.convention,
                                 self.seed, self.params)


def build_realization(config: RealizationConfig | None = None, **kw) -> MatrixRealization:
    """Seeded random realization with ||A_k||_phys = epsilon exactly."""
    config = config or RealizationConfig(**kw)
    config.check()
    rng = np.random.default_rng(config.seed)
    p = random_params(rng, config.internal_dim)
    if config.convention == "emergent":
        # the emergent ladders only annihilate psi_0 in the +i sector
        p[-2], p[-1] = 0.0, 0.0
    T4, chi = blocks_from_params(p, config.internal_dim, config.epsilon)
    return MatrixRealization(T4, chi, config.cutoff, config.epsilon, config.convention,
                             config.seed, p)


def realization_from_params(p, cutoff: int, epsilon: float, internal_dim: int = 2,
                            seed: int | None = None) -> MatrixRealization:
    T4, chi = blocks_from_params(p, internal_dim, epsilon)
    return MatrixRealization(T4, chi, cutoff, epsilon, "standard", seed, p)


# -- scalar observables ---------------------------------------------------------

def _sparse_sandwich(r: MatrixRealization):
    al = [r.alpha(1), r.alpha(2)]
    be = [r.beta(1), r.beta(2)]
    H = lambda m: m.T.conj()
    psi = r.psi0
    v = H(al[0]) @ (H(be[1]) @ psi) - H(al[1]) @ (H(be[0]) @ psi)
    w = H(be[0]) @ (be[0] @ v) - H(be[1]) @ (be[1] @ v)
    w = H(al[0]) @ (al[0] @ w) - H(al[1]) @ (al[1] @ w)
    z = H(be[0]) @ (be[1] @ v) + H(be[1]) @ (be[0] @ v)
    z = H(al[0]) @ (al[1] @ z) + H(al[1]) @ (al[0] @ z)
    return complex(np.vdot(v, w + z)), float(0.5 * np.vdot(v, v).real)


def numeric_sandwich(r: MatrixRealization, backend: str | None = None):
    """(<psi_0| Bra X Ket |psi_0>, (1/2)<psi_0| Bra Ket |psi_0>)."""
    if r.convention == "standard" and backend != "sparse":
        return kernels.sandwich(r.T4, r.chi, r.cutoff, backend)
    return _sparse_sandwich(r)


def numeric_F_TD(r: MatrixRealization, backend: str | None = None) -> float:
    """|<Bra X Ket>| / sqrt2, the +-1-normalized CHSH value."""
    return abs(numeric_sandwich(r, backend)[0]) / SQRT2


def normalization(r: MatrixRealization, backend: str | None = None) -> float:
    return numeric_sandwich(r, backend)[1]


def numeric_indeterminates(r: MatrixRealization, backend: str | None = None) -> dict:
    """psi_0+ A_i a_j+ psi_0 etc., keyed like the symbolic indeterminates."""
    from ..tdsym import indeterminate_name

    if r.convention == "standard" and backend != "sparse":
        x = kernels.first_order_values(r.T4, r.chi, r.cutoff, backend)
    else:
        x = np.zeros((4, 2), dtype=complex)
        for k in range(4):
            first = 0 if k < 2 else 2
            for j in range(2):
                up = r.ladder(first + j).T.conj() @ r.psi0
                x[k, j] = np.vdot(r.psi0, r.perturbation(k) @ up)
    out = {}
    for k, (big, small, i) in enumerate(SPECIES):
        for j in range(2):
            out[indeterminate_name(big, i, small, j + 1)] = complex(x[k, j])
    return out


def numeric_P0(r: MatrixRealization, backend: str | None = None) -> complex:
    return complex(sum(numeric_indeterminates(r, backend).values()))


def diagonal_sum(r: MatrixRealization, backend: str | None = None) -> complex:
    x = numeric_indeterminates(r, backend)
    return complex(sum(v for name, v in x.items() if name[3] == name[6]))


def formula_value(r: MatrixRealization, backend: str | None = None) -> float:
    """2 sqrt2 + Re(P0)/sqrt2 evaluated on the realization."""
    return TSIRELSON + numeric_P0(r, backend).real / SQRT2


@lru_cache(maxsize=None)
def _reduced(statistics: str = "boson"):
    from ..tdsym import CaseSpec, derive_F_TD

    return derive_F_TD(CaseSpec(statistics=statistics))


def derived_value(r: MatrixRealization, backend: str | None = None) -> float:
    """The symbolic first-order polynomial evaluated at the measured indeterminates."""
    return complex(_reduced().value.substitute(numeric_indeterminates(r, backend))).real


def numeric_correlation(r: MatrixRealization, n, m) -> float:
    """+-1-normalized <(n.S^A)(m.S^B)> in the state Ket psi_0 built from alpha, beta."""
    H = lambda x: x.T.conj()
    al, be = [r.alpha(1), r.alpha(2)], [r.beta(1), r.beta(2)]

    def spin(ops, axis):
        s1 = 0.5 * (H(ops[0]) @ ops[1] + H(ops[1]) @ ops[0])
        s2 = 0.5j * (H(ops[1]) @ ops[0] - H(ops[0]) @ ops[1])
        s3 = 0.5 * (H(ops[0]) @ ops[0] - H(ops[1]) @ ops[1])
        return float(axis[0]) * s1 + float(axis[1]) * s2 + float(axis[2]) * s3

    psi = r.psi0
    ket = H(al[0]) @ (H(be[1]) @ psi) - H(al[1]) @ (H(be[0]) @ psi)
    val = np.vdot(ket, spin(al, n) @ (spin(be, m) @ ket)) / np.vdot(ket, ket)
    return float(4 * val.real)


# -- conserved charge and Hamiltonian ---------------------------------------------

def charge_terms(r: MatrixRealization) -> list:
    """i[alpha_k, alpha_k+] and i[beta_k, beta_k+] compressed to the physical subspace."""
    out = []
    for k in range(4):
        x = r.split_operator(k)
        xd = x.T.conj()
        out.append(r.compress(1j * (x @ xd - xd @ x)))
    return out


def adler_millard(r: MatrixRealization) -> np.ndarray:
    """C = i sum_k ([alpha_k, alpha_k+] + [beta_k, beta_k+]) on the physical subspace."""
    return sum(charge_terms(r))


def trace_hamiltonian_complex(r: MatrixRealization) -> complex:
    """Tr of (1/2) sum_k ({alpha_k, alpha_k+} + {beta_k, beta_k+}) on the physical subspace."""
    tot = 0j
    for k in range(4):
        x = r.split_operator(k)
        xd = x.T.conj()
        tot += np.trace(r.compress(x @ xd + xd @ x))
    return 0.5 * tot


def trace_hamiltonian(r: MatrixRealization) -> float:
    h = trace_hamiltonian_complex(r)
    if abs(h.imag) > STRUCT_TOL * max(1.0, abs(h.real)):
        raise InvalidRealization(f"trace Hamiltonian has imaginary part {h.imag:.3g}")
    return float(h.real)


def emergent_charge_deviation(r: MatrixRealization) -> float:
    """Max deviation of each term's effective projection, on the +i sector,
    from the emergent value i * identity."""
    ix = r.physical_indices
    sub = IEffStructure(len(ix))
    # physical indices keep the internal index as the fastest one, so the
    # compressed i_eff is again i diag(1, -1, ...)
    plus = sub.sector(1)
    worst = 0.0
    for term in charge_terms(r):
        eff = effective_projection(term, sub)
        block = eff[np.ix_(plus, plus)]
        worst = max(worst, float(np.abs(block - 1j * np.eye(len(plus))).max()))
    return worst


# -- structural validation -------------------------------------------------------

@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)

    def add(self, name: str, value: float, tol: float, upper: bool = True) -> None:
        ok = value <= tol if upper else value > tol
        self.checks[name] = {"value": float(value), "tol": tol, "ok": bool(ok),
                             "kind": "max" if upper else "min"}

    @property
    def passed(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def failures(self) -> dict:
        return {k: v for k, v in self.checks.items() if not v["ok"]}


def validate(r: MatrixRealization, strict: bool = False) -> ValidationReport:
    """Split recovery, (a1)-(a3), i_eff grading and the epsilon bound."""
    rep = ValidationReport()
    s = r.ieff
    ix = r.physical_indices
    unit = sp.identity(r.dim, format="csr")
    if r.convention == "emergent":
        unit = sp.diags(s.signs, format="csr")
    for k in range(4):
        Mc, Ma = split_commuting(r.split_operator(k), s)
        rep.add(f"split[{k}] commuting part", frobenius(Mc - r.ladder(k)), STRUCT_TOL)
        rep.add(f"split[{k}] anticommuting part", frobenius(Ma - r.perturbation(k)), STRUCT_TOL)
        rep.add(f"[c{k}, i_eff]", commutator_norm(r.ladder(k), s), STRUCT_TOL)
        rep.add(f"{{A{k}, i_eff}}", anticommutator_norm(r.perturbation(k), s), 1e-14)
        rep.add(f"||A{k}||_phys", np.linalg.norm(r.compress(r.perturbation(k)), 2),
                r.epsilon * (1 + 1e-12) + 1e-15)
        rep.add(f"(a3) c{k} psi0", np.linalg.norm(r.ladder(k) @ r.psi0), STRUCT_TOL)
    for k, j in itertools.product(range(4), repeat=2):
        ck, cj = r.ladder(k), r.ladder(j)
        comm = ck @ cj.T.conj() - cj.T.conj() @ ck
        target = unit if k == j else sp.csr_matrix((r.dim, r.dim))
        rep.add(f"(a1) [c{k}, c{j}+]", frobenius(sp.csr_matrix(r.compress(comm - target))), STRUCT_TOL)
        rep.add(f"(a1) [c{k}, c{j}]", frobenius(sp.csr_matrix(r.compress(ck @ cj - cj @ ck))), STRUCT_TOL)
    if r.epsilon > 0:
        for k in range(4):
            first = 0 if k < 2 else 2
            for j in (first, first + 1):
                cj = r.ladder(j)
                Ad = r.perturbation(k).T.conj()
                rep.add(f"(a2) [c{j}, A{k}+] != 0", frobenius(cj @ Ad - Ad @ cj), 0.0, upper=False)
    rep.add("|psi0| - 1", abs(np.linalg.norm(r.psi0) - 1), STRUCT_TOL)
    if strict and not rep.passed:
        raise InvalidRealization(f"realization fails {sorted(rep.failures())}")
    return rep


# -- cross-validation against the symbolic reduction ---------------------------------

def consistency_check(r: MatrixRealization, backend: str | None = None) -> dict:
    """Numeric F_TD against the symbolic first-order polynomial and the
    2 sqrt2 + Re(P0)/sqrt2 form, both at the measured indeterminates."""
    F = numeric_F_TD(r, backend)
    pred = derived_value(r, backend)
    form = formula_value(r, backend)
    return {"epsilon": r.epsilon, "F_TD": F, "derived": pred, "residual": F - pred,
            "formula": form, "formula_residual": F - form}
