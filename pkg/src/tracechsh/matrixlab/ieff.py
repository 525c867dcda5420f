"""The i_eff grading: effective projection and commuting/anticommuting split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class IEffStructure:
    """i_eff = i diag(1, -1, 1, -1, ...) on a space of even dimension."""

    dimension: int

    def __post_init__(self):
        if self.dimension <= 0 or self.dimension % 2:
            raise ValueError(f"i_eff needs a positive even dimension, got {self.dimension}")

    @property
    def signs(self) -> np.ndarray:
        s = np.ones(self.dimension)
        s[1::2] = -1.0
        return s

    @property
    def diagonal(self) -> np.ndarray:
        return 1j * self.signs

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def sparse(self) -> sp.csr_matrix:
        return sp.diags(self.diagonal, format="csr")

    def sector(self, sign: int = 1) -> np.ndarray:
        """Indices of the +i (sign=1) or -i (sign=-1) eigenspace."""
        return np.flatnonzero(self.signs == sign)


def _check(M, s: IEffStructure):
    if M.shape != (s.dimension, s.dimension):
        raise ValueError(f"matrix shape {M.shape} does not match i_eff dimension {s.dimension}")


def _conjugate_by_ieff(M, s: IEffStructure):
    d = s.diagonal
    if sp.issparse(M):
        D = sp.diags(d)
        return (D @ M @ D).tocsr()
    return d[:, None] * M * d[None, :]


def effective_projection(M, s: IEffStructure):
    """M_eff = (M - i_eff M i_eff) / 2, the part commuting with i_eff."""
    _check(M, s)
    return (M - _conjugate_by_ieff(M, s)) * 0.5


def split_commuting(M, s: IEffStructure):
    """(M_c, M_a) with M_c commuting and M_a anticommuting with i_eff."""
    Mc = effective_projection(M, s)
    return Mc, M - Mc


def commutator_norm(M, s: IEffStructure) -> float:
    D = s.sparse() if sp.issparse(M) else s.matrix()
    return frobenius(M @ D - D @ M)


def anticommutator_norm(M, s: IEffStructure) -> float:
    D = s.sparse() if sp.issparse(M) else s.matrix()
    return frobenius(M @ D + D @ M)


def frobenius(M) -> float:
    if sp.issparse(M):
        return float(np.sqrt((abs(M.data) ** 2).sum())) if M.nnz else 0.0
    return float(np.linalg.norm(M))
