"""Independent brute-force matrix oracles (numpy only, no symbolic engine).

Two-particle spin states live in C^2 (x) C^2 with basis index 2*i + j, where
i (j) = 0 means particle A (B) occupies mode 1 (spin up).
"""

from __future__ import annotations

import itertools

import numpy as np

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def sigma_along(n) -> np.ndarray:
    n = [float(x) for x in n]
    return n[0] * SIGMA[0] + n[1] * SIGMA[1] + n[2] * SIGMA[2]


def two_particle_vector(c) -> np.ndarray:
    return np.array([complex(c[i][j]) for i in range(2) for j in range(2)])


SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
TRIPLET = {
    1: np.array([1, 0, 0, 0], dtype=complex),
    0: np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    -1: np.array([0, 0, 0, 1], dtype=complex),
}


def pauli_correlation(psi, n, m) -> float:
    op = np.kron(sigma_along(n), sigma_along(m))
    return float(np.vdot(psi, op @ psi).real)


def pauli_chsh(psi, c, cp, d, dp) -> float:
    e = pauli_correlation
    return abs(e(psi, c, d) - e(psi, c, dp) + e(psi, cp, d) + e(psi, cp, dp))


def pauli_marginal(psi, near: str, U_near, outcome: int, U_far=None) -> float:
    """Sum over the far basis of |<u_outcome (x) v_k | psi>|^2."""
    U_near = np.asarray(U_near, dtype=complex)
    U_far = np.eye(2, dtype=complex) if U_far is None else np.asarray(U_far, dtype=complex)
    u = U_near[:, outcome]
    p = 0.0
    for k in range(2):
        v = U_far[:, k]
        bra = np.kron(u, v) if near == "A" else np.kron(v, u)
        p += abs(np.vdot(bra, psi)) ** 2
    return float(p)


# --- occupation-basis ladder matrices --------------------------------------

def fermion_annihilators(n_modes: int) -> list:
    """Jordan-Wigner matrices c_k on (C^2)^n with parity strings."""
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1, -1]).astype(complex)
    eye = np.eye(2, dtype=complex)
    out = []
    for k in range(n_modes):
        factors = [z] * k + [a] + [eye] * (n_modes - k - 1)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        out.append(m)
    return out


def boson_annihilators(n_modes: int, cutoff: int) -> list:
    """Truncated ladder matrices on occupations 0..cutoff-1 per mode."""
    a = np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)
    eye = np.eye(cutoff, dtype=complex)
    out = []
    for k in range(n_modes):
        m = np.ones((1, 1), dtype=complex)
        for j in range(n_modes):
            m = np.kron(m, a if j == k else eye)
        out.append(m)
    return out


def word_matrix(word, mats: dict) -> np.ndarray:
    """Product of the matrices for (mode, dagger) letters; mats maps mode -> c."""
    dim = next(iter(mats.values())).shape[0]
    m = np.eye(dim, dtype=complex)
    for mode, dagger in word:
        c = mats[mode]
        m = m @ (c.conj().T if dagger else c)
    return m


def permutation_sign(perm) -> int:
    s = 1
    for i, j in itertools.combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            s = -s
    return s


def su2_casimir_matrices(n: int):
    """Standard spin-s matrices (s = (n-1)/2) in the |s, m> basis, m descending."""
    s = (n - 1) / 2
    m = s - np.arange(n)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / 2j
    return sx, sy, sz
