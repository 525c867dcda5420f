"""Hot loops of the Fock-tensor evaluator.

States are arrays of shape (L**4, d): four truncated bosonic modes
(a1, a2, b1, b2, flattened row-major) times the internal i_eff factor.
The one primitive is ``apply_split``, the action of

    alpha_k = c_k (x) 1 + sum_m f_m (x) T[m],   f_0 = 1, f_1, f_2 = c_pair

or of its adjoint. Two interchangeable backends implement it: a numba
kernel and a pure-numpy version. ``TRACECHSH_KERNEL=numpy`` forces the
fallback; the default is numba when it imports.
"""

from __future__ import annotations

import math
import os

import numpy as np

N_MODES = 4
PAIRS = ((0, 1), (0, 1), (2, 3), (2, 3))


# --- numpy backend ----------------------------------------------------------

def _shift_numpy(v5: np.ndarray, axis: int, dagger: bool, sq: np.ndarray) -> np.ndarray:
    L = v5.shape[0]
    out = np.zeros_like(v5)
    lo = [slice(None)] * 5
    hi = [slice(None)] * 5
    shape = [1] * 5
    shape[axis] = L - 1
    if dagger:
        # (c+ v)[n] = sqrt(n) v[n-1]
        lo[axis], hi[axis] = slice(1, L), slice(0, L - 1)
    else:
        # (c v)[n] = sqrt(n+1) v[n+1]
        lo[axis], hi[axis] = slice(0, L - 1), slice(1, L)
    out[tuple(lo)] = v5[tuple(hi)] * sq[1:].reshape(shape)
    return out


def apply_split_numpy(v, T, k, dagger, L):
    d = v.shape[1]
    v5 = v.reshape((L,) * N_MODES + (d,))
    sq = np.sqrt(np.arange(L, dtype=float))
    M = np.conj(np.swapaxes(T, 1, 2)) if dagger else T
    out = v5 @ M[0].T
    if k >= 0:
        out += _shift_numpy(v5, k, dagger, sq)
    p0, p1 = PAIRS[k] if k >= 0 else PAIRS[-k - 1]
    out += _shift_numpy(v5 @ M[1].T, p0, dagger, sq)
    out += _shift_numpy(v5 @ M[2].T, p1, dagger, sq)
    return out.reshape(v.shape)


# --- numba backend ----------------------------------------------------------

def _apply_split_loops(v, T, k, dagger, L):
    nf, d = v.shape
    out = np.zeros_like(v)
    kk = k if k >= 0 else -k - 1
    p0 = 0 if kk < 2 else 2
    p1 = p0 + 1
    sk = L ** (3 - kk)
    s0 = L ** (3 - p0)
    s1 = L ** (3 - p1)
    M = np.empty_like(T)
    for m in range(3):
        for p in range(d):
            for q in range(d):
                M[m, p, q] = np.conj(T[m, q, p]) if dagger else T[m, p, q]
    for f in range(nf):
        nk = (f // sk) % L
        n0 = (f // s0) % L
        n1 = (f // s1) % L
        for p in range(d):
            acc = 0j
            for q in range(d):
                acc += M[0, p, q] * v[f, q]
            if dagger:
                if n0 >= 1:
                    w = 0j
                    for q in range(d):
                        w += M[1, p, q] * v[f - s0, q]
                    acc += math.sqrt(n0) * w
                if n1 >= 1:
                    w = 0j
                    for q in range(d):
                        w += M[2, p, q] * v[f - s1, q]
                    acc += math.sqrt(n1) * w
                if k >= 0 and nk >= 1:
                    acc += math.sqrt(nk) * v[f - sk, p]
            else:
                if n0 + 1 < L:
                    w = 0j
                    for q in range(d):
                        w += M[1, p, q] * v[f + s0, q]
                    acc += math.sqrt(n0 + 1) * w
                if n1 + 1 < L:
                    w = 0j
                    for q in range(d):
                        w += M[2, p, q] * v[f + s1, q]
                    acc += math.sqrt(n1 + 1) * w
                if k >= 0 and nk + 1 < L:
                    acc += math.sqrt(nk + 1) * v[f + sk, p]
            out[f, p] = acc
    return out


try:
    from numba import njit

    apply_split_numba = njit(cache=True)(_apply_split_loops)

    @njit(cache=True)
    def _sandwich_numba(T4, chi, L):
        ap = apply_split_numba
        psi = np.zeros((L ** 4, chi.shape[0]), dtype=np.complex128)
        psi[0, :] = chi
        v = ap(ap(psi, T4[3], 3, True, L), T4[0], 0, True, L) \
            - ap(ap(psi, T4[2], 2, True, L), T4[1], 1, True, L)
        w = ap(ap(v, T4[2], 2, False, L), T4[2], 2, True, L) \
            - ap(ap(v, T4[3], 3, False, L), T4[3], 3, True, L)
        w = ap(ap(w, T4[0], 0, False, L), T4[0], 0, True, L) \
            - ap(ap(w, T4[1], 1, False, L), T4[1], 1, True, L)
        z = ap(ap(v, T4[3], 3, False, L), T4[2], 2, True, L) \
            + ap(ap(v, T4[2], 2, False, L), T4[3], 3, True, L)
        z = ap(ap(z, T4[1], 1, False, L), T4[0], 0, True, L) \
            + ap(ap(z, T4[0], 0, False, L), T4[1], 1, True, L)
        f = 0j
        nrm = 0.0
        for i in range(v.shape[0]):
            for p in range(v.shape[1]):
                f += np.conj(v[i, p]) * (w[i, p] + z[i, p])
                nrm += v[i, p].real ** 2 + v[i, p].imag ** 2
        return f, 0.5 * nrm

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    apply_split_numba = None
    _sandwich_numba = None
    HAVE_NUMBA = False


def backend_name() -> str:
    choice = os.environ.get("TRACECHSH_KERNEL", "numba").lower()
    if choice == "numpy" or not HAVE_NUMBA:
        return "numpy"
    if choice != "numba":
        raise ValueError(f"TRACECHSH_KERNEL must be 'numba' or 'numpy', got {choice!r}")
    return "numba"


def get_apply(backend: str | None = None):
    backend = backend or backend_name()
    return apply_split_numba if backend == "numba" else apply_split_numpy


# --- composite evaluations ----------------------------------------------------

def vacuum_state(chi: np.ndarray, L: int) -> np.ndarray:
    v = np.zeros((L ** N_MODES, chi.shape[0]), dtype=complex)
    v[0] = chi
    return v


def sandwich(T4: np.ndarray, chi: np.ndarray, L: int, backend: str | None = None):
    """(<Bra X Ket>, (1/2)<Bra Ket>) for the split operators with
    T4[k] the (3, d, d) internal blocks of a1, a2, b1, b2."""
    backend = backend or backend_name()
    T4 = np.ascontiguousarray(T4, dtype=complex)
    if backend == "numba":
        f, nrm = _sandwich_numba(T4, np.ascontiguousarray(chi, dtype=complex), L)
        return complex(f), float(nrm)
    ap = get_apply(backend)

    def al(i, v):
        return ap(v, T4[i], i, False, L)

    def ald(i, v):
        return ap(v, T4[i], i, True, L)

    psi = vacuum_state(np.asarray(chi, dtype=complex), L)
    # Ket psi_0 = (alpha1+ beta2+ - alpha2+ beta1+) psi_0
    v = ald(0, ald(3, psi)) - ald(1, ald(2, psi))
    w = ald(2, al(2, v)) - ald(3, al(3, v))
    w = ald(0, al(0, w)) - ald(1, al(1, w))
    z = ald(2, al(3, v)) + ald(3, al(2, v))
    z = ald(0, al(1, z)) + ald(1, al(0, z))
    return complex(np.vdot(v, w + z)), float(0.5 * np.vdot(v, v).real)


def first_order_values(T4: np.ndarray, chi: np.ndarray, L: int, backend: str | None = None) -> np.ndarray:
    """x[k, j] = psi_0+ A_k c_j+ psi_0 with c_j the j-th mode of k's species."""
    ap = get_apply(backend)
    T4 = np.ascontiguousarray(T4, dtype=complex)
    psi = vacuum_state(np.asarray(chi, dtype=complex), L)
    zero = np.zeros_like(T4[0])
    out = np.zeros((4, 2), dtype=complex)
    for k in range(4):
        for j, mode in enumerate(PAIRS[k]):
            up = ap(psi, zero, mode, True, L)
            # k encoded as -(k+1): perturbation part only, no ladder term
            out[k, j] = np.vdot(psi, ap(up, T4[k], -k - 1, False, L))
    return out
