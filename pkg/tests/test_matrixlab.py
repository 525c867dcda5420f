"""matrix-lab: i_eff grading, realizations, numeric CHSH, charge, kernels."""

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from tracechsh import spin
from tracechsh.errors import InvalidRealization
from tracechsh.matrixlab import kernels
from tracechsh.matrixlab.ieff import (IEffStructure, anticommutator_norm, commutator_norm,
                                      effective_projection, split_commuting)
from tracechsh.matrixlab.realization import (RealizationConfig, adler_millard, build_realization,
                                             consistency_check, emergent_charge_deviation, formula_value,
                                             normalization, numeric_correlation, numeric_F_TD,
                                             numeric_indeterminates, numeric_P0, numeric_sandwich,
                                             physical_norm, trace_hamiltonian, trace_hamiltonian_complex,
                                             validate)

TSIRELSON = 2 * np.sqrt(2)


def _rand(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@pytest.fixture(scope="module")
def r01():
    return build_realization(RealizationConfig(5, 0.1, 0))


# -- i_eff structure ------------------------------------------------------------------

def test_ieff_structure():
    s = IEffStructure(6)
    D = s.matrix()
    assert np.allclose(D @ D, -np.eye(6))
    assert np.allclose(D.conj().T, -D)
    assert list(s.sector(1)) == [0, 2, 4]
    with pytest.raises(ValueError):
        IEffStructure(5)


def test_effective_projection_examples(rng):
    s = IEffStructure(4)
    signs = s.signs
    M = _rand(rng, 4)
    comm = M * (np.equal.outer(signs, signs))
    anti = M * (~np.equal.outer(signs, signs))
    assert np.allclose(effective_projection(comm, s), comm)
    assert np.allclose(effective_projection(anti, s), 0)
    with pytest.raises(ValueError):
        effective_projection(np.eye(3), s)


def test_perturbation_has_zero_effective_part(r01):
    for k in range(4):
        P = r01.perturbation(k)
        assert abs(effective_projection(P, r01.ieff)).max() == 0


def test_split_examples(rng):
    s = IEffStructure(8)
    c, a = split_commuting(np.eye(8), s)
    assert np.allclose(c, np.eye(8)) and np.allclose(a, 0)
    c, a = split_commuting(s.matrix(), s)
    assert np.allclose(c, s.matrix()) and np.allclose(a, 0)
    M = _rand(rng, 8)
    c, a = split_commuting(M, s)
    assert np.abs(c + a - M).max() <= 1e-14
    assert commutator_norm(c, s) <= 1e-14 and anticommutator_norm(a, s) <= 1e-14


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 4, 6]))
def test_effective_projection_idempotent_linear(seed, n):
    rng = np.random.default_rng(seed)
    s = IEffStructure(n)
    M, N = _rand(rng, n), _rand(rng, n)
    z = complex(*rng.normal(size=2))
    E = effective_projection(M, s)
    assert np.allclose(effective_projection(E, s), E, atol=1e-14)
    assert np.allclose(effective_projection(M + z * N, s), E + z * effective_projection(N, s), atol=1e-13)
    _, a = split_commuting(M, s)
    assert np.abs(effective_projection(a, s)).max() <= 1e-14


def test_sparse_and_dense_agree(rng):
    s = IEffStructure(6)
    M = _rand(rng, 6)
    assert np.allclose(effective_projection(sp.csr_matrix(M), s).toarray(), effective_projection(M, s))


# -- realizations ----------------------------------------------------------------------

def test_config_errors():
    with pytest.raises(ValueError):
        build_realization(RealizationConfig(cutoff=3))
    with pytest.raises(ValueError):
        build_realization(RealizationConfig(epsilon=-0.1))
    with pytest.raises(ValueError):
        build_realization(RealizationConfig(internal_dim=3))


@pytest.mark.parametrize("seed", range(20))
def test_invariants_random_seeds(seed):
    r = build_realization(RealizationConfig(4, 0.1, seed))
    rep = validate(r)
    assert rep.passed, rep.failures()
    for k in range(4):
        assert anticommutator_norm(r.perturbation(k), r.ieff) <= 1e-14
        assert abs(physical_norm(r.T4[k]) - 0.1) < 1e-12


def test_validate_strict_raises():
    r = build_realization(RealizationConfig(4, 0.1, 0))
    bad = type(r)(r.T4 * 2, r.chi, r.cutoff, r.epsilon)
    with pytest.raises(InvalidRealization):
        validate(bad, strict=True)


def test_zero_epsilon_is_quantum():
    r = build_realization(RealizationConfig(5, 0.0, 0))
    assert abs(numeric_F_TD(r) - TSIRELSON) <= 1e-10
    assert abs(normalization(r) - 1) <= 1e-12
    assert numeric_P0(r) == 0


def test_backends_agree(r01):
    ref = numeric_sandwich(r01, "sparse")
    for b in ("numpy", "numba"):
        f, n = numeric_sandwich(r01, b)
        assert abs(f - ref[0]) < 1e-12 and abs(n - ref[1]) < 1e-12


def test_kernel_env_selection(monkeypatch):
    monkeypatch.setenv("TRACECHSH_KERNEL", "numpy")
    assert kernels.backend_name() == "numpy"
    monkeypatch.setenv("TRACECHSH_KERNEL", "numba")
    assert kernels.backend_name() == "numba"
    monkeypatch.setenv("TRACECHSH_KERNEL", "fortran")
    with pytest.raises(ValueError):
        kernels.backend_name()


def test_kernel_single_application_agrees(rng):
    L, d = 4, 2
    v = rng.normal(size=(L ** 4, d)) + 1j * rng.normal(size=(L ** 4, d))
    T = rng.normal(size=(3, d, d)) + 1j * rng.normal(size=(3, d, d))
    for k in (0, 1, 2, 3, -1, -3):
        for dagger in (False, True):
            a = kernels.apply_split_numpy(v, T, k, dagger, L)
            b = kernels.apply_split_numba(v, T, k, dagger, L)
            assert np.abs(a - b).max() < 1e-12


def test_sign_flip_negates_P0(r01):
    f = r01.flipped()
    assert abs(numeric_P0(f).real + numeric_P0(r01).real) <= 1e-12
    x, y = numeric_indeterminates(r01), numeric_indeterminates(f)
    assert all(abs(x[k] + y[k]) <= 1e-12 for k in x)


def test_consistency_with_symbolic_polynomial():
    zero = consistency_check(build_realization(RealizationConfig(5, 0.0, 0)))
    assert abs(zero["residual"]) <= 1e-10
    small = consistency_check(build_realization(RealizationConfig(5, 1e-3, 0)))
    assert abs(small["residual"]) <= 1e-5


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_derived_residual_is_second_order(seed):
    eps = [1e-1, 1e-2, 1e-3, 1e-4]
    res = [abs(consistency_check(build_realization(RealizationConfig(4, e, seed)))["residual"]) for e in eps]
    ratios = [r / e ** 2 for r, e in zip(res, eps)]
    assert max(ratios[1:]) / min(ratios[1:]) < 2
    slope = np.polyfit(np.log(eps), np.log(res), 1)[0]
    assert abs(slope - 2) < 0.1


def test_closed_form_residual_is_first_order():
    """Measured against 2 sqrt2 + Re(P0)/sqrt2 the residual is linear in epsilon."""
    eps = [1e-2, 1e-3, 1e-4]
    res = [abs(numeric_F_TD(r) - formula_value(r))
           for r in (build_realization(RealizationConfig(4, e, 0)) for e in eps)]
    slope = np.polyfit(np.log(eps), np.log(res), 1)[0]
    assert abs(slope - 1) < 0.1


def test_truncation_independence():
    for seed in (0, 1):
        r4 = build_realization(RealizationConfig(4, 0.1, seed))
        r6 = r4.with_cutoff(6)
        assert abs(numeric_F_TD(r4) - numeric_F_TD(r6)) <= 1e-10
        assert abs(numeric_P0(r4) - numeric_P0(r6)) <= 1e-10
        assert abs(trace_hamiltonian(r4) - trace_hamiltonian(r6)) <= 1e-10 * abs(trace_hamiltonian(r4))
        C4, C6 = adler_millard(r4), adler_millard(r6)
        assert abs(np.linalg.norm(C4) - np.linalg.norm(C6)) <= 1e-10


def test_quantum_limit_correlations(rng):
    r = build_realization(RealizationConfig(4, 0.0, 0))
    s = spin.singlet()
    for _ in range(50):
        n, m = spin.random_axis(rng), spin.random_axis(rng)
        assert abs(numeric_correlation(r, n, m) - spin.correlation(s, n, m)) <= 1e-10


# -- charge and Hamiltonian ------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_charge_anti_self_adjoint_and_real_trace(seed):
    r = build_realization(RealizationConfig(4, 0.1, seed))
    C = adler_millard(r)
    assert np.abs(C + C.conj().T).max() <= 1e-12
    assert abs(trace_hamiltonian_complex(r).imag) <= 1e-12


def test_emergent_charge_terms():
    r = build_realization(RealizationConfig(4, 0.0, 0, convention="emergent"))
    assert emergent_charge_deviation(r) <= 1e-12
    assert validate(r).passed
    assert abs(numeric_F_TD(r) - TSIRELSON) <= 1e-10
