import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_spd
from lrosc.errors import LROscError
from lrosc.symplectic import (
    J2,
    J4,
    OMEGA,
    S_X,
    SIGMA_Y,
    SIGMA_Z,
    canonical_commutator,
    is_hamiltonian_matrix,
    is_symplectic,
    random_symplectic,
    symplectic_eigenvalues,
    to_block_order,
    to_mode_order,
    uncertainty_ok,
    williamson_covariance,
)

seeds = st.integers(0, 2**32 - 1)


def test_structural_identities_exact():
    assert np.array_equal(J4 @ J4, -np.eye(4))
    assert np.array_equal(SIGMA_Y, SIGMA_Y.conj().T)
    assert np.array_equal(SIGMA_Y @ SIGMA_Y, np.eye(4))
    assert np.array_equal(SIGMA_Z @ SIGMA_Z, np.eye(4))
    assert np.array_equal(OMEGA, 1j * SIGMA_Y)
    assert np.array_equal(S_X @ S_X, np.eye(4))
    assert np.array_equal(to_block_order(OMEGA), J4)
    assert np.array_equal(to_mode_order(J4), OMEGA)


def test_canonical_commutator_examples():
    assert canonical_commutator(1, 2) == 1j
    assert canonical_commutator(1, 3) == 0
    assert canonical_commutator(2, 1) == -1j
    assert canonical_commutator(3, 4) == 1j
    with pytest.raises(IndexError):
        canonical_commutator(0, 5)


@settings(max_examples=50)
@given(seeds)
def test_j_times_symmetric_is_hamiltonian(seed):
    H = random_spd(np.random.default_rng(seed))
    assert is_hamiltonian_matrix(J4 @ H)


def test_generic_diagonal_is_not_hamiltonian():
    assert not is_hamiltonian_matrix(np.diag([1.0, 2.0, 3.0, 4.0]))


def test_vacuum_and_squeezed_vacuum():
    assert symplectic_eigenvalues(0.5 * np.eye(4)) == pytest.approx((0.5, 0.5), abs=1e-14)
    a, b = 3.0, 0.2
    assert symplectic_eigenvalues(np.diag([a, 1 / (4 * a), b, 1 / (4 * b)])) == pytest.approx((0.5, 0.5), abs=1e-12)


@settings(max_examples=100)
@given(seeds, st.floats(0.5, 3.0), st.floats(0.5, 3.0))
def test_construct_then_recover(seed, d1, d2):
    S = random_symplectic(np.random.default_rng(seed), scale=0.4)
    assert is_symplectic(S, tol=1e-9)
    nu = symplectic_eigenvalues(williamson_covariance(S, d1, d2))
    assert nu == pytest.approx((max(d1, d2), min(d1, d2)), rel=1e-9)


def test_uncertainty_equivalence_on_random_covariances():
    rng = np.random.default_rng(11)
    for k in range(1000):
        if k % 2:
            V = williamson_covariance(random_symplectic(rng, 0.5), rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.2))
        else:
            V = 0.3 * random_spd(rng, floor=0.05)
        nu_ok = symplectic_eigenvalues(V)[1] >= 0.5 - 1e-10
        # direct Hermitian-matrix test with the mode-ordered metric
        herm = np.linalg.eigvalsh(V + 0.5j * OMEGA).min() >= -1e-10
        assert uncertainty_ok(V) == nu_ok == herm


def test_sigma_y_form_of_uncertainty_matrix_equals_metric_form():
    V = random_spd(np.random.default_rng(0))
    assert np.array_equal(V - 0.5 * SIGMA_Y, V + 0.5j * OMEGA)


def test_local_symplectic_is_block_diagonal():
    S = random_symplectic(np.random.default_rng(5), local=True)
    assert np.max(np.abs(S[:2, 2:])) == 0 and np.max(np.abs(S[2:, :2])) == 0
    assert np.max(np.abs(S[:2, :2] @ J2 @ S[:2, :2].T - J2)) < 1e-12


def test_non_positive_definite_rejected():
    with pytest.raises(LROscError):
        symplectic_eigenvalues(np.diag([1.0, -1.0, 1.0, 1.0]))
