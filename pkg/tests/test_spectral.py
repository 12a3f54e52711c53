import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_coefficients, random_static
from lrosc.errors import ConditioningError, DegenerateError, RegimeError
from lrosc.invariant import InvariantCoefficients, initial_coefficients, to_quadratic_form
from lrosc.quadratic import PhysicalParams
from lrosc.spectral import (
    block_determinants,
    build_Q,
    characteristic_invariants,
    closed_form_components,
    decompose,
    fix_phase,
    ladder_algebra_check,
    left_eigenvectors_closed_form,
    left_eigenvectors_numeric,
    omega_from_coefficients,
    projective_distance,
    right_from_left,
    symplectic_norm,
)
from lrosc.symplectic import J2, OMEGA, SIGMA_X, SIGMA_Y, SIGMA_Z, random_symplectic

seeds = st.integers(0, 2**32 - 1)


def test_omega_examples():
    assert not np.any(omega_from_coefficients(InvariantCoefficients()).matrix)
    O = omega_from_coefficients(InvariantCoefficients(v11=1.0)).matrix
    assert O[0, 1] == 1 and np.count_nonzero(O) == 1


@settings(max_examples=50)
@given(seeds)
def test_omega_is_metric_times_form_with_block_relations(seed):
    c = InvariantCoefficients.from_array(np.random.default_rng(seed).normal(size=10))
    om = omega_from_coefficients(c)
    M = to_quadratic_form(c)
    assert np.array_equal(om.matrix, OMEGA @ M)
    C, B, A = M[:2, :2], M[2:, 2:], M[2:, :2]
    iy = 1j * np.array([[0, -1j], [1j, 0]])  # i sigma_y = J2
    assert np.array_equal(iy.real, J2)
    assert np.allclose(om.A1, J2 @ C) and np.allclose(om.C1, J2 @ A) and np.allclose(om.D1, J2 @ B)
    dC, dB, dA = block_determinants(c)
    det = np.linalg.det
    assert det(om.A1) == pytest.approx(dC, abs=1e-12)
    assert det(om.B1) == pytest.approx(dA, abs=1e-12)
    assert det(om.C1) == pytest.approx(dA, abs=1e-12)
    assert det(om.D1) == pytest.approx(dB, abs=1e-12)
    assert np.trace(om.matrix) == 0


def test_decoupled_frequencies():
    c = InvariantCoefficients(u11=4.0, v11=0.25 * 9, u22=0.5, v22=2.0)
    ci = characteristic_invariants(c)
    assert (ci.sigma1, ci.sigma2) == pytest.approx((3.0, 1.0))


def test_isotropic_zero_field_frequencies():
    c = initial_coefficients(PhysicalParams(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, e=0.0), 0.0)
    ci = characteristic_invariants(c)
    assert (ci.sigma1, ci.sigma2) == pytest.approx((0.5, 0.5))
    ev = np.linalg.eigvals(omega_from_coefficients(c).matrix)
    assert np.allclose(np.sort(ev.imag), [-0.5, -0.5, 0.5, 0.5]) and np.allclose(ev.real, 0)


@settings(max_examples=50)
@given(seeds)
def test_two_routes_for_delta_and_imaginary_spectrum(seed):
    c = random_coefficients(np.random.default_rng(seed))
    ci = characteristic_invariants(c)
    assert ci.Delta == pytest.approx(ci.Delta_poly, rel=1e-10)
    ev = np.linalg.eigvals(omega_from_coefficients(c).matrix)
    assert np.max(np.abs(ev.real)) <= 1e-9 * ci.sigma1
    assert np.sort(np.abs(ev.imag)) == pytest.approx([ci.sigma2, ci.sigma2, ci.sigma1, ci.sigma1], rel=1e-9)


def test_regime_error_carries_details():
    c = InvariantCoefficients.from_form(np.diag([1.0, 1.0, -1.0, 1.0]))
    with pytest.raises(RegimeError) as err:
        characteristic_invariants(c)
    assert "DeltaOmega" in err.value.details


def test_time_independent_simplification_is_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        M = rng.normal(size=(4, 4))
        M = M @ M.T + np.eye(4)
        c = InvariantCoefficients.from_form(M)
        c = InvariantCoefficients(**{**c.to_dict(), "w11": 0.0, "w22": 0.0, "u12": 0.0, "v12": 0.0})
        try:
            ci = characteristic_invariants(c)
        except RegimeError:
            continue
        for s in (ci.sigma1, ci.sigma2):
            _, (s1, q1, s2, q2, s3, s4, q4) = closed_form_components(c, s)
            assert s1 == 0.0 and q2 == 0.0 and s4 == 0.0


def test_generic_components_do_not_vanish():
    c = random_coefficients(np.random.default_rng(4))
    _, (s1, q1, s2, q2, s3, s4, q4) = closed_form_components(c, characteristic_invariants(c).sigma1)
    assert min(abs(s1), abs(q2), abs(s4)) > 1e-6


@settings(max_examples=50)
@given(seeds)
def test_third_component_is_real(seed):
    c = random_coefficients(np.random.default_rng(seed))
    vec, _ = closed_form_components(c, 1.234)
    assert vec[2].imag == 0.0


@settings(max_examples=100)
@given(seeds)
def test_closed_form_parallel_to_numeric(seed):
    c = random_coefficients(np.random.default_rng(seed))
    ci = characteristic_invariants(c)
    n1, n2 = left_eigenvectors_numeric(c, ci.sigma1, ci.sigma2)
    for s, ref in ((ci.sigma1, n1), (ci.sigma2, n2)):
        chi = left_eigenvectors_closed_form(c, s)
        assert projective_distance(chi, ref) <= 1e-8
        assert np.max(np.abs(chi - ref)) <= 1e-7  # same phase convention


@settings(max_examples=100)
@given(seeds)
def test_decomposition_identities(seed):
    dec = decompose(random_coefficients(np.random.default_rng(seed)))
    Q, Qi = dec.Q, dec.Qinv
    assert dec.sigma1 >= dec.sigma2 > 0
    assert np.max(np.abs(Q @ Qi - np.eye(4))) <= 1e-10
    assert np.max(np.abs(Q.conj().T + SIGMA_Z @ Qi @ SIGMA_Y)) <= 1e-10
    target = np.diag([-1j * dec.sigma1, 1j * dec.sigma1, -1j * dec.sigma2, 1j * dec.sigma2])
    assert np.max(np.abs(Qi @ dec.omega @ Q - target)) <= 1e-10 * dec.sigma1
    assert ladder_algebra_check(Qi) <= 1e-10
    # biorthonormality and left/right connection
    for j, l in enumerate((dec.chi_l1, dec.chi_l2)):
        for k, r in enumerate((dec.chi_r1, dec.chi_r2)):
            assert l @ r == pytest.approx(float(j == k), abs=1e-10)
            assert np.conj(l) @ np.conj(r) == pytest.approx(float(j == k), abs=1e-10)
    assert np.allclose(dec.chi_r1, -SIGMA_Y @ dec.chi_l1.conj())
    # phase convention: third component real positive
    assert dec.chi_l1[2].real > 0 and dec.chi_l1[2].imag == 0


def test_invariant_diagonal_in_ladder_basis():
    c = random_coefficients(np.random.default_rng(5))
    dec = decompose(c)
    D = dec.Q.T @ to_quadratic_form(c) @ dec.Q
    expected = np.kron(np.diag([dec.sigma1, dec.sigma2]), SIGMA_X)
    assert np.max(np.abs(D - expected)) <= 1e-10


def test_decoupled_isotropic_gives_textbook_ladders():
    c = initial_coefficients(PhysicalParams(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, e=0.0), 0.0)
    dec = decompose(c)
    a = np.array([1, 1j]) / np.sqrt(2)
    got = sorted([dec.chi_l1, dec.chi_l2], key=lambda v: -abs(v[0]))
    assert np.allclose(got[0], [*a, 0, 0]) and np.allclose(got[1], [0, 0, *a])
    assert ladder_algebra_check(dec.Qinv) <= 1e-15


def test_scaled_row_detected():
    dec = decompose(random_coefficients(np.random.default_rng(6)))
    bad = dec.Qinv.copy()
    bad[0] *= 2
    assert ladder_algebra_check(bad) == pytest.approx(3.0, abs=1e-9)


def test_degenerate_subspace_handled():
    rng = np.random.default_rng(7)
    S = random_symplectic(rng, 0.4)
    Si = np.linalg.inv(S)
    M = 0.8 * Si.T @ Si  # both frequencies equal 0.8
    c = InvariantCoefficients.from_form(M)
    dec = decompose(c, method="closed")
    assert dec.method == "numeric"
    assert dec.sigma1 == pytest.approx(0.8) and dec.sigma2 == pytest.approx(0.8)
    assert ladder_algebra_check(dec.Qinv) <= 1e-10
    assert dec.residuals["diagonal"] <= 1e-10
    with pytest.raises(DegenerateError):
        left_eigenvectors_closed_form(InvariantCoefficients(v11=1.0, u11=0.0, u22=1.0, v22=1.0), 1.0)


def test_conditioning_bound():
    c = random_coefficients(np.random.default_rng(8))
    dec = decompose(c)
    with pytest.raises(ConditioningError):
        build_Q(dec.chi_l1, dec.chi_l2, cond_bound=1.0)


def test_normalization_helpers():
    v = np.array([1 + 1j, 2j, 3 - 1j, 0.5])
    assert fix_phase(v)[2].imag == 0 and fix_phase(v)[2].real > 0
    chi = decompose(random_coefficients(np.random.default_rng(9))).chi_l1
    assert symplectic_norm(chi) == pytest.approx(1.0)
    assert chi @ right_from_left(chi) == pytest.approx(1.0)


def test_decomposition_export():
    dec = decompose(random_coefficients(np.random.default_rng(10)), method="closed")
    doc = json.loads(dec.to_json())
    assert doc["method"] == "closed" and len(doc["Q"]) == 16
    assert doc["sigma1"] == dec.sigma1


def test_hamiltonian_invariant_with_field():
    p = random_static(np.random.default_rng(11))
    dec = decompose(initial_coefficients(p, 0.0), method="closed")
    assert dec.residuals["ladder"] <= 1e-10
