import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_coefficients, random_dynamic, random_static
from lrosc import fock
from lrosc.errors import DomainError
from lrosc.invariant import (
    NAMES,
    OPERATOR_NAMES,
    SIGMA_PRIME,
    InvariantCoefficients,
    ansatz_operator_form,
    classical_propagator,
    coefficient_matrices,
    commutator_table,
    conjugated_invariant,
    initial_coefficients,
    integrate,
    invariance_residual,
    matrix_bracket_rhs,
    quadratic_bracket,
    rhs,
    to_quadratic_form,
)
from lrosc.quadratic import PhysicalParams
from lrosc.schedule import Tabulated
from lrosc.symplectic import J4, OMEGA, S_X, SIGMA_X, is_hamiltonian_matrix

seeds = st.integers(0, 2**32 - 1)


def test_single_slot_forms():
    M = to_quadratic_form(InvariantCoefficients(u11=1.0))
    assert M[0, 0] == 1 and np.count_nonzero(M) == 1
    M = to_quadratic_form(InvariantCoefficients(w11=1.0))
    assert M[0, 1] == M[1, 0] == 1 and np.count_nonzero(M) == 2


@settings(max_examples=50)
@given(seeds)
def test_form_round_trip_and_views(seed):
    c = random_coefficients(np.random.default_rng(seed))
    M = to_quadratic_form(c)
    assert np.array_equal(M, M.T)
    assert InvariantCoefficients.from_form(M) == c
    assert InvariantCoefficients.from_views(c.w, c.u, c.v) == c
    assert InvariantCoefficients.from_dict(c.to_dict()) == c


def test_block_layout():
    c = InvariantCoefficients(*range(1, 11))
    M = to_quadratic_form(c)
    assert np.array_equal(M[:2, :2], [[c.u11, c.w11], [c.w11, c.v11]])
    assert np.array_equal(M[2:, 2:], [[c.u22, c.w22], [c.w22, c.v22]])
    assert np.array_equal(M[2:, :2], [[c.u12, c.w21], [c.w12, c.v12]])


def test_ansatz_expansion_of_hamiltonian_form():
    """sum_name c_name O_name is X^T M X, i.e. twice the invariant's (1/2) X^T M X."""
    p = random_static(np.random.default_rng(1))
    c = initial_coefficients(p, 0.0)
    total = sum(getattr(c, n) * ansatz_operator_form(n) for n in NAMES)
    assert np.allclose(total, 2 * to_quadratic_form(c))
    assert np.allclose(to_quadratic_form(c), p.hamiltonian(0.0))


def test_sigma_prime_from_one_monomial_pair():
    # (1/i)[x1^2, p1^2] = 2 {x1, p1}: forms F_a = 2 e11, F_b = 2 e22
    Fa = ansatz_operator_form("u11")
    Fb = ansatz_operator_form("v11")
    assert np.allclose(quadratic_bracket(Fa, Fb), 2 * ansatz_operator_form("w11"))
    assert np.array_equal(SIGMA_PRIME, 2 * OMEGA)


def test_zero_field_matrices():
    m = coefficient_matrices(PhysicalParams(1.0, 1.0, 1.0, 1.0, 0.5, 0.5, e=0.0), 0.0)
    # every entry carrying the coupling vanishes; nu inherits them from mu
    assert not np.any(m.mu[1:3])
    assert not np.any([m.alpha[0, 3], m.alpha[1, 0], m.alpha[2, 3], m.alpha[3, 0]])
    assert not np.any([m.beta[0, 1], m.beta[0, 3], m.beta[3, 0], m.beta[3, 2]])
    assert np.array_equal(m.nu, [[1.0, 0.0, 0.0, -1.0], [1.0, 0.0, 0.0, -1.0]])
    assert set(np.unique(m.alpha)) <= {-1.0, 0.0, 1.0}


def test_hand_evaluated_matrices():
    m = coefficient_matrices(PhysicalParams(1.0, 2.0, 1.0, 3.0, 1.0, 2.0), 0.0)
    # 1/mu = (1, 1/2), coupling 2 nu = (1, 1), alpha = (3, 4)
    assert np.array_equal(m.mu, [[-1.0, -0.5], [-1.0, -1.0], [1.0, 1.0], [4.0, 3.0]])
    assert np.array_equal(m.alpha, [[0, 0, 3, 1], [1, 0, -1, 0], [0, 4, 0, -1], [-1, -0.5, 0, 0]])
    assert np.array_equal(m.beta, [[0, -1, 0, 1], [0, 0, -0.5, 4], [-1, 3, 0, 0], [-1, 0, 1, 0]])


@settings(max_examples=30)
@given(seeds)
def test_nu_defining_relation(seed):
    m = coefficient_matrices(random_static(np.random.default_rng(seed)), 0.0)
    assert np.array_equal(m.nu, SIGMA_X @ m.mu.T @ S_X)
    assert m.mu.shape == (4, 2) and m.nu.shape == (2, 4)


def test_rhs_zero_is_fixed_point():
    p = random_dynamic(np.random.default_rng(0))
    assert not np.any(rhs(InvariantCoefficients(), p, 0.3).as_array())


def test_static_hamiltonian_is_invariant():
    p = random_static(np.random.default_rng(2))
    c = initial_coefficients(p, 0.0)
    assert invariance_residual(c, InvariantCoefficients(), p, 0.0) <= 1e-15
    assert np.max(np.abs(rhs(c, p, 0.0).as_array())) <= 1e-15


def test_component_and_matrix_routes_agree():
    rng = np.random.default_rng(7)
    for _ in range(100):
        p = random_dynamic(rng)
        c = InvariantCoefficients.from_array(rng.normal(size=10))
        t = rng.uniform(0, 10)
        a = rhs(c, p, t).as_array()
        b = matrix_bracket_rhs(c, p, t).as_array()
        assert np.max(np.abs(a - b)) <= 1e-12


def test_residual_sensitivity():
    rng = np.random.default_rng(4)
    p = random_dynamic(rng)
    c = random_coefficients(rng)
    cdot = rhs(c, p, 1.0).as_array()
    cdot[NAMES.index("u11")] += 0.1
    r = invariance_residual(c, InvariantCoefficients.from_array(cdot), p, 1.0)
    assert r == pytest.approx(0.1, abs=1e-12)


def test_commutator_table_matches_matrix_bracket():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_dynamic(rng)
        t = rng.uniform(0, 5)
        table = commutator_table(p, t)
        F_H = 2 * p.hamiltonian(t)
        for name in OPERATOR_NAMES:
            ref = InvariantCoefficients.from_form(quadratic_bracket(F_H, ansatz_operator_form(name)) / 2)
            assert np.max(np.abs(table[name].as_array() - ref.as_array())) <= 1e-13


def test_fock_bracket_consistency():
    rng = np.random.default_rng(6)
    p = random_static(rng)
    c = random_coefficients(rng)
    F_I, F_H = to_quadratic_form(c), 2 * p.hamiltonian(0.0)
    fit = fock.commutator_check(F_I, F_H, cutoff=16)
    assert fit.residual <= 1e-10
    assert np.max(np.abs(fit.form - quadratic_bracket(F_I, F_H))) <= 1e-10


def test_static_trajectory_is_constant():
    p = random_static(np.random.default_rng(8))
    c0 = initial_coefficients(p, 0.0)
    tr = integrate(c0, p, 0.0, 5.0, samples=11)
    assert np.max(np.abs(tr.coeffs - c0.as_array())) <= 1e-12


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_trajectory_invariance_and_hamiltonian_structure(seed):
    rng = np.random.default_rng(seed)
    p = random_dynamic(rng)
    tr = integrate(random_coefficients(rng), p, 0.0, 4.0, samples=21)
    assert np.max(tr.residuals) <= 1e-8
    for k in range(len(tr)):
        assert is_hamiltonian_matrix(J4 @ to_quadratic_form(tr[k]))


def test_trajectory_matches_classical_flow():
    rng = np.random.default_rng(9)
    p = random_dynamic(rng)
    c0 = random_coefficients(rng)
    t = np.linspace(0, 6, 13)
    tr = integrate(c0, p, 0.0, 6.0, t_eval=t)
    S = classical_propagator(p, 0.0, 6.0, t_eval=t)
    M0 = to_quadratic_form(c0)
    for k in range(len(t)):
        ref = conjugated_invariant(M0, S[k])
        assert np.max(np.abs(tr.form_at(t[k]) - ref)) <= 1e-8 * max(1, np.max(np.abs(ref)))


def test_linearity():
    rng = np.random.default_rng(10)
    p = random_dynamic(rng)
    c1, c2 = random_coefficients(rng), random_coefficients(rng)
    a, b = 0.7, -1.3
    T = integrate(a * c1 + b * c2, p, 0, 3, samples=5).coeffs
    T1 = integrate(c1, p, 0, 3, samples=5).coeffs
    T2 = integrate(c2, p, 0, 3, samples=5).coeffs
    assert np.max(np.abs(T - (a * T1 + b * T2))) <= 1e-8 * np.max(np.abs(T))


def test_time_reversal():
    rng = np.random.default_rng(12)
    p = random_dynamic(rng)
    c0 = random_coefficients(rng)
    fwd = integrate(c0, p, 0.0, 5.0, samples=2)
    back = integrate(fwd[1], p, 5.0, 0.0, samples=2)
    assert np.max(np.abs(back.coeffs[-1] - c0.as_array())) <= 1e-8


def test_domain_exit():
    tab = Tabulated((0.0, 1.0, 2.0), (1.0, 1.1, 1.2))
    p = PhysicalParams(tab, 1.0, 1.0, 1.0, 0.1, 0.1)
    with pytest.raises(DomainError):
        integrate(None, p, 0.0, 3.0)


def test_trajectory_exports():
    p = random_dynamic(np.random.default_rng(13))
    tr = integrate(None, p, 0.0, 1.0, samples=3)
    text = tr.to_csv(header_lines=["hello"])
    lines = text.split("\n")
    assert lines[0] == "# hello" and lines[1].split(",") == ["t", *NAMES, "residual"]
    assert "\r" not in text
    row = [float(x) for x in lines[2].split(",")]
    assert row[1:11] == list(tr.coeffs[0])  # 17 significant digits round-trip exactly
    import json

    doc = json.loads(tr.to_json())
    assert len(doc["rows"]) == 3 and doc["columns"][-1] == "residual"
    assert isinstance(io.StringIO(text), io.StringIO)
