"""Structural matrices and symplectic utilities for two-mode phase space.

Two orderings of the phase-space vector appear:

* mode ordering ``X = (x1, p1, x2, p2)``, used for every Hamiltonian,
  invariant, covariance and transformation matrix in this package;
* block ordering ``(x1, x2, p1, p2)``, in which the canonical form is ``J4``.

The canonical commutators in mode ordering are ``[X_a, X_b] = i * OMEGA[a, b]``
with ``OMEGA = diag(j2, j2)``, ``j2 = [[0, 1], [-1, 0]]``.  Equivalently
``[X_a, X_b] = -(SIGMA_Y)[a, b]`` since ``OMEGA = i * SIGMA_Y``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag, expm

from .errors import LROscError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z2 = np.array([[1.0, 0.0], [0.0, -1.0]])

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
J4 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])

SIGMA_Y = block_diag(SIGMA_Y2, SIGMA_Y2)
SIGMA_Z = block_diag(SIGMA_Z2, SIGMA_Z2)
S_X = np.block([[np.zeros((2, 2)), SIGMA_X], [SIGMA_X, np.zeros((2, 2))]])

#: real antisymmetric commutator metric in mode ordering, OMEGA = i * SIGMA_Y
OMEGA = block_diag(J2, J2)

#: ``X_block = P_MODE_TO_BLOCK @ X_mode``
P_MODE_TO_BLOCK = np.eye(4)[[0, 2, 1, 3]]

#: partial transpose (momentum mirror of the second mode)
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])

DEFAULT_TOL = 1e-10
INTEGRATED_TOL = 1e-8


def to_block_order(m):
    """Re-express a mode-ordered 4x4 matrix in block ordering."""
    return P_MODE_TO_BLOCK @ m @ P_MODE_TO_BLOCK.T


def to_mode_order(m):
    return P_MODE_TO_BLOCK.T @ m @ P_MODE_TO_BLOCK


def is_hamiltonian_matrix(S, tol=DEFAULT_TOL, metric=J4) -> bool:
    """True iff ``S @ metric + metric @ S.T`` vanishes, i.e. S lies in sp(4, R)."""
    S = np.asarray(S)
    return bool(np.max(np.abs(S @ metric + metric @ S.T)) <= tol)


def is_symplectic(S, tol=DEFAULT_TOL, metric=OMEGA) -> bool:
    S = np.asarray(S)
    return bool(np.max(np.abs(S @ metric @ S.T - metric)) <= tol)


def canonical_commutator(alpha: int, beta: int) -> complex:
    """``[X_alpha, X_beta]`` for 1-based indices into ``(x1, p1, x2, p2)``.

    >>> canonical_commutator(1, 2)
    1j
    """
    for idx in (alpha, beta):
        if not (isinstance(idx, (int, np.integer)) and 1 <= idx <= 4):
            raise IndexError(f"phase-space index must be in 1..4, got {idx!r}")
    return complex(-SIGMA_Y[alpha - 1, beta - 1])


def _check_covariance(V, tol):
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {V.shape}")
    scale = max(1.0, float(np.max(np.abs(V))))
    if np.max(np.abs(V - V.T)) > tol * scale:
        raise ValueError("matrix is not symmetric")
    try:
        np.linalg.cholesky(0.5 * (V + V.T))
    except np.linalg.LinAlgError as exc:
        raise LROscError("matrix is not positive definite") from exc
    return 0.5 * (V + V.T)


def symplectic_eigenvalues(V, tol=DEFAULT_TOL) -> tuple[float, float]:
    """Williamson symplectic eigenvalues ``(nu1, nu2)``, ``nu1 >= nu2``.

    Computed as the positive eigenvalues of the Hermitian matrix
    ``i * V^(1/2) OMEGA V^(1/2)``, which is similar to ``i * OMEGA V``.
    """
    V = _check_covariance(V, tol)
    w, U = np.linalg.eigh(V)
    root = (U * np.sqrt(w)) @ U.T
    ev = np.linalg.eigvalsh(1j * root @ OMEGA @ root)
    nu = np.sort(ev[ev > 0])[::-1]
    if nu.size != 2:
        nu = np.sort(np.abs(ev))[::-1][::2]
    return float(nu[0]), float(nu[1])


def uncertainty_matrix(V):
    """Hermitian ``V + (i/2) OMEGA``; the written form ``V - SIGMA_Y / 2`` is identical."""
    return np.asarray(V, dtype=float) + 0.5j * OMEGA


def uncertainty_ok(V, tol=DEFAULT_TOL) -> bool:
    """Robertson-Schrodinger condition ``V + (i/2) OMEGA >= 0``."""
    return bool(np.min(np.linalg.eigvalsh(uncertainty_matrix(V))) >= -tol)


def random_symplectic(rng, scale=0.5, local=False):
    """Random element of Sp(4, R) (mode ordering), ``expm(OMEGA @ K)`` with K symmetric.

    ``local=True`` restricts to Sp(2, R) x Sp(2, R).
    """
    A = rng.normal(scale=scale, size=(4, 4))
    K = 0.5 * (A + A.T)
    if local:
        K[:2, 2:] = 0.0
        K[2:, :2] = 0.0
    return expm(OMEGA @ K)


def williamson_covariance(S, nu1, nu2):
    """``S D S^T`` with ``D = diag(nu1, nu1, nu2, nu2)``: symplectic spectrum ``(nu1, nu2)``."""
    return S @ np.diag([nu1, nu1, nu2, nu2]) @ S.T
