"""Truncated two-mode Fock-space engine used as a brute-force oracle.

Each mode keeps occupations ``0..N-1``.  Quadratic operators are assembled
on ``N + 2`` levels and then truncated, so every matrix element of a
quadratic operator inside the kept space is exact.  Products of truncated
operators are only exact away from the cutoff; checks restrict themselves
to the *trusted* block in which both occupations are ``<= N - 1 - margin``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import TruncationError
from .invariant import NAMES, InvariantCoefficients, to_quadratic_form

DEFAULT_CUTOFF = 24
ESCALATED_CUTOFF = 32


def _single_mode(levels):
    a = sp.diags(np.sqrt(np.arange(1, levels)), 1, format="csr", dtype=complex)
    x = (a + a.T) / np.sqrt(2)
    p = (a - a.T) / (1j * np.sqrt(2))
    return x, p


def _quadratures(levels):
    x, p = _single_mode(levels)
    eye = sp.identity(levels, format="csr", dtype=complex)
    return [sp.kron(x, eye, "csr"), sp.kron(p, eye, "csr"), sp.kron(eye, x, "csr"), sp.kron(eye, p, "csr")]


def _keep_indices(levels, cutoff):
    n1, n2 = np.divmod(np.arange(levels * levels), levels)
    return np.flatnonzero((n1 < cutoff) & (n2 < cutoff))


def occupations(cutoff):
    """``(n1, n2)`` arrays for the flattened basis index ``n1 * N + n2``."""
    return np.divmod(np.arange(cutoff * cutoff), cutoff)


def trusted_indices(cutoff, margin=4):
    n1, n2 = occupations(cutoff)
    return np.flatnonzero((n1 <= cutoff - 1 - margin) & (n2 <= cutoff - 1 - margin))


def basis_index(n1, n2, cutoff):
    return n1 * cutoff + n2


@dataclass
class TruncatedOperator:
    """Sparse matrix on the ``N^2``-dimensional two-mode basis."""

    matrix: sp.csr_matrix
    cutoff: int

    @property
    def dense(self):
        return self.matrix.toarray()

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            return TruncatedOperator((self.matrix @ other.matrix).tocsr(), self.cutoff)
        return self.matrix @ other

    def commutator(self, other):
        return TruncatedOperator((self.matrix @ other.matrix - other.matrix @ self.matrix).tocsr(), self.cutoff)

    def eigvalsh(self):
        return np.linalg.eigvalsh(self.dense)


def represent_quadratic(F, cutoff=DEFAULT_CUTOFF) -> TruncatedOperator:
    """``(1/2) X^T F X`` with exact matrix elements on the kept levels.

    Since ``F`` is symmetric the sum ``sum F_ab X_a X_b`` is already the
    symmetrized (anticommutator) ordering.
    """
    if cutoff < 4:
        raise ValueError("cutoff must be at least 4")
    F = np.asarray(F, dtype=float)
    levels = cutoff + 2
    X = _quadratures(levels)
    op = sp.csr_matrix((levels * levels, levels * levels), dtype=complex)
    for a in range(4):
        for b in range(4):
            if F[a, b] != 0.0:
                op = op + 0.5 * F[a, b] * (X[a] @ X[b])
    keep = _keep_indices(levels, cutoff)
    return TruncatedOperator(op[keep][:, keep].tocsr(), cutoff)


def represent_linear(v, cutoff=DEFAULT_CUTOFF) -> TruncatedOperator:
    """``sum_a v_a X_a`` for a (possibly complex) 4-vector ``v``."""
    X = _quadratures(cutoff)
    op = sum(complex(v[a]) * X[a] for a in range(4))
    return TruncatedOperator(sp.csr_matrix(op), cutoff)


def ladder_operators(chi_l1, chi_l2, cutoff=DEFAULT_CUTOFF):
    """``a_j = chi_lj . X``."""
    return represent_linear(chi_l1, cutoff), represent_linear(chi_l2, cutoff)


@dataclass(frozen=True)
class CommutatorFit:
    """``(1/i)[A, B] ~ (1/2) X^T form X + constant`` on the trusted block.

    Attributes:
        form: fitted symmetric 4x4 matrix.
        constant: fitted multiple of the identity.
        residual: max abs deviation of the commutator from the fit.
    """

    form: np.ndarray
    constant: float
    residual: float

    @property
    def coefficients(self) -> InvariantCoefficients:
        """Fit expressed in the ansatz basis (coefficients of ``x1^2``, ``{x1,p1}``, ...)."""
        return InvariantCoefficients.from_form(self.form / 2)


@lru_cache(maxsize=8)
def _fit_basis(cutoff, margin):
    idx = trusted_indices(cutoff, margin)
    cols = []
    for name in NAMES:
        F = 2.0 * to_quadratic_form(InvariantCoefficients(**{name: 1.0}))
        cols.append(represent_quadratic(F, cutoff).matrix[idx][:, idx].toarray().ravel())
    cols.append(np.eye(len(idx)).ravel())
    return idx, np.array(cols).T


def commutator_check(Fa, Fb, cutoff=DEFAULT_CUTOFF, margin=4, threshold=None) -> CommutatorFit:
    """Fit ``(1/i)[A, B]`` back onto quadratic operators plus the identity.

    Args:
        Fa, Fb: forms of ``A = (1/2) X^T Fa X`` and ``B``.
        cutoff: levels per mode.
        margin: occupations within ``margin`` of the cutoff are excluded.
        threshold: if given, raise when the fit residual exceeds it.

    Raises:
        TruncationError: the commutator is not quadratic within ``threshold``.
    """
    A = represent_quadratic(Fa, cutoff)
    B = represent_quadratic(Fb, cutoff)
    C = (A.commutator(B).matrix / 1j).tocsr()
    idx, basis = _fit_basis(cutoff, margin)
    target = C[idx][:, idx].toarray().ravel()
    sol, *_ = np.linalg.lstsq(basis, target, rcond=None)
    resid = float(np.max(np.abs(basis @ sol - target))) if target.size else 0.0
    if threshold is not None and resid > threshold:
        raise TruncationError(f"commutator is not quadratic: fit residual {resid:.3e}")
    coeffs = InvariantCoefficients.from_array(sol[:10].real)
    return CommutatorFit(2.0 * to_quadratic_form(coeffs), float(sol[10].real), resid)


def hermite_functions(nmax, x):
    """Normalized oscillator eigenfunctions ``phi_0..phi_{nmax-1}`` on ``x`` (stable recursion)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax, x.size))
    out[0] = np.pi**-0.25 * np.exp(-(x**2) / 2)
    if nmax > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(2, nmax):
        out[n] = np.sqrt(2.0 / n) * x * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def fock_coefficients(psi, cutoff=DEFAULT_CUTOFF, extent=12.0, points=401):
    """Expansion coefficients ``<n1, n2 | psi>`` of a wavefunction ``psi(x1, x2)``.

    The overlap integrals use the trapezoid rule on a uniform grid, which is
    spectrally accurate for the rapidly decaying integrands involved.
    """
    x = np.linspace(-extent, extent, points)
    h = x[1] - x[0]
    phi = hermite_functions(cutoff, x)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    vals = psi(X1, X2)
    coeffs = phi @ vals @ phi.T * h * h
    return coeffs.ravel()


def edge_weight(psi, cutoff, margin=4):
    """Probability carried by basis states within ``margin`` of the cutoff."""
    n1, n2 = occupations(cutoff)
    edge = (n1 > cutoff - 1 - margin) | (n2 > cutoff - 1 - margin)
    return float(np.sum(np.abs(psi[edge]) ** 2))


def annihilation_residual(chi_l, psi, cutoff=None, margin=1):
    """``|| a psi ||`` with ``a = chi_l . X``, measured on rows with occupations ``<= N - 1 - margin``.

    The last kept level of a truncated linear operator lacks its coupling to
    the discarded level ``N``; ``margin=1`` excludes exactly those rows.
    """
    psi = np.asarray(psi)
    cutoff = cutoff or int(round(np.sqrt(psi.size)))
    r = represent_linear(chi_l, cutoff) @ psi
    return float(np.linalg.norm(r[trusted_indices(cutoff, margin)]))


def hamiltonian_operator(Hm, cutoff=DEFAULT_CUTOFF):
    """``H = X^T Hm X`` (form ``2 Hm``)."""
    return represent_quadratic(2.0 * np.asarray(Hm), cutoff)


def propagate(hamiltonian, psi0, t0, t1, steps, cutoff=None, leak_tol=1e-6, margin=4):
    """Time-ordered midpoint-exponential propagation under ``H(t) = X^T Hm(t) X``.

    Args:
        hamiltonian: callable ``t -> Hm(t)`` (4x4) or a parameter model.
        psi0: initial state on the ``cutoff^2`` basis.
        t0, t1: time interval.
        steps: number of midpoint steps.
        cutoff: levels per mode (inferred from ``psi0`` if omitted).

    Raises:
        TruncationError: weight near the cutoff exceeds ``leak_tol``.
    """
    H_of_t = hamiltonian.hamiltonian if hasattr(hamiltonian, "hamiltonian") else hamiltonian
    psi = np.asarray(psi0, dtype=complex)
    if cutoff is None:
        cutoff = int(round(np.sqrt(psi.size)))
    dt = (t1 - t0) / steps
    for k in range(steps):
        tm = t0 + (k + 0.5) * dt
        H = hamiltonian_operator(H_of_t(tm), cutoff).matrix
        psi = expm_multiply(-1j * dt * H, psi)
    leak = edge_weight(psi, cutoff, margin)
    if leak > leak_tol:
        raise TruncationError(f"state leaked to the cutoff: edge weight {leak:.3e} > {leak_tol:.1e}")
    return psi


def fock_ground_state(F, cutoff=DEFAULT_CUTOFF):
    """Lowest eigenpair of ``(1/2) X^T F X`` on the truncated basis."""
    w, v = np.linalg.eigh(represent_quadratic(F, cutoff).dense)
    return float(w[0]), v[:, 0]


def convergence_gate(quantity, tol, cutoff=DEFAULT_CUTOFF, escalate_to=ESCALATED_CUTOFF):
    """Evaluate ``quantity(N)`` and confirm it is stable under doubling the cutoff.

    The result is accepted when ``|q(N) - q(2N)| < 10 * tol``; on failure the
    cutoff escalates once to ``escalate_to``.

    Returns:
        ``(value, cutoff_used, change)``.

    Raises:
        TruncationError: the quantity has not converged at the escalated cutoff.
    """
    for n in dict.fromkeys((cutoff, escalate_to)):
        v = np.asarray(quantity(n))
        v2 = np.asarray(quantity(2 * n))
        change = float(np.max(np.abs(v - v2)))
        if change < 10 * tol:
            return v, n, change
    raise TruncationError(f"no convergence at cutoff {escalate_to}: change {change:.3e}")


__all__ = [
    "DEFAULT_CUTOFF",
    "CommutatorFit",
    "annihilation_residual",
    "TruncatedOperator",
    "basis_index",
    "commutator_check",
    "convergence_gate",
    "edge_weight",
    "fock_coefficients",
    "fock_ground_state",
    "hamiltonian_operator",
    "hermite_functions",
    "ladder_operators",
    "occupations",
    "propagate",
    "represent_linear",
    "represent_quadratic",
    "trusted_indices",
]
