"""Bipartite Gaussian ground state, its second moments, and separability.

The ground state ``a1 psi = a2 psi = 0`` is ``psi(x) = N0 exp(-x^T Lambda x / 2)``
with ``Lambda = R + i I`` complex symmetric and ``R`` positive definite.
Exact moments (``hbar = 1``)::

    <x x^T>          = R^-1 / 2
    <p p^T>          = (R + I R^-1 I) / 2
    <x_a p_b>        = i delta_ab / 2 - (R^-1 I)_ab / 2

so the covariance blocks are ``V_xx = R^-1/2``, ``V_pp = (R + I R^-1 I)/2`` and
``V_xp = -R^-1 I / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, NormalizationError
from .spectral import SpectralDecomposition, right_from_left
from .symplectic import J2, PARTIAL_TRANSPOSE, symplectic_eigenvalues, uncertainty_ok

MOMENT_NAMES = ("x1x1", "x2x2", "x1x2", "p1p1", "p2p2", "p1p2", "{x1,p1}", "{x2,p2}", "x1p2", "x2p1")


@dataclass(frozen=True)
class GaussianState:
    """``psi(x1, x2) = N0 exp(-(1/2) x^T Lambda x)``.

    Attributes:
        Lambda: complex symmetric 2x2 matrix.
        N0: real positive normalization.
        Lambda1l, Lambda2l: position and momentum parts of the annihilation
            operators, ``a = Lambda1l x + Lambda2l p`` (rows are modes).
        Delta_r: ``det Re(Lambda)``.
    """

    Lambda: np.ndarray
    N0: float
    Lambda1l: np.ndarray | None = None
    Lambda2l: np.ndarray | None = None

    @property
    def R(self):
        return self.Lambda.real

    @property
    def I(self):
        return self.Lambda.imag

    @property
    def Delta_r(self) -> float:
        R = self.R
        return float(R[0, 0] * R[1, 1] - R[0, 1] ** 2)

    def __call__(self, x1, x2):
        L = self.Lambda
        return self.N0 * np.exp(-0.5 * (L[0, 0] * x1**2 + L[1, 1] * x2**2 + 2 * L[0, 1] * x1 * x2))


def gaussian_from_Lambda(Lambda, Lambda1l=None, Lambda2l=None) -> GaussianState:
    """Normalized Gaussian for a complex symmetric ``Lambda``.

    Raises:
        NormalizationError: ``Re(Lambda)`` is not positive definite.
    """
    L = np.asarray(Lambda, dtype=complex)
    L = 0.5 * (L + L.T)
    R = L.real
    if not (R[0, 0] > 0 and np.linalg.det(R) > 0):
        raise NormalizationError(f"Re(Lambda) is not positive definite: {R.tolist()}")
    N0 = (np.linalg.det(R) / np.pi**2) ** 0.25
    return GaussianState(L, float(N0), Lambda1l, Lambda2l)


def lambda_blocks(chi_l1, chi_l2):
    """``(Lambda1l, Lambda2l)``: position and momentum columns of the left eigenvectors."""
    chi = np.vstack([chi_l1, chi_l2])
    return chi[:, [0, 2]], chi[:, [1, 3]]


def lambda_elements(chi_l1, chi_l2):
    """Element-wise ``Lambda`` from the left-eigenvector components (cofactor form)."""
    c1, c2 = np.asarray(chi_l1), np.asarray(chi_l2)
    det2 = c1[1] * c2[3] - c1[3] * c2[1]
    f = 1j / det2
    return np.array(
        [
            [f * (c2[3] * c1[0] - c1[3] * c2[0]), f * (c2[3] * c1[2] - c1[3] * c2[2])],
            [f * (c1[1] * c2[0] - c2[1] * c1[0]), f * (c1[1] * c2[2] - c2[1] * c1[2])],
        ]
    )


def ground_state(dec: SpectralDecomposition, tol=1e-10) -> GaussianState:
    """Ground state annihilated by both ``a_j = chi_lj . X``.

    ``Lambda = i Lambda2l^-1 Lambda1l`` is computed both by a linear solve and
    element-wise; the two must agree.

    Raises:
        DegenerateError: ``Lambda2l`` is singular or the two routes disagree.
        NormalizationError: ``Re(Lambda)`` is not positive definite.
    """
    L1, L2 = lambda_blocks(dec.chi_l1, dec.chi_l2)
    scale = np.max(np.abs(L2)) ** 2
    if abs(np.linalg.det(L2)) <= 1e-13 * scale:
        raise DegenerateError("momentum block of the annihilation operators is singular")
    L = 1j * np.linalg.solve(L2, L1)
    Le = lambda_elements(dec.chi_l1, dec.chi_l2)
    err = np.max(np.abs(L - Le))
    if err > tol * max(1.0, np.max(np.abs(L))):
        raise DegenerateError(f"Lambda routes disagree by {err:.3e}")
    asym = abs(L[0, 1] - L[1, 0])
    if asym > 1e-8 * max(1.0, np.max(np.abs(L))):
        raise DegenerateError(f"Lambda is not symmetric (asymmetry {asym:.3e})")
    return gaussian_from_Lambda(L, L1, L2)


def exact_moments(g: GaussianState) -> dict:
    """All second moments from the closed forms in the module docstring (real values)."""
    R, I = g.R, g.I
    Ri = np.linalg.inv(R)
    xx = 0.5 * Ri
    pp = 0.5 * (R + I @ Ri @ I)
    xp = -0.5 * Ri @ I  # real part of <x_a p_b>
    return {
        "x1x1": xx[0, 0],
        "x2x2": xx[1, 1],
        "x1x2": xx[0, 1],
        "p1p1": pp[0, 0],
        "p2p2": pp[1, 1],
        "p1p2": pp[0, 1],
        "{x1,p1}": 2 * xp[0, 0],
        "{x2,p2}": 2 * xp[1, 1],
        "x1p2": xp[0, 1],
        "x2p1": xp[1, 0],
    }


def first_moments(g: GaussianState):
    """``<x1>, <p1>, <x2>, <p2>``: identically zero for a centred Gaussian."""
    return np.zeros(4)


def moments(g: GaussianState) -> dict:
    return exact_moments(g)


def literal_moments(g: GaussianState) -> dict:
    """An uncorrected set of moment formulas in ``Lambda``, evaluated as written (complex).

    Kept for auditing; several of them are not the expectation values they
    are labelled with.
    """
    L = g.Lambda
    l11, l22, l12 = L[0, 0], L[1, 1], L[0, 1]
    r11, r22, r12 = l11.real, l22.real, l12.real
    i12 = l12.imag
    dr = g.Delta_r
    x11 = r22 / (2 * dr)
    x22 = r11 / (2 * dr)
    x12 = -r12 / (2 * dr)
    return {
        "x1x1": x11,
        "x2x2": x22,
        "x1x2": x12,
        "p1p1": (r22 * abs(l11) ** 2 + r11 * l12**2 - 2j * i12 * r12 * np.conj(l11)) / (2 * dr),
        "p2p2": (r11 * abs(l22) ** 2 + r22 * l12**2 - 2j * i12 * r12 * np.conj(l22)) / (2 * dr),
        "p1p2": l12 - l11 * l12 * x11 - l22 * l12 * x22 - (l11 * l22 + l12**2) * x12,
        "{x1,p1}": 2j * l11 * x11 + 2 * l12 * x12 - 1,
        "{x2,p2}": 2j * l22 * x22 + 2 * l12 * x12 - 1,
        "x1p2": 1j * l12 * x11 + l22 * x12,
        "x2p1": 1j * l12 * x22 + l11 * x12,
    }


def quadrature_moments(g: GaussianState, nodes=64) -> dict:
    """Second moments by tensor Gauss-Hermite quadrature (independent of the closed forms).

    The grid is aligned with the eigenvectors of ``Re(Lambda)`` and scaled by
    its eigenvalues, so the Gaussian weight ``|psi|^2`` is integrated exactly
    against polynomial factors.  Derivatives use ``d psi/dx = -Lambda x psi``.
    """
    if nodes < 64:
        raise ValueError("use at least 64 nodes per axis")
    y, w = np.polynomial.hermite.hermgauss(nodes)
    r, U = np.linalg.eigh(g.R)
    Y1, Y2 = np.meshgrid(y, y, indexing="ij")
    W = np.outer(w, w)
    # x = U diag(1/sqrt(r)) y  ->  x^T R x = |y|^2
    Xs = U @ (np.stack([Y1.ravel(), Y2.ravel()]) / np.sqrt(r)[:, None])
    jac = 1.0 / np.sqrt(r[0] * r[1])
    dens = g.N0**2 * W.ravel() * jac  # |psi|^2 / exp(-|y|^2) times the Jacobian
    x1, x2 = Xs
    grad = -(g.Lambda @ Xs)  # (d psi / dx) / psi
    p = -1j * grad  # (p psi) / psi

    def avg(f):
        return np.sum(dens * f)

    out = {
        "norm": avg(np.ones_like(x1)).real,
        "x1x1": avg(x1 * x1).real,
        "x2x2": avg(x2 * x2).real,
        "x1x2": avg(x1 * x2).real,
        "p1p1": avg(np.conj(p[0]) * p[0]),
        "p2p2": avg(np.conj(p[1]) * p[1]),
        "p1p2": avg(np.conj(p[0]) * p[1]),
        # <{x, p}> = 2 Re <x p>
        "{x1,p1}": 2 * avg(x1 * p[0]).real,
        "{x2,p2}": 2 * avg(x2 * p[1]).real,
        "x1p2": avg(x1 * p[1]),
        "x2p1": avg(x2 * p[0]),
    }
    return out


@dataclass(frozen=True)
class MomentAudit:
    name: str
    formula: complex
    quadrature: complex
    deviation: float
    agrees: bool


def moment_audit(g: GaussianState, tol=1e-8, formulas=None) -> list[MomentAudit]:
    """Per-moment comparison of a formula set (default: :func:`literal_moments`) against quadrature."""
    formulas = literal_moments(g) if formulas is None else formulas
    quad = quadrature_moments(g)
    rows = []
    for name in MOMENT_NAMES:
        a, b = complex(formulas[name]), complex(quad[name])
        dev = abs(a - b)
        rows.append(MomentAudit(name, a, b, dev, dev <= tol * max(1.0, abs(b))))
    return rows


def covariance(g: GaussianState, mom=None):
    """Real symmetric covariance ``V_ab = <{X_a, X_b}>/2`` in ``(x1, p1, x2, p2)`` order."""
    m = exact_moments(g) if mom is None else mom
    V = np.array(
        [
            [m["x1x1"], m["{x1,p1}"] / 2, m["x1x2"], m["x1p2"]],
            [0.0, m["p1p1"], m["x2p1"], m["p1p2"]],
            [0.0, 0.0, m["x2x2"], m["{x2,p2}"] / 2],
            [0.0, 0.0, 0.0, m["p2p2"]],
        ]
    )
    V = np.real(V)
    return np.triu(V) + np.triu(V, 1).T


def number_state_covariance(dec: SpectralDecomposition, n1=0, n2=0):
    """``V = sum_j (2 n_j + 1) Re(chi_rj chi_rj^dagger)`` from the mode vectors."""
    V = np.zeros((4, 4))
    for n, chi in ((n1, dec.chi_l1), (n2, dec.chi_l2)):
        r = right_from_left(chi)
        V += (2 * n + 1) * np.real(np.outer(r, r.conj()))
    return V


@dataclass(frozen=True)
class SimonInvariants:
    """Local symplectic invariants and both forms of the separability inequality.

    ``lhs - rhs >= 0`` is the standard criterion (``rhs = (Delta1 + Delta2)/4``);
    ``rhs_alt = Delta1 + Delta2`` is the alternative normalization kept for audit.
    """

    Delta1: float
    Delta2: float
    Delta12: float
    tau: float
    lhs: float
    rhs: float
    rhs_alt: float
    standard_holds: bool
    alt_holds: bool
    ppt_nu_min: float
    ppt_ok: bool
    separable: bool


def blocks(V):
    V = np.asarray(V, dtype=float)
    return V[:2, :2], V[2:, 2:], V[:2, 2:]


def simon_criterion(V, tol=1e-10) -> SimonInvariants:
    """Simon's separability test for a two-mode covariance matrix.

    ``separable`` requires both the standard inequality and the partial
    transpose uncertainty test ``T V T + (i/2) OMEGA >= 0``.
    """
    V11, V22, V12 = blocks(V)
    d1, d2, d12 = np.linalg.det(V11), np.linalg.det(V22), np.linalg.det(V12)
    tau = float(np.trace(V11 @ J2 @ V12 @ J2 @ V22 @ J2 @ V12.T @ J2))
    lhs = d1 * d2 + (0.25 - abs(d12)) ** 2 - tau
    rhs = (d1 + d2) / 4
    rhs_alt = d1 + d2
    Vt = PARTIAL_TRANSPOSE @ np.asarray(V) @ PARTIAL_TRANSPOSE
    nu_min = symplectic_eigenvalues(Vt)[1]
    std = bool(lhs - rhs >= -tol)
    ppt = bool(uncertainty_ok(Vt, tol))
    return SimonInvariants(
        float(d1),
        float(d2),
        float(d12),
        tau,
        float(lhs),
        float(rhs),
        float(rhs_alt),
        std,
        bool(lhs - rhs_alt >= -tol),
        float(nu_min),
        ppt,
        std and ppt,
    )


def ppt_separable(V, tol=1e-10) -> bool:
    """Oracle: minimum symplectic eigenvalue of the partially transposed covariance ``>= 1/2``."""
    Vt = PARTIAL_TRANSPOSE @ np.asarray(V) @ PARTIAL_TRANSPOSE
    return symplectic_eigenvalues(Vt)[1] >= 0.5 - tol


@dataclass(frozen=True)
class GroundStateInequality:
    lhs: float
    holds: bool
    simon_separable: bool
    agrees: bool


def ground_state_inequality(g: GaussianState, tol=1e-12) -> GroundStateInequality:
    """Evaluate the expanded ground-state polynomial term by term and compare it with :func:`simon_criterion`."""
    L = g.Lambda
    r11, r22, r12 = L[0, 0].real, L[1, 1].real, L[0, 1].real
    i12 = L[0, 1].imag
    dr = g.Delta_r
    val = (
        abs(L[0, 1]) ** 2 * dr**2
        - (r12**4 + 2 * i12**2 * r11 * r22) * dr
        + 2 * i12**2 * (2 * r12**4 - r11 * r22 * i12**2)
        + 3 * r11 * r22 * (r11**2 * r22**2 - 2 * r12**4)
        + 3 * r11**2 * r22**2 * r12**2
    )
    holds = bool(val >= -tol)
    simon = simon_criterion(covariance(g)).separable
    return GroundStateInequality(float(val), holds, simon, holds == simon)


__all__ = [
    "MOMENT_NAMES",
    "GaussianState",
    "GroundStateInequality",
    "MomentAudit",
    "SimonInvariants",
    "blocks",
    "covariance",
    "exact_moments",
    "first_moments",
    "gaussian_from_Lambda",
    "ground_state",
    "ground_state_inequality",
    "lambda_blocks",
    "lambda_elements",
    "moment_audit",
    "moments",
    "number_state_covariance",
    "literal_moments",
    "ppt_separable",
    "quadrature_moments",
    "simon_criterion",
]
