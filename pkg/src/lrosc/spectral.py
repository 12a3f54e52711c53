"""Symplectic diagonalization of the invariant.

``Omega = OMEGA @ M`` (``M`` the invariant's form) generates the linear
action ``(1/2)[i I, X] = Omega X``.  Its spectrum is ``{-i s1, i s1, -i s2, i s2}``
and the left eigenvectors ``chi_lj Omega = -i s_j chi_lj`` define the
annihilation operators ``a_j = chi_lj . X``.

Left eigenvectors are normalized by ``chi_lj . chi_rj = 1`` with
``chi_rj = -SIGMA_Y chi_lj^dagger`` and the residual U(1) freedom is fixed by
making the third component real and positive (the first, if the third
vanishes).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, DegenerateError, NormalizationError, RegimeError
from .invariant import InvariantCoefficients, to_quadratic_form
from .symplectic import SIGMA_Y, SIGMA_Z

DEGENERACY_TOL = 1e-7


@dataclass(frozen=True)
class OmegaMatrix:
    """``Omega`` with its 2x2 blocks ``[[A1, B1], [C1, D1]]``."""

    matrix: np.ndarray

    @property
    def A1(self):
        return self.matrix[:2, :2]

    @property
    def B1(self):
        return self.matrix[:2, 2:]

    @property
    def C1(self):
        return self.matrix[2:, :2]

    @property
    def D1(self):
        return self.matrix[2:, 2:]

    def normality_defect(self) -> float:
        """``max |[Omega^T, Omega]|``; generically nonzero."""
        O = self.matrix
        return float(np.max(np.abs(O.T @ O - O @ O.T)))


def omega_from_coefficients(c: InvariantCoefficients) -> OmegaMatrix:
    """Rows ``(w11, v11, w21, v12)``, ``(-u11, -w11, -u12, -w12)``,
    ``(w12, v12, w22, v22)``, ``(-u12, -w21, -u22, -w22)``."""
    return OmegaMatrix(
        np.array(
            [
                [c.w11, c.v11, c.w21, c.v12],
                [-c.u11, -c.w11, -c.u12, -c.w12],
                [c.w12, c.v12, c.w22, c.v22],
                [-c.u12, -c.w21, -c.u22, -c.w22],
            ]
        )
    )


def _coefficients_of(c):
    if isinstance(c, InvariantCoefficients):
        return c
    return InvariantCoefficients.from_form(c)


def block_determinants(c: InvariantCoefficients):
    """``(Delta_C, Delta_B, Delta_A)`` of the invariant's blocks."""
    return (
        c.u11 * c.v11 - c.w11**2,
        c.u22 * c.v22 - c.w22**2,
        c.u12 * c.v12 - c.w21 * c.w12,
    )


@dataclass(frozen=True)
class CharacteristicInvariants:
    Delta: float
    DeltaOmega: float
    sigma1: float
    sigma2: float
    discriminant: float
    Delta_poly: float


def characteristic_invariants(c, tol=1e-10) -> CharacteristicInvariants:
    """Coefficients of ``p(l) = l^4 + Delta l^2 + Delta_Omega`` and its roots ``+-i sigma_j``.

    ``Delta`` is computed from the block determinants and, independently,
    from the characteristic polynomial of ``Omega``; both must agree.

    Raises:
        RegimeError: the roots are not purely imaginary (``sigma_j^2 < 0`` or
            a negative discriminant); the offending values are attached.
    """
    c = _coefficients_of(c)
    dC, dB, dA = block_determinants(c)
    Delta = dC + dB + 2 * dA
    M = to_quadratic_form(c)
    DeltaOmega = float(np.linalg.det(M))
    O = omega_from_coefficients(c).matrix
    poly = np.poly(O).real
    scale = max(1.0, abs(Delta), float(np.max(np.abs(M))) ** 2)
    if abs(poly[2] - Delta) > tol * scale * 10 or abs(poly[1]) > tol * scale * 10:
        raise RegimeError(
            "characteristic polynomial disagrees with block determinants",
            Delta=Delta,
            Delta_poly=float(poly[2]),
        )
    disc = Delta**2 - 4 * DeltaOmega
    dscale = max(1.0, Delta**2)
    if disc < -tol * dscale:
        raise RegimeError("complex characteristic frequencies", Delta=Delta, DeltaOmega=DeltaOmega, discriminant=disc)
    root = np.sqrt(max(disc, 0.0))
    s1sq = 0.5 * (Delta + root)
    s2sq = 0.5 * (Delta - root)
    if s2sq <= 0 or s1sq <= 0:
        raise RegimeError(
            "sigma_j^2 not positive: invariant is not positive definite",
            Delta=Delta,
            DeltaOmega=DeltaOmega,
            discriminant=disc,
            sigma1_sq=s1sq,
            sigma2_sq=s2sq,
        )
    return CharacteristicInvariants(Delta, DeltaOmega, float(np.sqrt(s1sq)), float(np.sqrt(s2sq)), disc, float(poly[2]))


def closed_form_components(c: InvariantCoefficients, sigma: float, literal=False):
    """Unnormalized left eigenvector ``(s1 + i q1, s2 + i q2, s3, s4 + i q4)`` for ``-i sigma``.

    With ``literal=True`` the second component and the ``sigma``-power term of
    the fourth use an uncorrected variant (a different second component,
    ``sigma_1`` in place of ``sigma_j``) kept for auditing.
    """
    u11, u22, v11, v22, w11, w22, u12, v12, w21, w12 = c.as_array()
    s = sigma
    s1 = u11**2 * (v12 * u22 - w21 * w22) + u11 * u12 * (s**2 + w12 * w21 + w11 * w22 - v12 * u12) - u11 * u22 * w11 * w12
    q1 = s * u11 * (w12 * u22 - u12 * w22 - u11 * w21 + u12 * w11)
    if literal:
        s2 = (
            s**2 * (u11 * w21 + u12 * w22 - u22 * w12)
            + w11**2 * (u12 * w22 - u22 * w12)
            + w21 * w11 * (u12 * w12 - u11 * w22)
            + w11 * v12 * (u11 * u22 - u12**2)
        )
        q2 = s**3 * u12 + s * (u12 * (w12 * w21 - v12 * u12 + w11**2) + u11 * (v12 * u22 - w21 * w22 - w11 * w21))
    else:
        s2 = u11 * (
            s**2 * w21 + u12 * (v11 * w22 - v12 * w21) + u22 * (v12 * w11 - v11 * w12) + w21 * (w12 * w21 - w11 * w22)
        )
        q2 = s * u11 * (u12 * v11 + u22 * v12 - w11 * w21 - w21 * w22)
    s3 = u11 * u22 * (s**2 + w11**2 - u11 * v11) + u11 * u12 * (v11 * u12 - w11 * w21) + u11 * w21 * (u11 * w21 - u12 * w11)
    s4 = u11 * w22 * s**2 + u11**2 * (v12 * w21 - v11 * w22) + u12 * u11 * (v11 * w12 - v12 * w11) + u11 * w11 * (w11 * w22 - w12 * w21)
    q4 = u11 * s**3 + u11 * s * (w11**2 - u11 * v11 + w21 * w12 - v12 * u12)
    return np.array([s1 + 1j * q1, s2 + 1j * q2, s3 + 0j, s4 + 1j * q4]), (s1, q1, s2, q2, s3, s4, q4)


def symplectic_norm(chi) -> float:
    """``chi . (-SIGMA_Y chi^dagger)``, real for any complex 4-vector."""
    chi = np.asarray(chi)
    return float(np.real(-chi @ SIGMA_Y @ chi.conj()))


def fix_phase(chi, tol=1e-12):
    """Rotate so the third component (else the first non-negligible one) is real and positive."""
    chi = np.asarray(chi, dtype=complex)
    scale = np.max(np.abs(chi))
    order = [2, 0, 1, 3]
    for k in order:
        if abs(chi[k]) > tol * scale:
            out = chi * (abs(chi[k]) / chi[k])
            out[k] = abs(chi[k])
            return out
    return chi


def normalize_left(chi):
    """Scale ``chi`` so ``chi . chi_r = 1`` and fix its phase.

    Raises:
        NormalizationError: the symplectic norm is not positive (wrong-sign eigenvector).
    """
    h = symplectic_norm(chi)
    scale = float(np.max(np.abs(chi))) ** 2
    if not h > 1e-14 * max(scale, 1e-300):
        raise NormalizationError(f"symplectic norm {h:.3e} is not positive")
    return fix_phase(np.asarray(chi) / np.sqrt(h))


def left_eigenvectors_closed_form(c: InvariantCoefficients, sigma: float, j: int | None = None, literal=False):
    """Normalized left eigenvector from the closed-form components.

    Args:
        c: invariant coefficients.
        sigma: the characteristic frequency ``sigma_j``.
        j: mode label, informational only.
        literal: use the uncorrected component variant (audit mode).

    Raises:
        DegenerateError: the unnormalized vector vanishes numerically.
    """
    raw, _ = closed_form_components(c, sigma, literal=literal)
    M = to_quadratic_form(c)
    ref = (max(1.0, float(np.max(np.abs(M)))) ** 2) * max(1.0, abs(sigma)) ** 2 * max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(raw)) <= 1e-9 * ref:
        raise DegenerateError(f"closed-form eigenvector vanishes for mode {j}")
    try:
        return normalize_left(raw)
    except NormalizationError as exc:
        raise DegenerateError(f"closed-form eigenvector for mode {j} is not normalizable: {exc}") from exc


def _null_space(A, dim):
    _, _, vh = np.linalg.svd(A)
    return vh[-dim:].conj()


def left_eigenvectors_numeric(c, sigma1, sigma2, degeneracy_tol=DEGENERACY_TOL):
    """Left eigenvectors from the SVD null space of ``Omega^T + i sigma I``.

    For ``sigma1 ~ sigma2`` the two-dimensional null space is split
    deterministically (mode-1 vector chosen with minimal mode-2 weight) and
    orthonormalized with respect to the symplectic form.
    """
    c = _coefficients_of(c)
    O = omega_from_coefficients(c).matrix
    if abs(sigma1 - sigma2) > degeneracy_tol * max(1.0, sigma1):
        out = []
        for s in (sigma1, sigma2):
            chi = _null_space((O + 1j * s * np.eye(4)).T, 1)[0]
            out.append(normalize_left(chi))
        return out[0], out[1]
    s = 0.5 * (sigma1 + sigma2)
    basis = _null_space((O + 1j * s * np.eye(4)).T, 2)
    # pick the combination with the least weight on mode 2
    _, _, vh = np.linalg.svd(basis[:, 2:].T)
    a = vh[-1].conj() @ basis
    chi1 = normalize_left(a)
    G = -basis @ SIGMA_Y @ basis.conj().T
    # complement: b in span(basis) with h(chi1, b) = 0
    coeff = -chi1 @ SIGMA_Y @ basis.conj().T
    perp = np.array([coeff[1].conj(), -coeff[0].conj()])
    b = perp @ basis
    if symplectic_norm(b) <= 0:
        raise NormalizationError(f"degenerate subspace has indefinite symplectic form: {np.linalg.eigvalsh(G)}")
    chi2 = normalize_left(b)
    return chi1, chi2


def right_from_left(chi_l):
    """``chi_r = -SIGMA_Y chi_l^dagger`` (a column vector)."""
    return -SIGMA_Y @ np.conj(chi_l)


def build_Q(chi_l1, chi_l2, cond_bound=1e8):
    """``Q = (chi_r1, chi_r1*, chi_r2, chi_r2*)`` and ``Q^-1`` with rows ``(chi_l1, chi_l1*, chi_l2, chi_l2*)``.

    Raises:
        ConditioningError: ``||Q|| ||Q^-1||`` exceeds ``cond_bound``, or ``Q Q^-1`` is not the identity.
    """
    r1, r2 = right_from_left(chi_l1), right_from_left(chi_l2)
    Q = np.column_stack([r1, r1.conj(), r2, r2.conj()])
    Qinv = np.vstack([chi_l1, np.conj(chi_l1), chi_l2, np.conj(chi_l2)])
    cond = np.linalg.norm(Q, 2) * np.linalg.norm(Qinv, 2)
    if not np.isfinite(cond) or cond > cond_bound:
        raise ConditioningError(f"Q condition number {cond:.3e} exceeds {cond_bound:.3e}")
    err = np.max(np.abs(Qinv @ Q - np.eye(4)))
    if err > 1e-8:
        raise ConditioningError(f"Q^-1 Q deviates from identity by {err:.3e}")
    return Q, Qinv


def ladder_algebra_check(Qinv) -> float:
    """Deviation of ``zeta = Qinv X`` from ``[a_k, a_l^dagger] = delta_kl``.

    Returns ``max |Qinv (-SIGMA_Y) Qinv^dagger - SIGMA_Z|``; the rows of
    ``Qinv`` are the ladder operators ``(a1, a1^dagger, a2, a2^dagger)``.
    """
    Qinv = np.asarray(Qinv)
    return float(np.max(np.abs(Qinv @ (-SIGMA_Y) @ Qinv.conj().T - SIGMA_Z)))


def qdagger_residual(Q, Qinv) -> float:
    """``max |Q^dagger + SIGMA_Z Qinv SIGMA_Y|``."""
    return float(np.max(np.abs(Q.conj().T + SIGMA_Z @ Qinv @ SIGMA_Y)))


def diagonal_residual(Omega, Q, Qinv, sigma1, sigma2) -> float:
    target = np.diag([-1j * sigma1, 1j * sigma1, -1j * sigma2, 1j * sigma2])
    return float(np.max(np.abs(Qinv @ Omega @ Q - target)))


def projective_distance(a, b) -> float:
    """Sine of the angle between complex rays ``a`` and ``b`` (zero iff parallel).

    Computed from the component of ``a`` orthogonal to ``b``, which avoids
    the cancellation in ``sqrt(1 - |<a, b>|^2)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(a - np.vdot(b, a) * b))


@dataclass
class SpectralDecomposition:
    """Normal-mode data of an invariant.

    Attributes:
        sigma1, sigma2: characteristic frequencies, ``sigma1 >= sigma2 > 0``.
        chi_l1, chi_l2: normalized left eigenvectors (annihilation operators).
        Q, Qinv: mode matrices, ``zeta = Qinv X``.
        method: ``"numeric"`` or ``"closed"`` (which path produced the vectors).
    """

    coefficients: InvariantCoefficients
    sigma1: float
    sigma2: float
    chi_l1: np.ndarray
    chi_l2: np.ndarray
    Q: np.ndarray
    Qinv: np.ndarray
    Delta: float
    DeltaOmega: float
    method: str = "numeric"
    residuals: dict = field(default_factory=dict)

    @property
    def chi_r1(self):
        return right_from_left(self.chi_l1)

    @property
    def chi_r2(self):
        return right_from_left(self.chi_l2)

    @property
    def omega(self):
        return omega_from_coefficients(self.coefficients).matrix

    @property
    def chi_l(self):
        return np.vstack([self.chi_l1, self.chi_l2])

    def to_dict(self):
        def cplx(v):
            return [[float(z.real), float(z.imag)] for z in np.ravel(v)]

        return {
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "Delta": self.Delta,
            "DeltaOmega": self.DeltaOmega,
            "method": self.method,
            "chi_l1": cplx(self.chi_l1),
            "chi_l2": cplx(self.chi_l2),
            "Q": cplx(self.Q),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def decompose(c, method="numeric", cond_bound=1e8, literal=False) -> SpectralDecomposition:
    """Full spectral decomposition of the invariant with coefficients ``c``.

    ``method="closed"`` uses the closed-form eigenvectors and silently falls
    back to the numeric path when they degenerate.

    Raises:
        RegimeError: ``sigma_j`` not real and positive.
        ConditioningError: ``Q`` is ill-conditioned.
    """
    c = _coefficients_of(c)
    ci = characteristic_invariants(c)
    s1, s2 = ci.sigma1, ci.sigma2
    used = "numeric"
    if method == "closed":
        try:
            if abs(s1 - s2) <= DEGENERACY_TOL * max(1.0, s1):
                raise DegenerateError("degenerate frequencies")
            chi1 = left_eigenvectors_closed_form(c, s1, 1, literal=literal)
            chi2 = left_eigenvectors_closed_form(c, s2, 2, literal=literal)
            used = "closed"
        except DegenerateError:
            chi1, chi2 = left_eigenvectors_numeric(c, s1, s2)
    elif method == "numeric":
        chi1, chi2 = left_eigenvectors_numeric(c, s1, s2)
    else:
        raise ValueError(f"unknown method {method!r}")
    Q, Qinv = build_Q(chi1, chi2, cond_bound=cond_bound)
    O = omega_from_coefficients(c).matrix
    res = {
        "qdagger": qdagger_residual(Q, Qinv),
        "diagonal": diagonal_residual(O, Q, Qinv, s1, s2),
        "ladder": ladder_algebra_check(Qinv),
        "inverse": float(np.max(np.abs(Q @ Qinv - np.eye(4)))),
    }
    return SpectralDecomposition(c, s1, s2, chi1, chi2, Q, Qinv, ci.Delta, ci.DeltaOmega, used, res)


__all__ = [
    "CharacteristicInvariants",
    "OmegaMatrix",
    "SpectralDecomposition",
    "block_determinants",
    "build_Q",
    "characteristic_invariants",
    "closed_form_components",
    "decompose",
    "diagonal_residual",
    "fix_phase",
    "ladder_algebra_check",
    "left_eigenvectors_closed_form",
    "left_eigenvectors_numeric",
    "normalize_left",
    "omega_from_coefficients",
    "projective_distance",
    "qdagger_residual",
    "right_from_left",
    "symplectic_norm",
]
