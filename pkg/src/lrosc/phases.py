"""Invariant spectrum, Hamiltonian stability, and Lewis-Riesenfeld phases.

A state ``|n1, n2; t>`` of the invariant solves the Schrodinger equation once
multiplied by ``exp(i theta(t))`` with ``theta = theta_g + theta_d`` and::

    d theta_g / dt = i <n| d/dt |n>
    d theta_d / dt = -<n| H |n>

The sign of ``theta_d`` is such that a static positive Hamiltonian gives
``psi ~ exp(-i E t)``.  The ground state is the Gaussian of
:mod:`lrosc.gaussian` with a real positive normalization, which fixes the
phase of every ``|n1, n2>`` through ``(a_j^dagger)^n |0, 0>``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import InstabilityError, NormalizationError
from .gaussian import GaussianState, ground_state, number_state_covariance
from .invariant import InvariantCoefficients, Trajectory, rhs, to_quadratic_form
from .quadratic import hamiltonian_from_derived
from .spectral import SpectralDecomposition, decompose, fix_phase, right_from_left
from .symplectic import SIGMA_Y


@dataclass(frozen=True)
class SpectrumEntry:
    n1: int
    n2: int
    E: float


def spectrum(dec, nmax: int) -> list[SpectrumEntry]:
    """``E = (n1 + 1/2) sigma1 + (n2 + 1/2) sigma2`` for ``n1, n2 <= nmax``, ascending.

    ``dec`` is a :class:`SpectralDecomposition` or a pair ``(sigma1, sigma2)``.
    """
    s1, s2 = (dec.sigma1, dec.sigma2) if isinstance(dec, SpectralDecomposition) else dec
    if not (s1 > 0 and s2 > 0):
        raise InstabilityError("characteristic frequencies must be positive", sigma1=s1, sigma2=s2)
    out = [SpectrumEntry(a, b, (a + 0.5) * s1 + (b + 0.5) * s2) for a in range(nmax + 1) for b in range(nmax + 1)]
    return sorted(out, key=lambda e: (e.E, e.n1, e.n2))


@dataclass(frozen=True)
class TildeSpectral:
    """Spectral data of ``Omega~ = SIGMA_Y Hm`` (``Hm`` the Hamiltonian form).

    Attributes:
        tildeDelta, tildeDeltaOmega, D: closed-form polynomial coefficients and discriminant.
        sigma_t1: real root.
        sigma_t2: real when stable, otherwise purely imaginary (complex).
        stable: ``sigma_t2`` is real.
        stability_product: ``(alpha2 - 4 mu1 nu1^2)(alpha1 - 4 mu2 nu2^2)``.
        numeric_lambda_sq: ``lambda~^2`` from the eigenvalues of ``Omega~`` (descending real part).
    """

    tildeDelta: float
    tildeDeltaOmega: float
    D: float
    sigma_t1: float
    sigma_t2: complex | float
    stable: bool
    stability_product: float
    numeric_tildeDelta: float
    numeric_tildeDeltaOmega: float
    numeric_lambda_sq: tuple


def tilde_closed_forms(d):
    """``(Delta~, Delta_Omega~, D)`` from the derived parameters."""
    a1, a2, m1, m2, n1, n2 = d.alpha1, d.alpha2, d.mu1, d.mu2, d.nu1, d.nu2
    td = -a1 / (4 * m1) - a2 / (4 * m2) - 2 * n1 * n2
    tdo = a1 * a2 / (16 * m1 * m2) - n2**2 * a2 / (4 * m1) - n1**2 * a1 / (4 * m2) + n1**2 * n2**2
    D = (a1 / (4 * m1) - a2 / (4 * m2)) ** 2 + (a1 * n1 + a2 * n2) * (n1 / m2 + n2 / m1)
    return td, tdo, D


def tilde_spectral(p, t=None, tol=1e-10) -> TildeSpectral:
    """Closed forms and the eigenvalues of ``SIGMA_Y Hm`` computed side by side."""
    d = p if t is None and hasattr(p, "alpha1") else p.derived(t)
    H = hamiltonian_from_derived(d)
    td, tdo, D = tilde_closed_forms(d)
    Ot = SIGMA_Y @ H
    poly = np.poly(Ot)
    lam = np.linalg.eigvals(Ot)
    lsq = np.sort_complex(np.unique(np.round(lam**2, 12)))[::-1]
    scale = max(1.0, abs(td))
    Dc = 0.0 if -tol * scale**2 < D < 0 else D
    sqrtD = np.sqrt(complex(Dc))
    s1sq = 0.5 * (-td + sqrtD)
    s2sq = 0.5 * (-td - sqrtD)
    sigma_t1 = float(np.sqrt(s1sq).real) if abs(s1sq.imag) <= tol * scale else complex(np.sqrt(s1sq))
    if abs(s2sq.imag) <= tol * scale and s2sq.real >= -tol * scale:
        sigma_t2 = float(np.sqrt(max(s2sq.real, 0.0)))
        stable = True
    else:
        sigma_t2 = complex(np.sqrt(s2sq))
        stable = False
    k1, k2 = d.stability_factors()
    return TildeSpectral(
        float(td),
        float(tdo),
        float(D),
        sigma_t1,
        sigma_t2,
        stable,
        float(k1 * k2),
        float(poly[2].real),
        float(poly[4].real),
        tuple(complex(x) for x in lsq),
    )


def dynamical_phase_rate(ts: TildeSpectral, n1: int = 0, n2: int = 0) -> float:
    """Magnitude ``(2 n1 + 1) sigma~1 + (2 n2 + 1) sigma~2`` of the static dynamical rate.

    This equals ``<n|H|n>`` when the invariant is proportional to the
    Hamiltonian; the accumulated dynamical phase is minus its time integral.

    Raises:
        InstabilityError: ``sigma~2`` is imaginary.
    """
    if not ts.stable:
        raise InstabilityError(
            "sigma~2 is imaginary: no bounded dynamical phase",
            stability_product=ts.stability_product,
            D=ts.D,
        )
    return (2 * n1 + 1) * ts.sigma_t1 + (2 * n2 + 1) * ts.sigma_t2


def ground_rate_alternative(ts: TildeSpectral) -> float:
    """``sqrt(-Delta~ + 2 sqrt(Delta_Omega~))``, equal to ``sigma~1 + sigma~2`` when stable."""
    if not ts.stable:
        raise InstabilityError("sigma~2 is imaginary", stability_product=ts.stability_product)
    return float(np.sqrt(-ts.tildeDelta + 2 * np.sqrt(max(ts.tildeDeltaOmega, 0.0))))


def expected_hamiltonian(Hm, dec: SpectralDecomposition, n1=0, n2=0) -> float:
    """``<n1, n2| X^T Hm X |n1, n2> = Tr(Hm V_n)`` for the invariant's number state."""
    return float(np.trace(np.asarray(Hm) @ number_state_covariance(dec, n1, n2)))


def lambda_and_norm(M):
    """``(Lambda, N0, decomposition)`` of the invariant's ground state for form ``M``."""
    dec = decompose(InvariantCoefficients.from_form(M))
    g = ground_state(dec)
    return g.Lambda, g.N0, dec


def _step(M, Mdot, rel):
    return rel * max(1.0, float(np.max(np.abs(M)))) / max(float(np.max(np.abs(Mdot))), 1e-300)


def state_derivatives(M, Mdot, rel=1e-5):
    """Centred directional differences of ``Lambda``, ``N0`` and the left eigenvectors along ``Mdot``."""
    h = _step(M, Mdot, rel)
    Lp, Np, dp = lambda_and_norm(M + h * Mdot)
    Lm, Nm, dm = lambda_and_norm(M - h * Mdot)
    chi_dot = []
    for a, b in ((dp.chi_l1, dm.chi_l1), (dp.chi_l2, dm.chi_l2)):
        chi_dot.append((fix_phase(a) - fix_phase(b)) / (2 * h))
    return (Lp - Lm) / (2 * h), (Np - Nm) / (2 * h), chi_dot


def geometric_rate_components(state: GaussianState, Lambda_dot, N0_dot) -> complex:
    """``z = N0'/N0 - a' <x1^2> - b' <x2^2> - c' <x1 x2>`` with
    ``a = Lambda11/2``, ``b = Lambda22/2``, ``c = (Lambda12 + Lambda21)/2``.

    ``z = <psi | d/dt psi>`` is purely imaginary for a normalized family.
    """
    Ri = np.linalg.inv(state.R)
    x11, x22, x12 = 0.5 * Ri[0, 0], 0.5 * Ri[1, 1], 0.5 * Ri[0, 1]
    ad = 0.5 * Lambda_dot[0, 0]
    bd = 0.5 * Lambda_dot[1, 1]
    cd = 0.5 * (Lambda_dot[0, 1] + Lambda_dot[1, 0])
    return N0_dot / state.N0 - ad * x11 - bd * x22 - cd * x12


def geometric_phase_rate(state: GaussianState, Lambda_dot, N0_dot, tol=1e-8) -> float:
    """``i <0,0| d/dt |0,0>`` for the Gaussian ground state.

    Raises:
        NormalizationError: the real part of ``<psi|d/dt psi>`` does not vanish.
    """
    z = geometric_rate_components(state, Lambda_dot, N0_dot)
    scale = max(1.0, float(np.max(np.abs(Lambda_dot))))
    if abs(z.real) > tol * scale:
        raise NormalizationError(f"<psi|d/dt psi> has real part {z.real:.3e}; state family is not normalized")
    return float((1j * z).real)


def geometric_rate_trace(state: GaussianState, Lambda_dot) -> float:
    """Equivalent compact form ``Tr(Im(Lambda') Re(Lambda)^-1) / 4``."""
    return float(0.25 * np.trace(np.imag(Lambda_dot) @ np.linalg.inv(state.R)))


@dataclass(frozen=True)
class PhaseRates:
    geometric: float
    dynamical: float
    energy: float
    realness: float

    @property
    def total(self):
        return self.geometric + self.dynamical


def phase_rates(model, c: InvariantCoefficients, t, n1=0, n2=0, rel=1e-5) -> PhaseRates:
    """Geometric and dynamical rates of ``|n1, n2; t>`` for invariant coefficients ``c`` at ``t``.

    Excited states add ``i sum_j n_j chi_lj . d chi_rj/dt`` to the ground-state
    geometric rate.
    """
    M = to_quadratic_form(c)
    Mdot = to_quadratic_form(rhs(c, model, t))
    L, N0, dec = lambda_and_norm(M)
    g = GaussianState(L, N0)
    Hm = model.hamiltonian(t)
    if np.max(np.abs(Mdot)) == 0.0:
        geo, real_part = 0.0, 0.0
    else:
        Ld, Nd, chi_dot = state_derivatives(M, Mdot, rel)
        z = geometric_rate_components(g, Ld, Nd)
        real_part = float(abs(z.real))
        geo = geometric_phase_rate(g, Ld, Nd)
        for n, chi, cd in ((n1, dec.chi_l1, chi_dot[0]), (n2, dec.chi_l2, chi_dot[1])):
            if n:
                geo += float((1j * n * (chi @ right_from_left(cd))).real)
    dyn = -expected_hamiltonian(Hm, dec, n1, n2)
    E = (n1 + 0.5) * dec.sigma1 + (n2 + 0.5) * dec.sigma2
    return PhaseRates(geo, dyn, E, real_part)


@dataclass
class PhaseTrajectory:
    """Accumulated (unwrapped) phases of ``|n1, n2>`` on the sample times."""

    times: np.ndarray
    theta_g: np.ndarray
    theta_d: np.ndarray
    energy: np.ndarray
    n1: int = 0
    n2: int = 0
    max_realness: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def theta(self):
        return self.theta_g + self.theta_d

    def to_csv(self, fh=None, header_lines=()):
        out = fh if fh is not None else io.StringIO()
        for line in header_lines:
            out.write(f"# {line}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "n1", "n2", "theta_g", "theta_d", "theta", "E"])
        for t, g, d, e in zip(self.times, self.theta_g, self.theta_d, self.energy):
            w.writerow([f"{t:.17g}", self.n1, self.n2, f"{g:.17g}", f"{d:.17g}", f"{g + d:.17g}", f"{e:.17g}"])
        return out.getvalue() if fh is None else None


def integrate_phases(traj: Trajectory, n1=0, n2=0, times=None, epsabs=1e-12, epsrel=1e-11) -> PhaseTrajectory:
    """Accumulate both phases along a dense invariant trajectory by adaptive quadrature.

    ``theta = 0`` at the first time; values are not wrapped.
    """
    model = traj.model
    times = traj.times if times is None else np.asarray(times, dtype=float)
    cache = {}

    def rates(t):
        if t not in cache:
            cache[t] = phase_rates(model, traj.at(t), t, n1, n2)
        return cache[t]

    tg = np.zeros(len(times))
    td = np.zeros(len(times))
    en = np.zeros(len(times))
    worst = 0.0
    en[0] = rates(times[0]).energy
    for k in range(1, len(times)):
        a, b = times[k - 1], times[k]
        ig, _ = quad(lambda t: rates(t).geometric, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)
        idd, _ = quad(lambda t: rates(t).dynamical, a, b, epsabs=epsabs, epsrel=epsrel, limit=200)
        tg[k] = tg[k - 1] + ig
        td[k] = td[k - 1] + idd
        en[k] = rates(b).energy
    worst = max((r.realness for r in cache.values()), default=0.0)
    return PhaseTrajectory(np.asarray(times), tg, td, en, n1, n2, worst)


def gaussian_overlap(ga: GaussianState, gb: GaussianState) -> complex:
    """``<psi_a | psi_b>`` for two centred Gaussians (closed-form integral)."""
    A = np.conj(ga.Lambda) + gb.Lambda
    # principal branch: eigenvalues of A have positive real part
    ev = np.linalg.eigvals(A)
    return complex(ga.N0 * gb.N0 * 2 * np.pi / np.prod(np.sqrt(ev)))


def berry_phase_overlaps(traj: Trajectory, times) -> np.ndarray:
    """Geometric phase ``-sum arg <psi_k | psi_k+1>`` accumulated over ``times`` (oracle)."""
    states = [ground_state(decompose(traj.at(t))) for t in times]
    out = np.zeros(len(times))
    for k in range(1, len(times)):
        out[k] = out[k - 1] - np.angle(gaussian_overlap(states[k - 1], states[k]))
    return out


def tdse_solution(traj: Trajectory, phases: PhaseTrajectory, t) -> dict:
    """Labelled solution record ``|n1, n2; t> exp(i theta(t))`` at a sample time ``t``."""
    idx = int(np.argmin(np.abs(phases.times - t)))
    if abs(phases.times[idx] - t) > 1e-12 * max(1.0, abs(t)):
        raise ValueError(f"t={t} is not a phase sample time")
    rec = {
        "n1": phases.n1,
        "n2": phases.n2,
        "t": float(t),
        "E": float(phases.energy[idx]),
        "theta_g": float(phases.theta_g[idx]),
        "theta_d": float(phases.theta_d[idx]),
        "theta": float(phases.theta[idx]),
    }
    if phases.n1 == 0 and phases.n2 == 0:
        g = ground_state(decompose(traj.at(t)))
        rec["Lambda"] = g.Lambda
        rec["N0"] = g.N0
    return rec


__all__ = [
    "PhaseRates",
    "PhaseTrajectory",
    "SpectrumEntry",
    "TildeSpectral",
    "berry_phase_overlaps",
    "dynamical_phase_rate",
    "expected_hamiltonian",
    "gaussian_overlap",
    "geometric_phase_rate",
    "geometric_rate_components",
    "geometric_rate_trace",
    "ground_rate_alternative",
    "integrate_phases",
    "lambda_and_norm",
    "phase_rates",
    "spectrum",
    "state_derivatives",
    "tdse_solution",
    "tilde_closed_forms",
    "tilde_spectral",
]
