"""End-to-end runs: invariant trajectory, spectrum, phases and separability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LROscError, RegimeError
from .gaussian import covariance, ground_state, ground_state_inequality, simon_criterion
from .invariant import InvariantCoefficients, IntegratorOptions, Trajectory, initial_coefficients, integrate
from .phases import integrate_phases, spectrum, tilde_spectral
from .spectral import decompose
from .symplectic import symplectic_eigenvalues


@dataclass
class SolveOptions:
    """Run settings.

    ``initial`` is ``"hamiltonian"`` (the form of ``H(t0)``) or an
    :class:`InvariantCoefficients`.
    """

    t0: float = 0.0
    t1: float = 1.0
    samples: int = 51
    initial: object = "hamiltonian"
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    nmax: int = 2
    phase_states: tuple = ((0, 0),)


@dataclass
class SampleRecord:
    """Per-sample spectral, tilde and separability data."""

    t: float
    sigma1: float
    sigma2: float
    residuals: dict
    tilde: object
    Lambda: np.ndarray
    N0: float
    simon: object
    expanded_inequality: object
    symplectic: tuple


@dataclass
class SolveResult:
    model: object
    options: SolveOptions
    trajectory: Trajectory
    samples: list
    spectrum: list
    phases: dict


def initial_invariant(model, opts: SolveOptions) -> InvariantCoefficients:
    if isinstance(opts.initial, InvariantCoefficients):
        return opts.initial
    if opts.initial in (None, "hamiltonian"):
        return initial_coefficients(model, opts.t0)
    raise ValueError(f"unknown initial invariant {opts.initial!r}")


def sample_record(model, c: InvariantCoefficients, t) -> SampleRecord:
    dec = decompose(c)
    g = ground_state(dec)
    V = covariance(g)
    return SampleRecord(
        float(t),
        dec.sigma1,
        dec.sigma2,
        dict(dec.residuals),
        tilde_spectral(model, t),
        g.Lambda,
        g.N0,
        simon_criterion(V),
        ground_state_inequality(g),
        tuple(symplectic_eigenvalues(V)),
    )


def solve(model, opts: SolveOptions | None = None) -> SolveResult:
    """Integrate the invariant and evaluate everything downstream of it.

    Raises:
        RegimeError: the invariant loses positive definiteness on a sample.
        IntegrationError: the coefficient equations could not be integrated.
    """
    opts = opts or SolveOptions()
    c0 = initial_invariant(model, opts)
    traj = integrate(c0, model, opts.t0, opts.t1, opts.integrator, samples=opts.samples)
    if not traj.all_positive_definite:
        bad = float(traj.times[np.argmin(traj.positive_definite)])
        raise RegimeError("invariant is not positive definite", t=bad)
    recs = [sample_record(model, traj[k], t) for k, t in enumerate(traj.times)]
    spec = spectrum((recs[0].sigma1, recs[0].sigma2), opts.nmax)
    phases = {tuple(s): integrate_phases(traj, *s) for s in opts.phase_states}
    return SolveResult(model, opts, traj, recs, spec, phases)


SWEEP_COLUMNS = (
    "stable",
    "stability_product",
    "sigma_t1_re",
    "sigma_t1_im",
    "sigma_t2_re",
    "sigma_t2_im",
    "sigma1",
    "sigma2",
    "separable",
    "ppt_nu_min",
    "error",
)


def sweep_point(model, t) -> dict:
    """Stability and separability at a single parameter point.

    The invariant is taken as the instantaneous Hamiltonian form at ``t``.
    Failures downstream of the stability classification are recorded under
    ``"error"`` and leave the remaining fields as NaN.
    """
    row = {k: float("nan") for k in SWEEP_COLUMNS}
    row["error"] = ""
    try:
        ts = tilde_spectral(model, t)
    except LROscError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row["stable"] = ts.stable
    row["stability_product"] = ts.stability_product
    s1, s2 = complex(ts.sigma_t1), complex(ts.sigma_t2)
    row["sigma_t1_re"], row["sigma_t1_im"] = s1.real, s1.imag
    row["sigma_t2_re"], row["sigma_t2_im"] = s2.real, s2.imag
    try:
        rec = sample_record(model, initial_coefficients(model, t), t)
    except (LROscError, np.linalg.LinAlgError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row["sigma1"], row["sigma2"] = rec.sigma1, rec.sigma2
    row["separable"] = rec.simon.separable
    row["ppt_nu_min"] = rec.simon.ppt_nu_min
    return row


__all__ = ["SWEEP_COLUMNS", "SampleRecord", "SolveOptions", "SolveResult", "initial_invariant", "sample_record", "solve", "sweep_point"]
