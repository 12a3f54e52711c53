"""Oracle suite behind ``lrosc verify``: each check reports residuals and a pass flag."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import LROscError
from .gaussian import covariance, ground_state, ppt_separable, simon_criterion
from .invariant import (
    OPERATOR_NAMES,
    InvariantCoefficients,
    ansatz_operator_form,
    commutator_table,
    integrate,
)
from .phases import integrate_phases, tilde_spectral
from .pipeline import initial_invariant
from .spectral import decompose
from .symplectic import random_symplectic, williamson_covariance

LADDER_TOL = 1e-10
ANNIHILATION_TOL = 1e-6
FIDELITY_TOL = 1e-4
PHASE_TOL = 1e-4


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skipped"
    residuals: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self):
        out = {"name": self.name, "status": self.status, "residuals": {k: _jsonable(v) for k, v in self.residuals.items()}}
        if self.reason:
            out["reason"] = self.reason
        return out


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.17g}")
    return v


def _status(ok):
    return "pass" if ok else "fail"


def check_commutators(model, t, cutoff=24, tol=1e-10, corrupt=None) -> CheckResult:
    """Fock-fitted ``(1/i)[H, O]`` against the closed-form table for every ansatz operator.

    ``corrupt`` maps coefficient names to offsets added to every table row
    before comparison; it exists so the suite can demonstrate that a
    transcription error is caught.
    """
    table = commutator_table(model, t)
    if corrupt:
        table = {k: v + InvariantCoefficients(**corrupt) for k, v in table.items()}
    F_H = 2.0 * model.hamiltonian(t)
    worst_fit = worst_table = 0.0
    for name in OPERATOR_NAMES:
        fit = fock.commutator_check(F_H, ansatz_operator_form(name), cutoff=cutoff)
        dev = np.max(np.abs(fit.coefficients.as_array() - table[name].as_array()))
        worst_fit = max(worst_fit, fit.residual, abs(fit.constant))
        worst_table = max(worst_table, float(dev))
    ok = worst_fit <= tol and worst_table <= tol
    return CheckResult("commutator_table", _status(ok), {"fit_residual": worst_fit, "table_deviation": worst_table, "t": t})


def check_ladder(traj) -> CheckResult:
    worst = {"ladder": 0.0, "qdagger": 0.0, "diagonal": 0.0}
    for k in range(len(traj)):
        dec = decompose(traj[k])
        for key in worst:
            worst[key] = max(worst[key], dec.residuals[key])
    ok = all(v <= LADDER_TOL for v in worst.values())
    return CheckResult("ladder_algebra", _status(ok), worst)


def check_annihilation(c, cutoff=24) -> CheckResult:
    dec = decompose(c)
    g = ground_state(dec)
    psi = fock.fock_coefficients(g, cutoff)
    r1 = fock.annihilation_residual(dec.chi_l1, psi, cutoff)
    r2 = fock.annihilation_residual(dec.chi_l2, psi, cutoff)
    norm = float(np.linalg.norm(psi))
    ok = max(r1, r2) <= ANNIHILATION_TOL and abs(norm - 1) <= 1e-6
    return CheckResult("annihilation", _status(ok), {"a1": r1, "a2": r2, "norm": norm})


def check_lr_phase(model, traj, cutoff=24, steps=400) -> CheckResult:
    """Propagate the invariant's ground state with the Fock engine and compare with the LR prediction."""
    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    for t in traj.times:
        ts = tilde_spectral(model, t)
        if not ts.stable:
            return CheckResult(
                "lr_phase",
                "skipped",
                {"t": float(t), "stability_product": ts.stability_product},
                reason="sigma_t2 is imaginary (unstable regime): no bounded phase to compare",
            )
    ph = integrate_phases(traj, 0, 0, times=np.array([t0, t1]))
    g0 = ground_state(decompose(traj[0]))
    g1 = ground_state(decompose(traj[len(traj) - 1]))
    psi = fock.propagate(model, fock.fock_coefficients(g0, cutoff), t0, t1, steps)
    target = fock.fock_coefficients(g1, cutoff)
    ov = np.vdot(target, psi)
    fid = float(abs(ov) ** 2)
    dphi = float(np.angle(ov * np.exp(-1j * ph.theta[-1])))
    ok = fid >= 1 - FIDELITY_TOL and abs(dphi) <= PHASE_TOL
    return CheckResult(
        "lr_phase",
        _status(ok),
        {"fidelity": fid, "phase_error": abs(dphi), "theta_g": ph.theta_g[-1], "theta_d": ph.theta_d[-1]},
    )


def check_separability(traj, seed=0, draws=3, tol=1e-10) -> CheckResult:
    """Simon (standard form) against the PPT eigenvalue test on trajectory states and seeded random pure states."""
    rng = np.random.default_rng(seed)
    covs = [covariance(ground_state(decompose(traj[k]))) for k in range(len(traj))]
    covs += [williamson_covariance(random_symplectic(rng), 0.5, 0.5) for _ in range(draws)]
    disagree = sum(simon_criterion(V, tol).separable != ppt_separable(V, tol) for V in covs)
    vac = simon_criterion(0.5 * np.eye(4))
    gap = abs(vac.lhs - vac.rhs)
    ok = disagree == 0 and gap <= 1e-12
    return CheckResult(
        "simon_vs_ppt",
        _status(ok),
        {"states": len(covs), "disagreements": disagree, "vacuum_gap": gap, "vacuum_alt_holds": vac.alt_holds},
    )


@dataclass
class VerifyReport:
    checks: list

    @property
    def passed(self):
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self):
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _guard(name, fn, *args, **kwargs) -> CheckResult:
    try:
        return fn(*args, **kwargs)
    except LROscError as exc:
        return CheckResult(name, "skipped", {}, reason=f"{type(exc).__name__}: {exc}")


def run_verify(cfg) -> VerifyReport:
    """Run every oracle for a :class:`~lrosc.config.RunConfig`."""
    v = cfg.verify
    model = cfg.model
    checks = [check_commutators(model, cfg.t0, v.cutoff, v.tol, v.corrupt)]
    try:
        traj = integrate(initial_invariant(model, cfg.solve_options()), model, cfg.t0, cfg.t1, cfg.integrator, samples=cfg.samples)
    except LROscError as exc:
        reason = f"{type(exc).__name__}: {exc}"
        for name in ("ladder_algebra", "annihilation", "lr_phase", "simon_vs_ppt"):
            checks.append(CheckResult(name, "skipped", {}, reason=reason))
        return VerifyReport(checks)
    if not traj.all_positive_definite:
        ts = tilde_spectral(model, cfg.t0)
        reason = "invariant is not positive definite"
        if not ts.stable:
            reason += "; sigma_t2 is imaginary (unstable regime)"
        info = {"stability_product": ts.stability_product, "stable": ts.stable}
        checks.append(CheckResult("ladder_algebra", "skipped", info, reason))
        checks.append(CheckResult("annihilation", "skipped", info, reason))
        checks.append(_guard("lr_phase", check_lr_phase, model, traj, v.cutoff, v.steps))
        checks.append(CheckResult("simon_vs_ppt", "skipped", info, reason))
        return VerifyReport(checks)
    checks.append(_guard("ladder_algebra", check_ladder, traj))
    checks.append(_guard("annihilation", check_annihilation, traj[0], v.cutoff))
    checks.append(_guard("lr_phase", check_lr_phase, model, traj, v.cutoff, v.steps))
    checks.append(_guard("simon_vs_ppt", check_separability, traj, v.seed, v.draws))
    return VerifyReport(checks)


__all__ = [
    "CheckResult",
    "VerifyReport",
    "check_annihilation",
    "check_commutators",
    "check_ladder",
    "check_lr_phase",
    "check_separability",
    "run_verify",
]
