"""Parameter models and the Hamiltonian's quadratic form.

Conventions (hbar = c = 1, ordering ``X = (x1, p1, x2, p2)``):

* :func:`hamiltonian_matrix` returns the symmetric matrix ``Hm`` with diagonal
  ``(alpha1/2, 1/(2 mu1), alpha2/2, 1/(2 mu2))``, ``Hm[1, 2] = nu1`` and
  ``Hm[0, 3] = -nu2``.  The Hamiltonian operator is ``H = X^T Hm X``::

      H = p1^2/(2 mu1) + p2^2/(2 mu2) + alpha1 x1^2/2 + alpha2 x2^2/2
          + nu1 {x2, p1} - nu2 {x1, p2}

* an arbitrary symmetric ``F`` denotes the operator ``F^T``-ordered form
  ``(1/2) X^T F X`` (see :mod:`lrosc.fock`), so ``H`` corresponds to ``F = 2 Hm``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, PositivityError
from .schedule import Constant, Function, ParamSchedule, as_schedule


@dataclass(frozen=True)
class DerivedParams:
    """Instantaneous combinations entering the Hamiltonian at one time."""

    mu1: float
    mu2: float
    nu1: float
    nu2: float
    k01: float
    k02: float
    alpha1: float
    alpha2: float
    k1: float
    k2: float

    def stability_factors(self) -> tuple[float, float]:
        """``(alpha2 - 4 mu1 nu1^2, alpha1 - 4 mu2 nu2^2)``; the second tilde root is real iff their product is >= 0."""
        return (self.alpha2 - 4 * self.mu1 * self.nu1**2, self.alpha1 - 4 * self.mu2 * self.nu2**2)


def _coerce_schedules(obj, names):
    for name in names:
        object.__setattr__(obj, name, as_schedule(getattr(obj, name)))


def _domain(schedules):
    lo = max(s.domain[0] for s in schedules)
    hi = min(s.domain[1] for s in schedules)
    return (lo, hi)


@dataclass(frozen=True)
class PhysicalParams:
    """Charged anisotropic oscillator in the field ``A = (-alpha01 x2, alpha02 x1)``.

    Any field may be given as a number, a serialized schedule dict or a
    :class:`~lrosc.schedule.ParamSchedule`.
    """

    mu1: ParamSchedule
    mu2: ParamSchedule
    k1: ParamSchedule
    k2: ParamSchedule
    alpha01: ParamSchedule
    alpha02: ParamSchedule
    e: float = 1.0

    _SCHEDULES = ("mu1", "mu2", "k1", "k2", "alpha01", "alpha02")

    def __post_init__(self):
        _coerce_schedules(self, self._SCHEDULES)
        object.__setattr__(self, "e", float(self.e))

    @property
    def domain(self):
        return _domain([getattr(self, n) for n in self._SCHEDULES])

    @property
    def is_static(self) -> bool:
        return all(getattr(self, n).is_constant for n in self._SCHEDULES)

    def derived(self, t) -> DerivedParams:
        return derive_params(self, t)

    def hamiltonian(self, t):
        return hamiltonian_matrix(self, t)

    def to_dict(self):
        out = {n: getattr(self, n).to_dict() for n in self._SCHEDULES}
        out["e"] = self.e
        return out


def derive_params(p: PhysicalParams, t) -> DerivedParams:
    """Evaluate ``nu_j = e alpha0j / (2 mu_j)``, ``k0j = e^2 alpha0j^2 / mu_j`` and
    ``alpha1 = k1 + 4 mu2 nu2^2``, ``alpha2 = k2 + 4 mu1 nu1^2`` at time ``t``."""
    mu1, mu2 = p.mu1(t), p.mu2(t)
    if not (mu1 > 0 and mu2 > 0):
        raise PositivityError(f"masses must be positive at t={t}: mu1={mu1}, mu2={mu2}")
    k1, k2 = p.k1(t), p.k2(t)
    a01, a02 = p.alpha01(t), p.alpha02(t)
    nu1 = p.e * a01 / (2 * mu1)
    nu2 = p.e * a02 / (2 * mu2)
    return DerivedParams(
        mu1=mu1,
        mu2=mu2,
        nu1=nu1,
        nu2=nu2,
        k01=p.e**2 * a01**2 / mu1,
        k02=p.e**2 * a02**2 / mu2,
        alpha1=k1 + 4 * mu2 * nu2**2,
        alpha2=k2 + 4 * mu1 * nu1**2,
        k1=k1,
        k2=k2,
    )


def hamiltonian_from_derived(d: DerivedParams):
    H = np.zeros((4, 4))
    H[0, 0] = d.alpha1 / 2
    H[1, 1] = 1 / (2 * d.mu1)
    H[2, 2] = d.alpha2 / 2
    H[3, 3] = 1 / (2 * d.mu2)
    H[1, 2] = H[2, 1] = d.nu1
    H[0, 3] = H[3, 0] = -d.nu2
    return H


def hamiltonian_matrix(p, t):
    """Quadratic-form matrix ``Hm(t)`` with ``H = X^T Hm X`` (see module docstring)."""
    if isinstance(p, PhysicalParams):
        return hamiltonian_from_derived(derive_params(p, t))
    return p.hamiltonian(t)


@dataclass(frozen=True)
class NCParams:
    """Anisotropic oscillator on a noncommutative plane.

    ``theta`` and ``eta`` must be constants; masses and frequencies may vary.
    """

    theta: float
    eta: float
    m1: ParamSchedule
    m2: ParamSchedule
    omega1: ParamSchedule
    omega2: ParamSchedule

    _SCHEDULES = ("m1", "m2", "omega1", "omega2")

    def __post_init__(self):
        for name in ("theta", "eta"):
            val = getattr(self, name)
            if isinstance(val, ParamSchedule):
                if not val.is_constant:
                    raise ConfigError(f"{name} must be time independent")
                val = val(0.0) if val.domain[0] <= 0.0 <= val.domain[1] else val(val.domain[0])
            if isinstance(val, dict) or callable(val):
                raise ConfigError(f"{name} must be a real constant, got {val!r}")
            object.__setattr__(self, name, float(val))
        _coerce_schedules(self, self._SCHEDULES)

    @property
    def hbar_e(self) -> float:
        return 1.0 + self.theta * self.eta / 4.0

    @property
    def domain(self):
        return _domain([getattr(self, n) for n in self._SCHEDULES])

    @property
    def is_static(self) -> bool:
        return all(getattr(self, n).is_constant for n in self._SCHEDULES)

    def derived(self, t) -> DerivedParams:
        return nc_to_physical(self, t).derived

    def hamiltonian(self, t):
        """Bopp-shifted NC Hamiltonian ``M^T D M`` (independent of :func:`nc_to_physical`)."""
        M = bopp_shift_map(self)
        return M.T @ nc_form_matrix(self, t) @ M

    def to_dict(self):
        out = {"theta": self.theta, "eta": self.eta}
        out.update({n: getattr(self, n).to_dict() for n in self._SCHEDULES})
        return out


def nc_form_matrix(nc: NCParams, t):
    """Diagonal form ``D`` with ``H_nc = Xt^T D Xt`` in NC variables ``(X1~, P1~, X2~, P2~)``."""
    m1, m2 = nc.m1(t), nc.m2(t)
    if not (m1 > 0 and m2 > 0):
        raise PositivityError(f"NC masses must be positive at t={t}: m1={m1}, m2={m2}")
    w1, w2 = nc.omega1(t), nc.omega2(t)
    return np.diag([m1 * w1**2 / 2, 1 / (2 * m1), m2 * w2**2 / 2, 1 / (2 * m2)])


def bopp_shift_map(nc: NCParams):
    """Linear map ``Xt = M X`` from canonical to NC variables.

    ``X~_j = x_j + (theta/2) eps^{ij} p_i`` and ``P~_j = p_j + (eta/2) eps^{ji} x_i``
    with ``eps^{12} = 1``, i.e. ``X~1 = x1 - theta/2 p2``, ``X~2 = x2 + theta/2 p1``,
    ``P~1 = p1 + eta/2 x2``, ``P~2 = p2 - eta/2 x1``.
    """
    th, et = nc.theta / 2, nc.eta / 2
    return np.array(
        [
            [1.0, 0.0, 0.0, -th],
            [0.0, 1.0, et, 0.0],
            [0.0, th, 1.0, 0.0],
            [-et, 0.0, 0.0, 1.0],
        ]
    )


@dataclass(frozen=True)
class PhysicalSnapshot:
    """Physical-parameter values equivalent to an NC model at one instant (charge ``e = 1``)."""

    mu1: float
    mu2: float
    k1: float
    k2: float
    alpha01: float
    alpha02: float
    derived: DerivedParams
    e: float = 1.0

    def to_params(self) -> PhysicalParams:
        return PhysicalParams(self.mu1, self.mu2, self.k1, self.k2, self.alpha01, self.alpha02, self.e)


def nc_to_physical(nc: NCParams, t) -> PhysicalSnapshot:
    """Identify ``(mu_j, alpha_j, nu_j)`` of the physical model with an NC model at ``t``.

    The spring constants follow by inverting ``alpha1 = k1 + 4 mu2 nu2^2`` and
    the vector-potential coefficients by ``alpha0j = 2 mu_j nu_j`` (``e = 1``).
    """
    m1, m2 = nc.m1(t), nc.m2(t)
    if not (m1 > 0 and m2 > 0):
        raise PositivityError(f"NC masses must be positive at t={t}: m1={m1}, m2={m2}")
    w1, w2 = nc.omega1(t), nc.omega2(t)
    th, et = nc.theta, nc.eta
    inv_mu1 = 1 / m1 + m2 * w2**2 * th**2 / 4
    inv_mu2 = 1 / m2 + m1 * w1**2 * th**2 / 4
    if not (inv_mu1 > 0 and inv_mu2 > 0):
        raise PositivityError("implied physical masses are not positive")
    mu1, mu2 = 1 / inv_mu1, 1 / inv_mu2
    alpha1 = m1 * w1**2 + et**2 / (4 * m2)
    alpha2 = m2 * w2**2 + et**2 / (4 * m1)
    nu1 = (et + m1 * m2 * w2**2 * th) / (4 * m1)
    nu2 = (et + m1 * m2 * w1**2 * th) / (4 * m2)
    k1 = alpha1 - 4 * mu2 * nu2**2
    k2 = alpha2 - 4 * mu1 * nu1**2
    d = DerivedParams(
        mu1=mu1,
        mu2=mu2,
        nu1=nu1,
        nu2=nu2,
        k01=4 * mu1 * nu1**2,
        k02=4 * mu2 * nu2**2,
        alpha1=alpha1,
        alpha2=alpha2,
        k1=k1,
        k2=k2,
    )
    return PhysicalSnapshot(mu1, mu2, k1, k2, 2 * mu1 * nu1, 2 * mu2 * nu2, d)


def physical_from_nc(nc: NCParams) -> PhysicalParams:
    """Physical model whose schedules evaluate :func:`nc_to_physical` pointwise.

    Static NC models map to constant schedules; otherwise the schedules wrap
    the exact pointwise identification (not a resampled table).
    """
    if nc.is_static:
        t = nc.domain[0] if np.isfinite(nc.domain[0]) else 0.0
        return nc_to_physical(nc, t).to_params()
    names = ("mu1", "mu2", "k1", "k2", "alpha01", "alpha02")
    scheds = {
        n: Function(lambda t, n=n: getattr(nc_to_physical(nc, t), n), name=f"nc:{n}") for n in names
    }
    return PhysicalParams(**scheds, e=1.0)


def model_from_dict(spec: dict):
    """Parse ``{"physical": {...}}`` or ``{"nc": {...}}`` into a parameter model."""
    if not isinstance(spec, dict):
        raise ConfigError("model section must be a mapping")
    keys = {"physical", "nc"} & set(spec)
    if len(keys) != 1:
        raise ConfigError("model needs exactly one of 'physical' or 'nc'")
    kind = keys.pop()
    body = dict(spec[kind])
    cls = PhysicalParams if kind == "physical" else NCParams
    allowed = {f.name for f in fields(cls)}
    unknown = set(body) - allowed
    if unknown:
        raise ConfigError(f"unknown {kind} parameters: {sorted(unknown)}")
    try:
        return cls(**body)
    except TypeError as exc:
        raise ConfigError(f"incomplete {kind} parameter block: {exc}") from exc


def model_to_dict(model) -> dict:
    key = "physical" if isinstance(model, PhysicalParams) else "nc"
    return {key: model.to_dict()}


__all__ = [
    "Constant",
    "DerivedParams",
    "NCParams",
    "PhysicalParams",
    "PhysicalSnapshot",
    "bopp_shift_map",
    "derive_params",
    "hamiltonian_from_derived",
    "hamiltonian_matrix",
    "model_from_dict",
    "model_to_dict",
    "nc_form_matrix",
    "nc_to_physical",
    "physical_from_nc",
]
