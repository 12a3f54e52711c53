"""Scalar parameter schedules f(t).

Every time-dependent parameter (masses, spring constants, vector-potential
coefficients, NC frequencies) is a :class:`ParamSchedule`.  Schedules are
immutable, evaluable on scalars or arrays, and serialize to plain dicts so
that run configurations can describe them without code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError

_INF = math.inf


class ParamSchedule:
    """Base class: a real function of time on a closed domain."""

    kind = "abstract"
    domain: tuple[float, float] = (-_INF, _INF)

    def _eval(self, t):
        raise NotImplementedError

    def _deriv(self, t):
        raise NotImplementedError

    def _check(self, t):
        lo, hi = self.domain
        if isinstance(t, (float, int)):
            if not lo <= t <= hi:
                raise DomainError(f"t={t!r} outside schedule domain [{lo}, {hi}]")
            return float(t)
        arr = np.asarray(t, dtype=float)
        if np.any(arr < lo) or np.any(arr > hi):
            raise DomainError(f"t={t!r} outside schedule domain [{lo}, {hi}]")
        return arr

    def __call__(self, t):
        arr = self._check(t)
        out = self._eval(arr)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t):
        arr = self._check(t)
        out = self._deriv(arr)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def is_constant(self) -> bool:
        return False

    def to_dict(self):
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, as_schedule(other)))

    __radd__ = __add__


@dataclass(frozen=True)
class Constant(ParamSchedule):
    value: float
    kind = "constant"

    def _eval(self, t):
        return np.full(np.shape(t), float(self.value)) if np.ndim(t) else float(self.value)

    def _deriv(self, t):
        return np.zeros(np.shape(t)) if np.ndim(t) else 0.0

    @property
    def is_constant(self) -> bool:
        return True

    def to_dict(self):
        return float(self.value)


@dataclass(frozen=True)
class Polynomial(ParamSchedule):
    """``sum(c[k] * t**k)`` with coefficients in ascending order."""

    coefficients: tuple[float, ...]
    kind = "polynomial"

    def _eval(self, t):
        return np.polynomial.polynomial.polyval(t, self.coefficients)

    def _deriv(self, t):
        d = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(t, d) + 0.0 * t

    @property
    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coefficients[1:])

    def to_dict(self):
        return {"type": "polynomial", "coefficients": [float(c) for c in self.coefficients]}


@dataclass(frozen=True)
class Sinusoid(ParamSchedule):
    """``offset + amplitude * sin(frequency * t + phase)``."""

    offset: float = 0.0
    amplitude: float = 0.0
    frequency: float = 1.0
    phase: float = 0.0
    kind = "sinusoid"

    def _eval(self, t):
        return self.offset + self.amplitude * np.sin(self.frequency * t + self.phase)

    def _deriv(self, t):
        return self.amplitude * self.frequency * np.cos(self.frequency * t + self.phase)

    @property
    def is_constant(self) -> bool:
        return self.amplitude == 0 or self.frequency == 0

    def to_dict(self):
        return {
            "type": "sinusoid",
            "offset": float(self.offset),
            "amplitude": float(self.amplitude),
            "frequency": float(self.frequency),
            "phase": float(self.phase),
        }


@dataclass(frozen=True)
class Exponential(ParamSchedule):
    """``offset + amplitude * exp(rate * t)``."""

    offset: float = 0.0
    amplitude: float = 1.0
    rate: float = 0.0
    kind = "exponential"

    def _eval(self, t):
        return self.offset + self.amplitude * np.exp(self.rate * t)

    def _deriv(self, t):
        return self.amplitude * self.rate * np.exp(self.rate * t)

    @property
    def is_constant(self) -> bool:
        return self.amplitude == 0 or self.rate == 0

    def to_dict(self):
        return {
            "type": "exponential",
            "offset": float(self.offset),
            "amplitude": float(self.amplitude),
            "rate": float(self.rate),
        }


@dataclass(frozen=True, eq=False)
class Tabulated(ParamSchedule):
    """Samples joined by a C2 cubic spline (not-a-knot ends)."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    kind = "tabulated"
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ts = np.asarray(self.times, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
            raise ConfigError("tabulated schedule needs matching 1-D times/values with >= 2 samples")
        if np.any(np.diff(ts) <= 0):
            raise ConfigError("tabulated schedule times must be strictly increasing")
        object.__setattr__(self, "times", tuple(float(x) for x in ts))
        object.__setattr__(self, "values", tuple(float(x) for x in vs))
        object.__setattr__(self, "_spline", CubicSpline(ts, vs))

    @property
    def domain(self):
        return (self.times[0], self.times[-1])

    def _eval(self, t):
        return self._spline(t)

    def _deriv(self, t):
        return self._spline(t, 1)

    def to_dict(self):
        return {"type": "tabulated", "times": list(self.times), "values": list(self.values)}


@dataclass(frozen=True)
class Sum(ParamSchedule):
    terms: tuple[ParamSchedule, ...]
    kind = "sum"

    @property
    def domain(self):
        lo = max(s.domain[0] for s in self.terms)
        hi = min(s.domain[1] for s in self.terms)
        return (lo, hi)

    def _eval(self, t):
        return sum(s._eval(t) for s in self.terms)

    def _deriv(self, t):
        return sum(s._deriv(t) for s in self.terms)

    @property
    def is_constant(self) -> bool:
        return all(s.is_constant for s in self.terms)

    def to_dict(self):
        return {"type": "sum", "terms": [s.to_dict() for s in self.terms]}


@dataclass(frozen=True, eq=False)
class Function(ParamSchedule):
    """Wraps an arbitrary callable.  Used for exact derived schedules; not serializable."""

    func: Callable
    name: str = "function"
    constant: bool = False
    kind = "function"

    def _eval(self, t):
        if np.ndim(t):
            return np.array([self.func(float(x)) for x in np.ravel(t)]).reshape(np.shape(t))
        return float(self.func(float(t)))

    def _deriv(self, t, h=1e-5):
        return (self._eval(t + h) - self._eval(t - h)) / (2 * h)

    @property
    def is_constant(self) -> bool:
        return self.constant

    def to_dict(self):
        raise ConfigError(f"schedule {self.name!r} wraps a callable and cannot be serialized")


_KINDS = {
    "constant": lambda d: Constant(float(d["value"])),
    "polynomial": lambda d: Polynomial(tuple(float(c) for c in d["coefficients"])),
    "sinusoid": lambda d: Sinusoid(
        float(d.get("offset", 0.0)),
        float(d.get("amplitude", 0.0)),
        float(d.get("frequency", 1.0)),
        float(d.get("phase", 0.0)),
    ),
    "exponential": lambda d: Exponential(
        float(d.get("offset", 0.0)), float(d.get("amplitude", 1.0)), float(d.get("rate", 0.0))
    ),
    "tabulated": lambda d: Tabulated(tuple(d["times"]), tuple(d["values"])),
    "sum": lambda d: Sum(tuple(schedule_from_dict(x) for x in d["terms"])),
}


def schedule_from_dict(spec) -> ParamSchedule:
    """Build a schedule from its serialized form (a number or a ``{"type": ...}`` dict)."""
    if isinstance(spec, ParamSchedule):
        return spec
    if isinstance(spec, bool):
        raise ConfigError(f"invalid schedule {spec!r}")
    if isinstance(spec, (int, float)):
        return Constant(float(spec))
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"invalid schedule {spec!r}: expected a number or a mapping with 'type'")
    kind = spec["type"]
    if kind not in _KINDS:
        raise ConfigError(f"unknown schedule type {kind!r}; known: {sorted(_KINDS)}")
    try:
        return _KINDS[kind](spec)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {kind} schedule {spec!r}: {exc}") from exc


def as_schedule(value) -> ParamSchedule:
    if isinstance(value, ParamSchedule):
        return value
    if callable(value):
        return Function(value)
    return schedule_from_dict(value)
