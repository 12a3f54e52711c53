"""Run configuration: YAML parsing, validation, canonical serialization.

Layout (all sections except ``model`` and ``time`` optional)::

    model:
      physical: {mu1: 1.0, mu2: 1.0, k1: 1.0, k2: 1.0, alpha01: 0.0, alpha02: 0.0, e: 1.0}
      # or  nc: {theta: 0.1, eta: 0.2, m1: 1.0, m2: 1.0, omega1: 1.0, omega2: 1.0}
    time: {t0: 0.0, t1: 10.0, samples: 101}
    initial: hamiltonian          # or {coefficients: {u11: ..., ...}}
    integrator: {rtol: 1.0e-10, atol: 1.0e-12, method: DOP853}
    outputs:
      nmax: 3
      phase_states: [[0, 0], [1, 0]]
      sweep:
        x: {param: theta, start: -1.0, stop: 1.0, num: 11}
        y: {param: eta, values: [0.0, 0.5]}
        t: 0.0
    verify: {cutoff: 24, tol: 1.0e-10, seed: 0, draws: 3, steps: 400}
    output: {dir: out, format: csv}

Any schedule may be a number or a mapping such as
``{type: sinusoid, offset: 1.0, amplitude: 0.1, frequency: 2.0}``.

Environment variables ``LROSC_OUT``, ``LROSC_FORMAT``, ``LROSC_CUTOFF``,
``LROSC_TOL``, ``LROSC_SEED`` and ``LROSC_JOBS`` override the file; explicit
command-line flags override both.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError, LROscError
from .invariant import NAMES, IntegratorOptions, InvariantCoefficients
from .pipeline import SolveOptions
from .quadratic import model_from_dict, model_to_dict

ENV_PREFIX = "LROSC_"
FORMATS = ("csv", "json")
SWEEP_LIMIT = 10**6

_TOP = {"model", "time", "initial", "integrator", "outputs", "verify", "output"}


@dataclass(frozen=True)
class Axis:
    param: str
    values: tuple

    def to_dict(self):
        return {"param": self.param, "values": [float(v) for v in self.values]}


@dataclass(frozen=True)
class SweepGrid:
    x: Axis
    y: Axis
    t: float | None = None

    @property
    def size(self):
        return len(self.x.values) * len(self.y.values)

    def points(self):
        """Row-major: ``x`` is the slow index."""
        for i, xv in enumerate(self.x.values):
            for j, yv in enumerate(self.y.values):
                yield i, j, xv, yv

    def to_dict(self):
        out = {"x": self.x.to_dict(), "y": self.y.to_dict()}
        if self.t is not None:
            out["t"] = float(self.t)
        return out


@dataclass(frozen=True)
class VerifySettings:
    cutoff: int = 24
    tol: float = 1e-10
    seed: int = 0
    draws: int = 3
    steps: int = 400
    corrupt: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration (see module docstring for the file layout)."""

    model: object
    t0: float
    t1: float
    samples: int
    initial: object = "hamiltonian"
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    nmax: int = 2
    phase_states: tuple = ((0, 0),)
    sweep: SweepGrid | None = None
    verify: VerifySettings = field(default_factory=VerifySettings)
    out_dir: str = "out"
    fmt: str = "csv"
    jobs: int = 1

    def solve_options(self) -> SolveOptions:
        return SolveOptions(self.t0, self.t1, self.samples, self.initial, self.integrator, self.nmax, self.phase_states)

    def to_dict(self) -> dict:
        """Canonical document; ``parse_config(cfg.to_dict()).to_dict() == cfg.to_dict()``."""
        initial = "hamiltonian" if self.initial == "hamiltonian" else {"coefficients": self.initial.to_dict()}
        integ = {"rtol": self.integrator.rtol, "atol": self.integrator.atol, "method": self.integrator.method}
        if np.isfinite(self.integrator.max_step):
            integ["max_step"] = self.integrator.max_step
        outputs = {"nmax": self.nmax, "phase_states": [list(s) for s in self.phase_states]}
        if self.sweep is not None:
            outputs["sweep"] = self.sweep.to_dict()
        v = self.verify
        verify = {"cutoff": v.cutoff, "tol": v.tol, "seed": v.seed, "draws": v.draws, "steps": v.steps}
        if v.corrupt:
            verify["corrupt"] = dict(v.corrupt)
        return {
            "model": model_to_dict(self.model),
            "time": {"t0": self.t0, "t1": self.t1, "samples": self.samples},
            "initial": initial,
            "integrator": integ,
            "outputs": outputs,
            "verify": verify,
            "output": {"dir": self.out_dir, "format": self.fmt, "jobs": self.jobs},
        }

    def sha256(self) -> str:
        """Hash of the canonical document; output location and worker count are excluded."""
        doc = self.to_dict()
        doc["output"] = {"format": self.fmt}
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _num(section, key, default=None, kind=float, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {val!r}")
    if kind is int:
        if float(val) != int(val):
            raise ConfigError(f"{key!r} must be an integer, got {val!r}")
        return int(val)
    return float(val)


def _mapping(doc, key):
    sec = doc.get(key, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    return sec


def _axis(spec, name) -> Axis:
    if not isinstance(spec, dict) or "param" not in spec:
        raise ConfigError(f"sweep axis {name!r} needs a 'param'")
    if "values" in spec:
        vals = spec["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"sweep axis {name!r}: 'values' must be a non-empty list")
        vals = tuple(float(v) for v in vals)
    else:
        start = _num(spec, "start", required=True)
        stop = _num(spec, "stop", required=True)
        num = _num(spec, "num", kind=int, required=True)
        if num < 1:
            raise ConfigError(f"sweep axis {name!r}: num must be >= 1")
        vals = tuple(float(v) for v in np.linspace(start, stop, num))
    return Axis(str(spec["param"]), vals)


def _initial(spec):
    if spec in (None, "hamiltonian"):
        return "hamiltonian"
    if isinstance(spec, dict) and "coefficients" in spec:
        coeffs = spec["coefficients"]
        if not isinstance(coeffs, dict):
            raise ConfigError("initial.coefficients must be a mapping")
        unknown = set(coeffs) - set(NAMES)
        if unknown:
            raise ConfigError(f"unknown invariant coefficients: {sorted(unknown)}")
        return InvariantCoefficients.from_dict(coeffs)
    raise ConfigError("initial must be 'hamiltonian' or {coefficients: {...}}")


def parse_config(doc: dict) -> RunConfig:
    """Validate a loaded document and build a :class:`RunConfig`.

    Raises:
        ConfigError: any schema or value violation.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(doc) - _TOP
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    if "model" not in doc:
        raise ConfigError("missing 'model' section")
    try:
        model = model_from_dict(doc["model"])
    except ConfigError:
        raise
    except (LROscError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc

    tsec = _mapping(doc, "time")
    t0 = _num(tsec, "t0", 0.0)
    t1 = _num(tsec, "t1", required=True)
    samples = _num(tsec, "samples", 101, kind=int)
    if not t0 < t1:
        raise ConfigError(f"need t0 < t1, got t0={t0}, t1={t1}")
    if samples < 2:
        raise ConfigError(f"need samples >= 2, got {samples}")
    lo, hi = model.domain
    if t0 < lo or t1 > hi:
        raise ConfigError(f"time span [{t0}, {t1}] leaves the schedule domain [{lo}, {hi}]")

    isec = _mapping(doc, "integrator")
    integ = IntegratorOptions(
        rtol=_num(isec, "rtol", 1e-10),
        atol=_num(isec, "atol", 1e-12),
        method=str(isec.get("method", "DOP853")),
        max_step=_num(isec, "max_step", np.inf),
    )
    if integ.rtol <= 0 or integ.atol <= 0:
        raise ConfigError("integrator tolerances must be positive")

    osec = _mapping(doc, "outputs")
    nmax = _num(osec, "nmax", 2, kind=int)
    if nmax < 0:
        raise ConfigError("nmax must be >= 0")
    states = osec.get("phase_states", [[0, 0]])
    try:
        states = tuple((int(a), int(b)) for a, b in states)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"phase_states must be a list of [n1, n2] pairs: {exc}") from exc
    if any(a < 0 or b < 0 for a, b in states):
        raise ConfigError("phase_states entries must be non-negative")
    sweep = None
    if osec.get("sweep") is not None:
        s = osec["sweep"]
        if not isinstance(s, dict):
            raise ConfigError("outputs.sweep must be a mapping")
        sweep = SweepGrid(_axis(s.get("x"), "x"), _axis(s.get("y"), "y"), _num(s, "t", None))
        body = next(iter(model_to_dict(model).values()))
        for ax in (sweep.x, sweep.y):
            if ax.param not in body:
                raise ConfigError(f"sweep parameter {ax.param!r} is not a model parameter")
        if sweep.size > SWEEP_LIMIT:
            raise ConfigError(f"sweep grid has {sweep.size} points (limit {SWEEP_LIMIT})")

    vsec = _mapping(doc, "verify")
    corrupt = vsec.get("corrupt", {}) or {}
    if not isinstance(corrupt, dict):
        raise ConfigError("verify.corrupt must be a mapping")
    verify = VerifySettings(
        cutoff=_num(vsec, "cutoff", 24, kind=int),
        tol=_num(vsec, "tol", 1e-10),
        seed=_num(vsec, "seed", 0, kind=int),
        draws=_num(vsec, "draws", 3, kind=int),
        steps=_num(vsec, "steps", 400, kind=int),
        corrupt={str(k): float(v) for k, v in corrupt.items()},
    )
    if verify.cutoff < 4:
        raise ConfigError("verify.cutoff must be >= 4")

    out = _mapping(doc, "output")
    fmt = str(out.get("format", "csv"))
    if fmt not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}")
    jobs = _num(out, "jobs", 1, kind=int)
    if jobs < 1:
        raise ConfigError("output.jobs must be >= 1")
    return RunConfig(
        model=model,
        t0=t0,
        t1=t1,
        samples=samples,
        initial=_initial(doc.get("initial")),
        integrator=integ,
        nmax=nmax,
        phase_states=states,
        sweep=sweep,
        verify=verify,
        out_dir=str(out.get("dir", "out")),
        fmt=fmt,
        jobs=jobs,
    )


def load_yaml(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return doc


def apply_overrides(doc: dict, env=None, **flags) -> dict:
    """Overlay ``LROSC_*`` environment values, then non-None ``flags``, onto a raw document."""
    env = os.environ if env is None else env
    doc = copy.deepcopy(doc) if doc else {}
    vals = {}
    casts = {"out": str, "format": str, "cutoff": int, "tol": float, "seed": int, "jobs": int}
    for key, cast in casts.items():
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            try:
                vals[key] = cast(raw)
            except ValueError as exc:
                raise ConfigError(f"bad {ENV_PREFIX}{key.upper()}={raw!r}") from exc
    vals.update({k: v for k, v in flags.items() if v is not None})
    out = doc.setdefault("output", {}) if ("out" in vals or "format" in vals or "jobs" in vals) else None
    if "out" in vals:
        out["dir"] = vals["out"]
    if "format" in vals:
        out["format"] = vals["format"]
    if "jobs" in vals:
        out["jobs"] = vals["jobs"]
    for key in ("cutoff", "tol", "seed"):
        if key in vals:
            doc.setdefault("verify", {})[key] = vals[key]
    return doc


def load_config(path, env=None, **flags) -> RunConfig:
    return parse_config(apply_overrides(load_yaml(path), env, **flags))


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


__all__ = [
    "ENV_PREFIX",
    "Axis",
    "RunConfig",
    "SweepGrid",
    "VerifySettings",
    "apply_overrides",
    "dump_config",
    "load_config",
    "load_yaml",
    "parse_config",
]
