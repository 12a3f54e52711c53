"""``lrosc`` command line: solve, verify, sweep, spectrum.

Exit codes: 0 success, 1 verification failed, 2 configuration error,
3 physical-regime violation, 4 numerical failure.  Errors are written to
stderr as a single JSON object ``{"error": {...}}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, LROscError, PositivityError, RegimeError
from .invariant import NAMES
from .phases import spectrum as spectrum_entries
from .phases import tilde_spectral
from .pipeline import SWEEP_COLUMNS, initial_invariant, solve, sweep_point
from .quadratic import NCParams, PhysicalParams
from .schedule import Constant
from .spectral import decompose
from .verify import run_verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERIC = 0, 1, 2, 3, 4


def fmt(x) -> str:
    """17 significant digits for floats; booleans and strings verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def header_lines(cfg: RunConfig, kind: str):
    return [f"lrosc {__version__}", f"config_sha256 {cfg.sha256()}", f"output {kind}"]


def meta(cfg: RunConfig, kind: str) -> dict:
    return {"tool": "lrosc", "version": __version__, "config_sha256": cfg.sha256(), "output": kind}


def write_table(path, cfg, kind, columns, rows, form):
    """Write ``rows`` as CSV (``# `` header block, LF endings) or JSON."""
    if form == "json":
        doc = {"meta": meta(cfg, kind), "columns": list(columns), "rows": [[_json_value(v) for v in r] for r in rows]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        buf = io.StringIO()
        for line in header_lines(cfg, kind):
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        text = buf.getvalue()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.17g}") if np.isfinite(v) else None
    return v


def write_json(path, cfg, kind, body):
    doc = {"meta": meta(cfg, kind), **body}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(doc, indent=1, default=_json_value) + "\n")
    return path


def _ext(form):
    return "json" if form == "json" else "csv"


def cmd_solve(cfg: RunConfig) -> dict:
    """Run the pipeline and write trajectory, spectral, phase and separability outputs."""
    res = solve(cfg.model, cfg.solve_options())
    os.makedirs(cfg.out_dir, exist_ok=True)
    form, ext = cfg.fmt, _ext(cfg.fmt)
    files = []
    traj = res.trajectory
    rows = [[t, *c, r] for t, c, r in zip(traj.times, traj.coeffs, traj.residuals)]
    files.append(write_table(os.path.join(cfg.out_dir, f"trajectory.{ext}"), cfg, "trajectory", ["t", *NAMES, "residual"], rows, form))

    spectral = []
    for s in res.samples:
        ts = s.tilde
        spectral.append(
            {
                "t": s.t,
                "sigma1": s.sigma1,
                "sigma2": s.sigma2,
                "residuals": s.residuals,
                "tilde": {
                    "stable": ts.stable,
                    "sigma_t1": _cplx(ts.sigma_t1),
                    "sigma_t2": _cplx(ts.sigma_t2),
                    "tildeDelta": ts.tildeDelta,
                    "tildeDeltaOmega": ts.tildeDeltaOmega,
                    "D": ts.D,
                    "stability_product": ts.stability_product,
                },
            }
        )
    files.append(
        write_json(
            os.path.join(cfg.out_dir, "spectral.json"),
            cfg,
            "spectral",
            {"samples": spectral, "spectrum_t0": [{"n1": e.n1, "n2": e.n2, "E": e.E} for e in res.spectrum]},
        )
    )

    for (n1, n2), ph in res.phases.items():
        rows = [[t, n1, n2, g, d, g + d, e] for t, g, d, e in zip(ph.times, ph.theta_g, ph.theta_d, ph.energy)]
        cols = ["t", "n1", "n2", "theta_g", "theta_d", "theta", "E"]
        files.append(write_table(os.path.join(cfg.out_dir, f"phases_{n1}_{n2}.{ext}"), cfg, "phases", cols, rows, form))

    cols = [
        "t", "sigma1", "sigma2", "N0",
        "Lambda11_re", "Lambda11_im", "Lambda22_re", "Lambda22_im", "Lambda12_re", "Lambda12_im",
        "Delta1", "Delta2", "Delta12", "tau", "lhs_standard", "rhs_standard", "rhs_alt",
        "lhs_expanded", "expanded_agrees", "separable", "ppt_nu_min", "symplectic_nu1", "symplectic_nu2",
    ]  # fmt: skip
    rows = []
    for s in res.samples:
        L, sc = s.Lambda, s.simon
        rows.append(
            [
                s.t, s.sigma1, s.sigma2, s.N0,
                L[0, 0].real, L[0, 0].imag, L[1, 1].real, L[1, 1].imag, L[0, 1].real, L[0, 1].imag,
                sc.Delta1, sc.Delta2, sc.Delta12, sc.tau, sc.lhs, sc.rhs, sc.rhs_alt,
                s.expanded_inequality.lhs, s.expanded_inequality.agrees, sc.separable, sc.ppt_nu_min, *s.symplectic,
            ]  # fmt: skip
        )
    files.append(write_table(os.path.join(cfg.out_dir, f"separability.{ext}"), cfg, "separability", cols, rows, form))
    return {"status": "ok", "files": files, "max_residual": float(np.max(traj.residuals))}


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    report = run_verify(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    body = report.to_dict()
    write_json(os.path.join(cfg.out_dir, "verify.json"), cfg, "verify", body)
    return body, report.passed


def with_param(model, name, value):
    """Copy of ``model`` with one parameter frozen to ``value``."""
    if isinstance(model, NCParams):
        body = {k: getattr(model, k) for k in ("theta", "eta", "m1", "m2", "omega1", "omega2")}
        body[name] = value if name in ("theta", "eta") else Constant(float(value))
        return NCParams(**body)
    body = {k: getattr(model, k) for k in PhysicalParams._SCHEDULES}
    body["e"] = model.e
    body[name] = float(value) if name == "e" else Constant(float(value))
    return PhysicalParams(**body)


def _sweep_task(args):
    model, xp, xv, yp, yv, t = args
    try:
        m = with_param(with_param(model, xp, xv), yp, yv)
    except (LROscError, ValueError) as exc:
        row = {k: float("nan") for k in SWEEP_COLUMNS}
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    return sweep_point(m, t)


def sweep_rows(cfg: RunConfig):
    g = cfg.sweep
    if g is None:
        raise ConfigError("sweep requires outputs.sweep in the configuration")
    t = cfg.t0 if g.t is None else g.t
    tasks = [(cfg.model, g.x.param, xv, g.y.param, yv, t) for _, _, xv, yv in g.points()]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        results = [_sweep_task(a) for a in tasks]
    rows = []
    for (i, j, xv, yv), r in zip(g.points(), results):
        rows.append([i, j, xv, yv, *(r[k] for k in SWEEP_COLUMNS)])
    return ["i", "j", g.x.param, g.y.param, *SWEEP_COLUMNS], rows


def cmd_sweep(cfg: RunConfig) -> dict:
    cols, rows = sweep_rows(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = write_table(os.path.join(cfg.out_dir, f"sweep.{_ext(cfg.fmt)}"), cfg, "sweep", cols, rows, cfg.fmt)
    failed = sum(1 for r in rows if r[-1])
    return {"status": "ok", "files": [path], "points": len(rows), "failed_points": failed}


def cmd_spectrum(cfg: RunConfig) -> dict:
    dec = decompose(initial_invariant(cfg.model, cfg.solve_options()))
    entries = spectrum_entries(dec, cfg.nmax)
    ts = tilde_spectral(cfg.model, cfg.t0)
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = [[e.n1, e.n2, e.E] for e in entries]
    path = write_table(os.path.join(cfg.out_dir, f"spectrum.{_ext(cfg.fmt)}"), cfg, "spectrum", ["n1", "n2", "E"], rows, cfg.fmt)
    return {
        "status": "ok",
        "files": [path],
        "sigma1": dec.sigma1,
        "sigma2": dec.sigma2,
        "stable": ts.stable,
        "sigma_t1": _cplx(ts.sigma_t1),
        "sigma_t2": _cplx(ts.sigma_t2),
    }


def exit_code_for(exc) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (RegimeError, PositivityError, DomainError)):
        return EXIT_REGIME
    return EXIT_NUMERIC


def error_document(exc, code, cfg=None) -> dict:
    details = dict(getattr(exc, "details", {}) or {})
    if code == EXIT_REGIME and cfg is not None:
        try:
            ts = tilde_spectral(cfg.model, cfg.t0)
            details.setdefault("stability_product", ts.stability_product)
            details.setdefault("stable", ts.stable)
        except LROscError:
            pass
    return {
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
            "details": {k: _json_value(v) for k, v in details.items()},
        }
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), help="tabular output format")
    common.add_argument("--cutoff", type=int, help="Fock levels per mode for oracles")
    common.add_argument("--tol", type=float, help="oracle tolerance")
    common.add_argument("--seed", type=int, help="seed for randomized verification draws")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p = argparse.ArgumentParser(prog="lrosc", description="Invariant-based solver for time-dependent two-mode oscillators.")
    p.add_argument("--version", action="version", version=f"lrosc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("solve", "integrate the invariant and write all outputs"),
        ("verify", "run the Fock-space oracle suite"),
        ("sweep", "scan stability and separability over a 2-D grid"),
        ("spectrum", "invariant spectrum at t0"),
    ):
        sub.add_parser(name, parents=[common], help=help_)
    return p


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "spectrum": cmd_spectrum}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    cfg = None
    try:
        cfg = load_config(
            args.config, out=args.out, format=args.format, cutoff=args.cutoff, tol=args.tol, seed=args.seed, jobs=args.jobs
        )
        if args.command == "verify":
            body, ok = cmd_verify(cfg)
            print(json.dumps(body, default=_json_value))
            return EXIT_OK if ok else EXIT_VERIFY
        print(json.dumps(COMMANDS[args.command](cfg), default=_json_value))
        return EXIT_OK
    except (LROscError, np.linalg.LinAlgError, ArithmeticError) as exc:
        code = exit_code_for(exc)
        print(json.dumps(error_document(exc, code, cfg)), file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
