"""Command-line front end: evolve / spectrum / optimize / fit / decompose.

Every run writes CSV data files plus a JSON manifest echoing the full
configuration, so a run can be replayed exactly.  Files are written
atomically (temp file + rename).  Exit codes: 0 success, 1 invalid
configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .ansatz import evaluate_fit, fit_harmonics, optimize
from .band_operators import decompose_band, solve_first_band_beta
from .counterdiabatic import band_table, exact_cd
from .dynamics import evolve, parse_protocol
from .errors import ValidationError
from .figures import FIGURES, run_figure
from .ramps import RampSchedule
from .spectrum import gap_series
from .spin_algebra import DickeSector, ModelParams

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Validated run configuration; serialized verbatim into manifests."""

    command: str
    n: Optional[int] = None
    gamma: float = 0.0
    ramp: Optional[str] = None
    protocols: list = field(default_factory=list)
    bands: Optional[int] = None
    segments: int = 40
    steps: int = 4000
    seed: int = 0
    out: str = "."
    figure: Optional[str] = None
    harmonics: Optional[int] = None
    h_min: Optional[float] = None
    h_max: Optional[float] = None
    h_points: int = 500
    t_eval: Optional[float] = None

    def model(self) -> ModelParams:
        if self.n is None:
            raise ValidationError("--n is required for this command")
        if self.n < 2:
            raise ValidationError(f"--n must be >= 2, got {self.n}")
        ramp = RampSchedule.parse(self.ramp) if self.ramp else None
        return ModelParams(self.n, self.gamma, ramp)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_export(path: Path, exporter) -> None:
    """Run an object's to_csv-style exporter against a temp file, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        exporter(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.15g}" if isinstance(v, float) else str(v)
                              for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _code_version() -> str:
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).parent).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        described = ""
    return f"cdlmg {__version__}" + (f" ({described})" if described else "")


def _write_manifest(outdir: Path, config: RunConfig, extra: dict,
                    wall_time: float) -> None:
    manifest = {
        "config": asdict(config),
        "version": _code_version(),
        "wall_time_s": wall_time,
        **extra,
    }
    _atomic_write(outdir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


# --------------------------------------------------------------------------
# subcommands

def _cmd_evolve(config: RunConfig) -> int:
    outdir = Path(config.out)
    t0 = time.perf_counter()
    finals = {}
    if config.figure:
        trajectories = run_figure(config.figure, steps=config.steps,
                                  segments=config.segments, seed=config.seed)
    else:
        params = config.model()
        if params.ramp is None:
            raise ValidationError("--ramp is required without --figure")
        if not config.protocols:
            raise ValidationError("at least one --protocol is required")
        trajectories = {}
        for spec in config.protocols:
            protocol = parse_protocol(spec)
            trajectories[protocol.label] = evolve(params, protocol, config.steps)
    files = []
    for label, traj in trajectories.items():
        safe = label.replace("(", "_").replace(")", "").replace("=", "")
        path = outdir / f"trajectory_{safe}.csv"
        rows = zip(traj.times, traj.h_values, traj.fidelity)
        _write_csv(path, ["t", "h", "fidelity"],
                   ((float(t), float(h), float(f)) for t, h, f in rows))
        files.append(path.name)
        finals[label] = traj.final_fidelity
        print(f"{label}: final fidelity {traj.final_fidelity:.6f} "
              f"(min {traj.min_fidelity:.6f})")
    _write_manifest(outdir, config, {"files": files, "final_fidelity": finals},
                    time.perf_counter() - t0)
    return 0


def _cmd_spectrum(config: RunConfig) -> int:
    outdir = Path(config.out)
    t0 = time.perf_counter()
    params = config.model()
    if config.h_min is None or config.h_max is None:
        raise ValidationError("spectrum needs --h-min and --h-max")
    if not config.h_max > config.h_min:
        raise ValidationError("--h-max must exceed --h-min")
    if config.h_points < 2:
        raise ValidationError("--h-points must be >= 2")
    grid = np.linspace(config.h_min, config.h_max, config.h_points)
    table = gap_series(params, grid)
    path = outdir / "gaps.csv"
    _atomic_export(path, table.to_csv)
    for pair in table.pairs:
        print(f"gap{pair[0]}{pair[1]}: min {table.gap(pair).min():.3e} "
              f"max {table.gap(pair).max():.3e}")
    _write_manifest(outdir, config, {"files": [path.name]},
                    time.perf_counter() - t0)
    return 0


def _cmd_optimize(config: RunConfig) -> int:
    outdir = Path(config.out)
    t0 = time.perf_counter()
    if config.bands is None or config.bands < 1:
        raise ValidationError("--bands must be a positive integer")
    files, summary = [], {}
    if config.figure:
        trajectories = run_figure(config.figure, steps=config.steps,
                                  segments=config.segments, seed=config.seed)
    else:
        params = config.model()
        if params.ramp is None:
            raise ValidationError("--ramp is required without --figure")
        result = optimize(params, params.ramp, k=config.bands,
                          segments=config.segments, eval_steps=config.steps,
                          seed=config.seed)
        result.trajectory.info["coefficients"] = result.coefficients
        trajectories = {result.trajectory.protocol: result.trajectory}
    for label, traj in trajectories.items():
        safe = label.replace("(", "_").replace(")", "").replace("=", "")
        coeffs = traj.info.get("coefficients")
        if coeffs is not None:
            cpath = outdir / f"schedule_{safe}.csv"
            _atomic_export(cpath, coeffs.to_csv)
            files.append(cpath.name)
            jpath = outdir / f"schedule_{safe}.json"
            _atomic_write(jpath, json.dumps(coeffs.to_json_dict(), indent=2) + "\n")
            files.append(jpath.name)
        tpath = outdir / f"trajectory_{safe}.csv"
        _atomic_export(tpath, traj.to_csv)
        files.append(tpath.name)
        summary[label] = {"min_fidelity": traj.min_fidelity,
                          "final_fidelity": traj.final_fidelity,
                          "warnings": traj.info.get("optimizer_warnings", [])}
        print(f"{label}: min fidelity {traj.min_fidelity:.6f}")
    _write_manifest(outdir, config, {"files": files, "results": summary},
                    time.perf_counter() - t0)
    return 0


def _cmd_fit(config: RunConfig) -> int:
    outdir = Path(config.out)
    t0 = time.perf_counter()
    params = config.model()
    ramp = params.ramp or RampSchedule.linear(0.75, 0.5)
    params = ModelParams(params.n, params.gamma, ramp)
    c = config.harmonics
    if c is None or not 1 <= c <= 3:
        raise ValidationError("--harmonics must be 1, 2 or 3")
    result = optimize(params, ramp, k=config.bands or 1,
                      segments=config.segments, eval_steps=config.steps,
                      seed=config.seed)
    times, series = result.coefficients.band_series(1)
    fit = fit_harmonics(times, series, c)
    evaluation = evaluate_fit(params, ramp, fit, result.coefficients,
                              eval_steps=config.steps)
    files = []
    spath = outdir / "schedule_optimized.csv"
    _atomic_export(spath, result.coefficients.to_csv)
    files.append(spath.name)
    fpath = outdir / "harmonic_fit.json"
    _atomic_write(fpath, json.dumps(fit.to_json_dict(), indent=2) + "\n")
    files.append(fpath.name)
    report = {
        "n": params.n, "harmonics": c,
        "fit_rms_residual": fit.residual,
        "max_fidelity_discrepancy": evaluation.discrepancy,
        "optimized_min_fidelity": evaluation.reference.min_fidelity,
        "fitted_min_fidelity": evaluation.trajectory.min_fidelity,
    }
    rpath = outdir / "fit_report.json"
    _atomic_write(rpath, json.dumps(report, indent=2) + "\n")
    files.append(rpath.name)
    print(f"harmonics={c}: max fidelity discrepancy "
          f"{evaluation.discrepancy:.6f} (fit rms {fit.residual:.4g})")
    _write_manifest(outdir, config, {"files": files, "report": report},
                    time.perf_counter() - t0)
    return 0


def _cmd_decompose(config: RunConfig) -> int:
    outdir = Path(config.out)
    t0 = time.perf_counter()
    params = config.model()
    if params.ramp is None:
        raise ValidationError("--ramp is required for decompose")
    t_eval = config.t_eval if config.t_eval is not None else params.ramp.t_start
    h = float(params.ramp.h(t_eval))
    hdot = float(params.ramp.hdot(t_eval))
    term = exact_cd(params, h, hdot)
    table = band_table(term)
    bands = sorted(table.bands)
    if config.bands:
        bands = [b for b in bands if b <= config.bands]
    payload = {"n": params.n, "gamma": params.gamma, "h": h, "hdot": hdot,
               "bands": {}}
    beta, residuals = solve_first_band_beta(DickeSector(params.n))
    payload["first_band_beta"] = beta.tolist()
    payload["first_band_beta_residual"] = float(residuals.max())
    for b in bands:
        dec = decompose_band(table.band_matrix(b), b)
        payload["bands"][str(b)] = {
            "terms": dec.to_json_list(),
            "residual": dec.residual,
        }
        print(f"band {b}: {len(dec.terms)} operators, residual {dec.residual:.2e}")
    path = outdir / "decomposition.json"
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")
    _write_manifest(outdir, config, {"files": [path.name]},
                    time.perf_counter() - t0)
    return 0


# --------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdlmg",
        description="Counterdiabatic driving of the LMG model: evolution, "
                    "spectra, pulse optimization, operator decompositions.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ramp=True):
        p.add_argument("--n", type=int, help="particle count")
        p.add_argument("--gamma", type=float, default=0.0, help="anisotropy")
        if ramp:
            p.add_argument("--ramp", help="field schedule, e.g. linear:0.75,0.5")
        p.add_argument("--steps", type=int, default=4000,
                       help="propagation steps (default 4000)")
        p.add_argument("--segments", type=int, default=40,
                       help="optimizer time segments (default 40)")
        p.add_argument("--seed", type=int, default=0, help="optimizer seed")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("evolve", help="propagate one or more protocols")
    common(p)
    p.add_argument("--protocol", action="append", dest="protocols", default=[],
                   help="bare | exact_cd | truncated:k | hp | decomposed:k "
                        "(repeatable)")
    p.add_argument("--figure", choices=sorted(FIGURES),
                   help="run a named preset instead of explicit parameters")

    p = sub.add_parser("spectrum", help="energy-gap table over a field grid")
    common(p, ramp=False)
    p.add_argument("--h-min", type=float, dest="h_min")
    p.add_argument("--h-max", type=float, dest="h_max")
    p.add_argument("--h-points", type=int, dest="h_points", default=500)

    p = sub.add_parser("optimize", help="optimize banded-ansatz coefficients")
    common(p)
    p.add_argument("--bands", type=int, help="number of ansatz bands")
    p.add_argument("--figure", choices=["fig2", "fig3a"],
                   help="run an optimizer preset")

    p = sub.add_parser("fit", help="harmonic fit of the optimized band-1 pulse")
    common(p)
    p.add_argument("--bands", type=int, default=1)
    p.add_argument("--harmonics", type=int, help="number of sinusoids (1-3)")

    p = sub.add_parser("decompose", help="physical-operator decomposition of "
                                         "the exact driving term")
    common(p)
    p.add_argument("--bands", type=int, help="highest band to decompose")
    p.add_argument("--t", type=float, dest="t_eval",
                   help="ramp time at which to evaluate (default t_start)")
    return parser


_HANDLERS = {
    "evolve": _cmd_evolve,
    "spectrum": _cmd_spectrum,
    "optimize": _cmd_optimize,
    "fit": _cmd_fit,
    "decompose": _cmd_decompose,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    fields = {f: getattr(args, f) for f in RunConfig.__dataclass_fields__
              if hasattr(args, f)}
    config = RunConfig(**fields)
    try:
        return _HANDLERS[config.command](config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical failures and unexpected errors
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
