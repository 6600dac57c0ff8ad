"""Named benchmark scenarios bundling (N, gamma, ramp, protocols).

Each preset reproduces one standard comparison: ``fig1a`` and the ``s1*``
variants drive N=100 through (or near) the transition with the four driving
protocols; ``fig2`` sweeps the band count of the optimized ansatz at N=80;
``fig3a`` sweeps system size for the single-band ansatz.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

from .ansatz import OptimizeResult, optimize
from .dynamics import Bare, ExactCD, HPCorrection, Trajectory, Truncated, evolve
from .errors import ValidationError
from .ramps import RampSchedule
from .spin_algebra import ModelParams

__all__ = ["FigureSpec", "FIGURES", "run_figure", "max_workers"]

_COMPARISON_PROTOCOLS = (ExactCD(), Truncated(1), HPCorrection(), Bare())


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    n: int
    gamma: float
    ramp: RampSchedule
    kind: str  # "protocols" | "band_sweep" | "size_sweep"
    protocols: tuple = ()
    band_counts: tuple = ()
    sizes: tuple = ()


FIGURES: Dict[str, FigureSpec] = {
    "fig1a": FigureSpec("fig1a", 100, 0.0, RampSchedule.linear(0.75, 0.5),
                        "protocols", protocols=_COMPARISON_PROTOCOLS),
    "fig2": FigureSpec("fig2", 80, 0.0, RampSchedule.linear(0.75, 0.5),
                       "band_sweep", band_counts=(1, 2, 3, 4)),
    "fig3a": FigureSpec("fig3a", 10, 0.0, RampSchedule.linear(0.75, 0.5),
                        "size_sweep", sizes=(10, 20, 40, 80, 100)),
    "s1a": FigureSpec("s1a", 100, 0.0, RampSchedule.linear(0.55, 0.3),
                      "protocols", protocols=_COMPARISON_PROTOCOLS),
    "s1b": FigureSpec("s1b", 100, 0.0, RampSchedule.linear(1.25, -0.5),
                      "protocols", protocols=_COMPARISON_PROTOCOLS),
    "s1c": FigureSpec("s1c", 100, 0.0, RampSchedule.quadratic(0.75, 0.5),
                      "protocols", protocols=_COMPARISON_PROTOCOLS),
    "s1d": FigureSpec("s1d", 100, 0.0, RampSchedule.tanh_ramp(0.75, 0.5, 5.0),
                      "protocols", protocols=_COMPARISON_PROTOCOLS),
}


def max_workers() -> int:
    """Parallelism cap for concurrent trajectories (CDLMG_THREADS env var)."""
    env = os.environ.get("CDLMG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"CDLMG_THREADS must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


def run_figure(figure_id: str, *, n: Optional[int] = None, steps: int = 4000,
               segments: int = 40, seed: int = 0,
               sizes: Optional[Sequence[int]] = None) -> Dict[str, Trajectory]:
    """Execute all curves of one preset; returns trajectories keyed by label.

    For the optimizer presets the returned trajectories carry the optimized
    schedules in ``info["coefficients"]``.
    """
    if figure_id not in FIGURES:
        raise ValidationError(
            f"unknown figure {figure_id!r}; expected one of {sorted(FIGURES)}")
    spec = FIGURES[figure_id]

    if spec.kind == "protocols":
        params = ModelParams(n or spec.n, spec.gamma, spec.ramp)
        def one(protocol):
            return protocol.label, evolve(params, protocol, steps)
        with ThreadPoolExecutor(max_workers=max_workers()) as pool:
            pairs = list(pool.map(one, spec.protocols))
        return dict(pairs)

    if spec.kind == "band_sweep":
        params = ModelParams(n or spec.n, spec.gamma, spec.ramp)
        out: Dict[str, Trajectory] = {}
        warm = None
        for k in spec.band_counts:
            result: OptimizeResult = optimize(
                params, spec.ramp, k=k, segments=segments, eval_steps=steps,
                warm_start=warm, seed=seed)
            warm = result.coefficients.values
            result.trajectory.info["coefficients"] = result.coefficients
            out[result.trajectory.protocol] = result.trajectory
        return out

    # size sweep, single band
    out = {}
    for size in (sizes or spec.sizes):
        params = ModelParams(size, spec.gamma, spec.ramp)
        result = optimize(params, spec.ramp, k=1, segments=segments,
                          eval_steps=steps, seed=seed)
        result.trajectory.info["coefficients"] = result.coefficients
        out[f"N={size}"] = result.trajectory
    return out
