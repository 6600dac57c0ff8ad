"""Schrödinger evolution under the ramped LMG Hamiltonian plus a chosen
driving protocol, with fidelity tracked against the instantaneous ground
state.

The integrator steps with the midpoint propagator exp(-i H(t_mid) dt),
applied through an exact eigendecomposition at every step.  Both the bare
Hamiltonian and every driving protocol here preserve excitation-number
parity, and the initial state is the tracked ground state (parity-pure), so
the evolution is carried out inside that parity block; this is an exact
reduction, not an approximation.
"""

from __future__ import annotations

import csv
import time as _time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import band_operators as bandops
from .counterdiabatic import (
    HP_SWITCH_TOL,
    band_table,
    exact_cd,
    hp_coefficient,
    sector_cd_block,
)
from .errors import ConvergenceError, CriticalWindowError, ValidationError
from .ramps import RampSchedule
from .spectrum import sector_ground_series
from .spin_algebra import (
    ModelParams,
    build_spin_ops,
    interaction_matrix,
    parity_indices,
)

__all__ = [
    "Bare",
    "ExactCD",
    "Truncated",
    "HPCorrection",
    "AnsatzDrive",
    "DecomposedDrive",
    "Trajectory",
    "evolve",
    "fidelity",
    "parse_protocol",
]

DEFAULT_STEPS = 4000
CONVERGENCE_TOL = 1e-6
MAX_REFINEMENTS = 3


# --------------------------------------------------------------------------
# protocols

@dataclass(frozen=True)
class Bare:
    label: str = "bare"


@dataclass(frozen=True)
class ExactCD:
    label: str = "exact_cd"


@dataclass(frozen=True)
class Truncated:
    bands: int

    def __post_init__(self):
        if self.bands < 1:
            raise ValidationError(f"band count must be >= 1, got {self.bands}")

    @property
    def label(self) -> str:
        return f"truncated({self.bands})"


@dataclass(frozen=True)
class HPCorrection:
    switch_tol: float = HP_SWITCH_TOL
    label: str = "hp"


@dataclass(frozen=True)
class AnsatzDrive:
    coefficients: "BandCoefficients"  # noqa: F821  (lives in cdlmg.ansatz)

    @property
    def label(self) -> str:
        return f"ansatz(k={self.coefficients.num_bands})"


@dataclass(frozen=True)
class DecomposedDrive:
    """Drive rebuilt from per-band operator decompositions of the exact term."""

    bands: int

    def __post_init__(self):
        if self.bands < 1:
            raise ValidationError(f"band count must be >= 1, got {self.bands}")

    @property
    def label(self) -> str:
        return f"decomposed({self.bands})"


Protocol = Union[Bare, ExactCD, Truncated, HPCorrection, AnsatzDrive, DecomposedDrive]

_PROTOCOL_ALIASES = {"bare": Bare, "exact": ExactCD, "exact_cd": ExactCD, "hp": HPCorrection}


def parse_protocol(spec) -> Protocol:
    """Accept protocol objects or CLI strings like 'bare', 'exact_cd',
    'truncated:2', 'decomposed:1'."""
    if not isinstance(spec, str):
        return spec
    name, _, arg = spec.partition(":")
    if name in _PROTOCOL_ALIASES:
        if arg:
            raise ValidationError(f"protocol {name!r} takes no argument")
        return _PROTOCOL_ALIASES[name]()
    if name in ("truncated", "decomposed"):
        if not arg:
            raise ValidationError(f"protocol {name!r} needs a band count, e.g. '{name}:1'")
        try:
            k = int(arg)
        except ValueError as exc:
            raise ValidationError(f"bad band count {arg!r} for protocol {name!r}") from exc
        return Truncated(k) if name == "truncated" else DecomposedDrive(k)
    raise ValidationError(
        f"unknown protocol {spec!r}; expected bare, exact_cd, truncated:k, hp, decomposed:k")


# --------------------------------------------------------------------------
# sector workspace

class SectorFrame:
    """Cached matrices for propagation inside one parity block."""

    def __init__(self, params: ModelParams):
        self.params = params
        sector = params.sector
        self.parity = params.n % 2
        self.idx = parity_indices(sector, self.parity)
        self.dim = len(self.idx)
        ix = np.ix_(self.idx, self.idx)
        self.base = interaction_matrix(sector, params.gamma)[ix]
        self.m_diag = sector.m_values[self.idx]
        ops = build_spin_ops(sector)
        self.b0_block = (ops.sx.mat @ ops.sy.mat + ops.sy.mat @ ops.sx.mat)[ix]

    def h0_blocks(self, h_values: np.ndarray) -> np.ndarray:
        h_values = np.atleast_1d(np.asarray(h_values, dtype=float))
        return (self.base[None, :, :]
                - 2.0 * h_values[:, None, None] * np.diag(self.m_diag)[None, :, :])

    def ground_series(self, h_values: np.ndarray):
        return sector_ground_series(self.params.sector, self.params.gamma,
                                    h_values, self.parity)

    def band_patterns(self, k: int) -> np.ndarray:
        """Constant-coefficient band matrices in sector coordinates: full-basis
        offset 2b is sector offset b."""
        if k > self.params.n // 2:
            raise ValidationError(
                f"{k} bands exceed floor(N/2) = {self.params.n // 2}")
        pats = np.zeros((k, self.dim, self.dim), dtype=complex)
        for b in range(1, k + 1):
            rows = np.arange(self.dim - b)
            pats[b - 1, rows, rows + b] = 1j
            pats[b - 1, rows + b, rows] = -1j
        return pats

    def truncation_mask(self, k: int) -> np.ndarray:
        keep = np.zeros((self.dim, self.dim), dtype=bool)
        for b in range(1, min(k, self.dim - 1) + 1):
            rows = np.arange(self.dim - b)
            keep[rows, rows + b] = True
            keep[rows + b, rows] = True
        return keep

    def embed(self, sector_vecs: np.ndarray) -> np.ndarray:
        """Lift (..., dim_sector) vectors to the full basis."""
        out = np.zeros(sector_vecs.shape[:-1] + (self.params.sector.dim,),
                       dtype=sector_vecs.dtype)
        out[..., self.idx] = sector_vecs
        return out


def _driving_block(frame: SectorFrame, protocol: Protocol, t_mid: float,
                   h: float, hdot: float, h0_block: np.ndarray):
    """Sector block of the driving term for one midpoint; None means no drive."""
    if isinstance(protocol, Bare):
        return None
    if isinstance(protocol, ExactCD):
        return sector_cd_block(h0_block, frame.m_diag, hdot)
    if isinstance(protocol, Truncated):
        cd = sector_cd_block(h0_block, frame.m_diag, hdot)
        return np.where(frame.truncation_mask(protocol.bands), cd, 0.0)
    if isinstance(protocol, HPCorrection):
        if abs(h - 1.0) < protocol.switch_tol:
            return None  # correction switched off inside its undefined window
        c = hp_coefficient(frame.params.n, frame.params.gamma, h, hdot,
                           protocol.switch_tol)
        return c * frame.b0_block
    if isinstance(protocol, AnsatzDrive):
        x = protocol.coefficients.values_at(t_mid)
        pats = frame.band_patterns(len(x))
        return np.tensordot(x, pats, axes=(0, 0))
    if isinstance(protocol, DecomposedDrive):
        term = exact_cd(frame.params, h, hdot)
        table = band_table(term)
        total = np.zeros((frame.params.sector.dim,) * 2, dtype=complex)
        for b in range(1, protocol.bands + 1):
            if table.max_abs(b) == 0.0:
                continue
            dec = bandops.decompose_band(table.band_matrix(b), b)
            total += dec.reconstruct().mat
        return total[np.ix_(frame.idx, frame.idx)]
    raise ValidationError(f"unsupported protocol {protocol!r}")


# --------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class Trajectory:
    """Result of one propagation: grid, fidelity series, tracked ground."""

    times: np.ndarray
    h_values: np.ndarray
    fidelity: np.ndarray
    ground: np.ndarray = field(repr=False)
    states: Optional[np.ndarray] = field(default=None, repr=False)
    protocol: str = ""
    params: Optional[ModelParams] = None
    info: dict = field(default_factory=dict)

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    @property
    def min_fidelity(self) -> float:
        return float(self.fidelity.min())

    def fidelity_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.fidelity))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "h", "fidelity"])
            for t, h, f in zip(self.times, self.h_values, self.fidelity):
                writer.writerow([f"{t:.15g}", f"{h:.15g}", f"{f:.15g}"])


def fidelity(state: np.ndarray, ground: np.ndarray) -> float:
    """Squared overlap |<ground|state>|^2 with a single tracked vector."""
    return float(abs(np.vdot(ground, state)) ** 2)


def _resolve_grid(params: ModelParams, ramp, grid):
    ramp = ramp if ramp is not None else params.ramp
    if ramp is None:
        raise ValidationError("evolve needs a ramp (params.ramp or argument)")
    if grid is None:
        grid = DEFAULT_STEPS
    if np.isscalar(grid):
        times = ramp.grid(int(grid))
    else:
        times = np.asarray(grid, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise ValidationError("grid must be an int or a 1-D array of >= 2 times")
    return ramp, times


def _propagate(params: ModelParams, protocol: Protocol, ramp, times,
               store_states: bool) -> Trajectory:
    t0 = _time.perf_counter()
    frame = SectorFrame(params)
    h_grid = ramp.h(times)
    grounds, _ = frame.ground_series(h_grid)
    t_mid = 0.5 * (times[:-1] + times[1:])
    dts = np.diff(times)
    h_mid = np.atleast_1d(ramp.h(t_mid))
    hd_mid = np.atleast_1d(ramp.hdot(t_mid))
    h0_mid = frame.h0_blocks(h_mid)

    psi = grounds[0].astype(complex)
    fid = np.empty(len(times))
    fid[0] = fidelity(psi, grounds[0])
    states = np.empty((len(times), frame.dim), dtype=complex) if store_states else None
    if store_states:
        states[0] = psi
    norm_err = 0.0
    for k in range(len(t_mid)):
        drive = _driving_block(frame, protocol, t_mid[k], h_mid[k], hd_mid[k],
                               h0_mid[k])
        h_tot = h0_mid[k] if drive is None else h0_mid[k] + drive
        energies, vectors = np.linalg.eigh(h_tot)
        psi = vectors @ (np.exp(-1j * energies * dts[k]) * (vectors.conj().T @ psi))
        fid[k + 1] = fidelity(psi, grounds[k + 1])
        norm_err = max(norm_err, abs(np.linalg.norm(psi) - 1.0))
        if store_states:
            states[k + 1] = psi

    info = {
        "steps": len(t_mid),
        "dt": float(np.max(np.abs(dts))),
        "max_norm_error": norm_err,
        "wall_time_s": _time.perf_counter() - t0,
    }
    return Trajectory(
        times=np.asarray(times, dtype=float),
        h_values=np.atleast_1d(h_grid),
        fidelity=fid,
        ground=frame.embed(grounds),
        states=frame.embed(states) if store_states else None,
        protocol=getattr(protocol, "label", str(protocol)),
        params=params,
        info=info,
    )


def evolve(params: ModelParams, protocol, grid=None, *, ramp=None,
           store_states: bool = True, converge: bool = False,
           convergence_tol: float = CONVERGENCE_TOL,
           max_refinements: int = MAX_REFINEMENTS) -> Trajectory:
    """Propagate the tracked ground state of H0(h(t_start)) along the ramp.

    `grid` is a step count (uniform grid) or an explicit time array.  With
    ``converge=True`` the step count is doubled until the final fidelity
    changes by less than `convergence_tol`, and the converged run is
    returned; failure to converge raises ConvergenceError with a suggested
    step size.
    """
    protocol = parse_protocol(protocol)
    if converge and grid is not None and not np.isscalar(grid):
        raise ValidationError("converge=True requires an integer step count")
    if converge and max_refinements < 1:
        raise ValidationError("converge=True needs max_refinements >= 1")
    ramp, times = _resolve_grid(params, ramp, grid)
    traj = _propagate(params, protocol, ramp, times, store_states)
    if not converge:
        return traj
    steps = traj.info["steps"]
    for _ in range(max_refinements):
        finer = _propagate(params, protocol, ramp, ramp.grid(2 * steps), store_states)
        delta = abs(finer.final_fidelity - traj.final_fidelity)
        if delta < convergence_tol:
            finer.info["converged"] = True
            finer.info["convergence_delta"] = delta
            return finer
        traj, steps = finer, 2 * steps
    raise ConvergenceError(
        f"final fidelity still changing by {delta:.2e} after {steps} steps; "
        f"try dt <= {ramp.duration / (4 * steps):.2e}")
