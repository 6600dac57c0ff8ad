"""Collective spin operators and the LMG Hamiltonian on the symmetric sector.

All matrices act on the (N+1)-dimensional maximum-angular-momentum subspace
of N spin-1/2 particles, in the S_z eigenbasis |0>, ..., |N>.  Basis
conventions used throughout the package:

* |k> has S_z eigenvalue m = k - N/2, so |N> is the all-up state and is the
  ground state for a large positive field.
* S_+|k> = sqrt(S(S+1) - m(m+1)) |k+1> with S = N/2.
* The excitation-number parity of |k> is the parity of k; the even/odd
  projectors are diagonal 0/1 matrices on those index sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .ramps import RampSchedule

__all__ = [
    "DickeSector",
    "OperatorMatrix",
    "SpinOperators",
    "ModelParams",
    "build_spin_ops",
    "build_h0",
    "parity_projectors",
    "parity_indices",
]

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class DickeSector:
    """Maximum-angular-momentum sector of N spin-1/2 particles."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"particle count must be >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def spin(self) -> float:
        """Total spin S = N/2."""
        return self.n / 2

    @property
    def m_values(self) -> np.ndarray:
        """S_z eigenvalues k - N/2 in basis order."""
        return np.arange(self.dim) - self.spin


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on a Dicke sector; carries the sector for shape checks."""

    sector: DickeSector
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat)
        if mat.shape != (self.sector.dim, self.sector.dim):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match sector dim {self.sector.dim}")
        object.__setattr__(self, "mat", mat)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.sector, self.mat.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def commutes_with(self, other: "OperatorMatrix", tol: float = 1e-10) -> bool:
        c = self.mat @ other.mat - other.mat @ self.mat
        return bool(np.max(np.abs(c)) <= tol)

    def _coerce(self, other):
        if isinstance(other, OperatorMatrix):
            if other.sector != self.sector:
                raise ValidationError("operators act on different sectors")
            return other.mat
        return other

    def __add__(self, other):
        return OperatorMatrix(self.sector, self.mat + self._coerce(other))

    def __sub__(self, other):
        return OperatorMatrix(self.sector, self.mat - self._coerce(other))

    def __neg__(self):
        return OperatorMatrix(self.sector, -self.mat)

    def __mul__(self, scalar):
        return OperatorMatrix(self.sector, self.mat * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return OperatorMatrix(self.sector, self.mat @ self._coerce(other))

    def __array__(self, dtype=None):
        return np.asarray(self.mat, dtype=dtype)


@dataclass(frozen=True)
class SpinOperators:
    """The five collective spin matrices for one sector."""

    sector: DickeSector
    sx: OperatorMatrix
    sy: OperatorMatrix
    sz: OperatorMatrix
    splus: OperatorMatrix
    sminus: OperatorMatrix


@dataclass(frozen=True)
class ModelParams:
    """LMG model parameters: size N, anisotropy gamma, field schedule."""

    n: int
    gamma: float = 0.0
    ramp: Optional[RampSchedule] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"model requires N >= 2, got {self.n}")
        if self.gamma < 0:
            raise ValidationError(f"anisotropy must be >= 0, got {self.gamma}")

    @property
    def sector(self) -> DickeSector:
        return DickeSector(self.n)


def _ladder_coefficients(n: int) -> np.ndarray:
    s = n / 2
    m = np.arange(n) - s
    return np.sqrt(s * (s + 1) - m * (m + 1))


def build_spin_ops(sector: DickeSector) -> SpinOperators:
    """Angular-momentum matrices for total spin S = N/2 in the S_z basis."""
    n, dim = sector.n, sector.dim
    sp = np.zeros((dim, dim))
    sp[np.arange(1, dim), np.arange(n)] = _ladder_coefficients(n)
    sm = sp.T.copy()
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    sz = np.diag(sector.m_values)
    wrap = lambda m: OperatorMatrix(sector, m)
    return SpinOperators(sector, wrap(sx), wrap(sy), wrap(sz), wrap(sp), wrap(sm))


def interaction_matrix(sector: DickeSector, gamma: float) -> np.ndarray:
    """Field-independent part -(2/N)(Sx^2 + gamma*Sy^2), real symmetric."""
    ops = build_spin_ops(sector)
    sx, sy = ops.sx.mat, ops.sy.mat
    return (-(2.0 / sector.n) * ((sx @ sx) + gamma * (sy @ sy))).real


def build_h0(params: ModelParams, h: float, include_shift: bool = False) -> OperatorMatrix:
    """LMG Hamiltonian -(2/N)(Sx^2 + gamma*Sy^2) - 2h*Sz.

    The constant shift (1+gamma)/2 relating this form to the pairwise spin
    sum is omitted by default; pass ``include_shift=True`` for cross-checks
    against shifted conventions.  Fidelities never depend on it.
    """
    sector = params.sector
    mat = interaction_matrix(sector, params.gamma) - 2.0 * h * np.diag(sector.m_values)
    if include_shift:
        mat = mat + 0.5 * (1.0 + params.gamma) * np.eye(sector.dim)
    return OperatorMatrix(sector, mat)


def parity_indices(sector: DickeSector, parity: int) -> np.ndarray:
    """Basis indices with excitation number k = parity (mod 2)."""
    if parity not in (0, 1):
        raise ValidationError("parity must be 0 (even) or 1 (odd)")
    return np.arange(parity, sector.dim, 2)


def parity_projectors(sector: DickeSector) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Diagonal projectors onto even / odd excitation-number subspaces."""
    diag_even = (np.arange(sector.dim) % 2 == 0).astype(float)
    pi_e = OperatorMatrix(sector, np.diag(diag_even))
    pi_o = OperatorMatrix(sector, np.diag(1.0 - diag_even))
    return pi_e, pi_o
