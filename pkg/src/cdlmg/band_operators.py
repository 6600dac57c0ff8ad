"""Physical-operator realizations of the banded driving terms.

Band b of a driving term (offset 2b in the S_z basis) is spanned by the
Hermitian generator G_b = i(S_-^{2b} - S_+^{2b}) dressed with symmetrized
S_z powers.  For the first band the dressing family reduces to

    B_j = Sz^{j/2} (SxSy + SySx) Sz^{j/2}                      (j even)
    B_j = Sz^{(j-1)/2} SxSy Sz^{(j+1)/2} + h.c. ordering       (j odd)

and the coefficients expressing each elementary band pattern in this family
follow from a small linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import DecompositionError, ValidationError
from .spin_algebra import DickeSector, OperatorMatrix, build_spin_ops

__all__ = [
    "DecompositionTerm",
    "OperatorDecomposition",
    "build_Bj",
    "build_band_generator",
    "solve_first_band_beta",
    "decompose_band",
]

RECONSTRUCTION_TOL = 1e-10
BETA_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class DecompositionTerm:
    coefficient: float
    operator: OperatorMatrix
    label: str


@dataclass(frozen=True)
class OperatorDecomposition:
    """Expansion of one band of a driving term over physical operators."""

    sector: DickeSector
    band: int
    terms: List[DecompositionTerm] = field(repr=False)
    residual: float = 0.0

    def reconstruct(self) -> OperatorMatrix:
        mat = np.zeros((self.sector.dim, self.sector.dim), dtype=complex)
        for term in self.terms:
            mat += term.coefficient * term.operator.mat
        return OperatorMatrix(self.sector, mat)

    def to_json_list(self) -> list[dict]:
        return [{"label": t.label, "coefficient": t.coefficient} for t in self.terms]


def _matrix_power(mat: np.ndarray, p: int) -> np.ndarray:
    return np.linalg.matrix_power(mat, p) if p else np.eye(len(mat))


def build_Bj(sector: DickeSector, j: int) -> OperatorMatrix:
    """First-band dressing operator B_j."""
    if not 0 <= j <= sector.n - 2:
        raise ValidationError(f"dressing index j={j} outside [0, {sector.n - 2}]")
    ops = build_spin_ops(sector)
    sx, sy, sz = ops.sx.mat, ops.sy.mat, ops.sz.mat
    if j % 2 == 0:
        zp = _matrix_power(sz, j // 2)
        mat = zp @ (sx @ sy + sy @ sx) @ zp
    else:
        zlo = _matrix_power(sz, (j - 1) // 2)
        zhi = _matrix_power(sz, (j + 1) // 2)
        mat = zlo @ sx @ sy @ zhi + zhi @ sy @ sx @ zlo
    return OperatorMatrix(sector, mat)


def build_band_generator(sector: DickeSector, b: int) -> OperatorMatrix:
    """Hermitian generator i(S_-^{2b} - S_+^{2b}) populating only offset-2b
    diagonals."""
    if not 1 <= b <= sector.n // 2:
        raise ValidationError(f"band index b={b} outside [1, {sector.n // 2}]")
    ops = build_spin_ops(sector)
    sm2b = _matrix_power(ops.sminus.mat, 2 * b)
    sp2b = _matrix_power(ops.splus.mat, 2 * b)
    return OperatorMatrix(sector, 1j * (sm2b - sp2b))


def _band_upper_imag(mat: np.ndarray, b: int) -> np.ndarray:
    """Imaginary parts of the offset-2b superdiagonal."""
    return np.diagonal(mat, 2 * b).imag.copy()


def _first_band_design_matrix(sector: DickeSector) -> tuple[np.ndarray, list]:
    n = sector.n
    ops = [build_Bj(sector, j) for j in range(n - 1)]
    design = np.column_stack([_band_upper_imag(op.mat, 1) for op in ops])
    return design, ops


def _scaled_lstsq(design: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Least squares with column equilibration and one refinement step;
    the S_z dressings span many orders of magnitude at larger N."""
    scale = np.linalg.norm(design, axis=0)
    scale[scale == 0] = 1.0
    scaled = design / scale
    sol, *_ = np.linalg.lstsq(scaled, target, rcond=None)
    sol += np.linalg.lstsq(scaled, target - scaled @ sol, rcond=None)[0]
    return sol / scale


def solve_first_band_beta(sector: DickeSector):
    """Coefficients beta[i][j] expanding each elementary first-band pattern
    over the B_j family.

    The elementary pattern E_i carries +i at entry (i-1, i+1) and -i at its
    transpose, nothing else.  Returns ``(beta, residuals)`` with
    ``beta[i-1, j]`` the coefficient of B_j in E_i; raises
    DecompositionError when any least-squares residual exceeds tolerance.
    """
    if sector.n < 2:
        raise ValidationError("first-band solve needs N >= 2")
    design, _ = _first_band_design_matrix(sector)
    rows = design.shape[0]
    beta, residuals = np.zeros((rows, design.shape[1])), np.zeros(rows)
    for i in range(rows):
        target = np.zeros(rows)
        target[i] = 1.0
        sol = _scaled_lstsq(design, target)
        beta[i] = sol
        residuals[i] = float(np.linalg.norm(design @ sol - target))
    if residuals.max() > BETA_RESIDUAL_TOL:
        raise DecompositionError(
            f"first-band solve residual {residuals.max():.3e} > {BETA_RESIDUAL_TOL:.0e} "
            f"at N={sector.n}")
    return beta, residuals


def _dressing_basis(sector: DickeSector, b: int):
    """Symmetrized S_z dressings of G_b spanning band b; for b=1 the family
    coincides with the B_j operators up to normalization, so those are used
    directly to keep labels in the first-band form."""
    n = sector.n
    if b == 1:
        labels_even = "Sz^{p}(SxSy+SySx)Sz^{p}"
        ops, labels = [], []
        for j in range(n - 1):
            ops.append(build_Bj(sector, j))
            if j % 2 == 0:
                labels.append(labels_even.format(p=j // 2).replace("Sz^0", "").replace("Sz^1", "Sz"))
            else:
                lo, hi = (j - 1) // 2, (j + 1) // 2
                labels.append(
                    f"Sz^{lo}SxSySz^{hi}+Sz^{hi}SySxSz^{lo}".replace("Sz^0", "").replace("Sz^1", "Sz"))
        return ops, labels
    gen = build_band_generator(sector, b)
    zmat = build_spin_ops(sector).sz.mat
    gname = f"i(S-^{2*b}-S+^{2*b})"
    ops, labels = [], []
    for j in range(n - 2 * b + 1):
        if j % 2 == 0:
            zp = _matrix_power(zmat, j // 2)
            mat = zp @ gen.mat @ zp
            label = f"Sz^{j//2}{gname}Sz^{j//2}"
        else:
            zlo = _matrix_power(zmat, (j - 1) // 2)
            zhi = _matrix_power(zmat, (j + 1) // 2)
            mat = zlo @ gen.mat @ zhi + zhi @ gen.mat @ zlo
            label = f"Sz^{(j-1)//2}{gname}Sz^{(j+1)//2}+sym"
        ops.append(OperatorMatrix(sector, mat))
        labels.append(label.replace("Sz^0", "").replace("Sz^1", "Sz"))
    return ops, labels


def decompose_band(target, b: int,
                   reconstruction_tol: float = RECONSTRUCTION_TOL) -> OperatorDecomposition:
    """Express a single-band matrix as a sum of S_z-dressed generators.

    The target must populate only the offset-2b diagonals.  Raises
    DecompositionError when the dressing family cannot reproduce it to
    tolerance (the residual and basis size are reported in the message).
    """
    op = target.matrix if hasattr(target, "matrix") else target
    if not isinstance(op, OperatorMatrix):
        raise ValidationError("decompose_band expects an OperatorMatrix or DrivingTerm")
    sector = op.sector
    if not 1 <= b <= sector.n // 2:
        raise ValidationError(f"band index b={b} outside [1, {sector.n // 2}]")
    mat = op.mat
    mask = np.zeros_like(mat, dtype=bool)
    rows = np.arange(sector.dim - 2 * b)
    mask[rows, rows + 2 * b] = True
    mask[rows + 2 * b, rows] = True
    stray = float(np.max(np.abs(np.where(mask, 0.0, mat)))) if mat.size else 0.0
    if stray > reconstruction_tol:
        raise ValidationError(
            f"target has weight {stray:.3e} outside the offset-{2*b} diagonals")
    target_vec = _band_upper_imag(mat, b)
    if np.max(np.abs(target_vec)) <= reconstruction_tol and stray <= reconstruction_tol:
        return OperatorDecomposition(sector, b, [], 0.0)
    ops, labels = _dressing_basis(sector, b)
    design = np.column_stack([_band_upper_imag(o.mat, b) for o in ops])
    coeffs = _scaled_lstsq(design, target_vec)
    residual = float(np.linalg.norm(design @ coeffs - target_vec))
    if residual > reconstruction_tol:
        raise DecompositionError(
            f"band-{b} decomposition residual {residual:.3e} > "
            f"{reconstruction_tol:.0e} over {len(ops)} dressed operators at N={sector.n}")
    terms = [DecompositionTerm(float(c), o, lab)
             for c, o, lab in zip(coeffs, ops, labels)]
    return OperatorDecomposition(sector, b, terms, residual)
