"""Counterdiabatic driving of the Lipkin-Meshkov-Glick model.

Collective-spin operators and spectra, exact and approximate transitionless
driving terms, physical-operator decompositions of their banded structure,
time-dependent Schrödinger propagation with fidelity tracking, and a hybrid
banded-ansatz pulse optimizer with harmonic fits.
"""

__version__ = "0.1.0"

from .ansatz import (
    BandCoefficients,
    FitEvaluation,
    HarmonicFit,
    OptimizeResult,
    ansatz_matrix,
    evaluate_fit,
    fit_harmonics,
    optimize,
)
from .band_operators import (
    OperatorDecomposition,
    build_band_generator,
    build_Bj,
    decompose_band,
    solve_first_band_beta,
)
from .counterdiabatic import (
    BandTable,
    DrivingTerm,
    analytic_cd,
    band_table,
    exact_cd,
    hp_coefficient,
    hp_correction,
    truncate,
)
from .dynamics import (
    AnsatzDrive,
    Bare,
    DecomposedDrive,
    ExactCD,
    HPCorrection,
    Trajectory,
    Truncated,
    evolve,
    fidelity,
    parse_protocol,
)
from .errors import (
    AlignmentError,
    ConvergenceError,
    CriticalWindowError,
    DecompositionError,
    StructureError,
    ValidationError,
)
from .figures import FIGURES, run_figure
from .ramps import RampSchedule
from .spectrum import (
    GapTable,
    GroundTrack,
    SpectrumSnapshot,
    diagonalize,
    gap_series,
    gauge_align,
    track_ground,
)
from .spin_algebra import (
    DickeSector,
    ModelParams,
    OperatorMatrix,
    SpinOperators,
    build_h0,
    build_spin_ops,
    parity_projectors,
)

__all__ = [
    "__version__",
    # spin algebra
    "DickeSector", "ModelParams", "OperatorMatrix", "SpinOperators",
    "build_spin_ops", "build_h0", "parity_projectors",
    # spectrum
    "SpectrumSnapshot", "GroundTrack", "GapTable",
    "diagonalize", "gauge_align", "track_ground", "gap_series",
    # counterdiabatic
    "DrivingTerm", "BandTable", "exact_cd", "band_table", "truncate",
    "hp_correction", "hp_coefficient", "analytic_cd",
    # band operators
    "OperatorDecomposition", "build_Bj", "build_band_generator",
    "solve_first_band_beta", "decompose_band",
    # dynamics
    "RampSchedule", "Trajectory", "evolve", "fidelity", "parse_protocol",
    "Bare", "ExactCD", "Truncated", "HPCorrection", "AnsatzDrive",
    "DecomposedDrive",
    # ansatz
    "BandCoefficients", "OptimizeResult", "HarmonicFit", "FitEvaluation",
    "ansatz_matrix", "optimize", "fit_harmonics", "evaluate_fit",
    # figures
    "FIGURES", "run_figure",
    # errors
    "ValidationError", "CriticalWindowError", "StructureError",
    "AlignmentError", "ConvergenceError", "DecompositionError",
]
