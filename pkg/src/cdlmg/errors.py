"""Exception types shared across the package.

Validation errors signal bad inputs (CLI exit code 1); the RuntimeError
subclasses signal numerical failures of an otherwise valid run (exit code 2).
"""


class ValidationError(ValueError):
    """Invalid parameters or configuration."""


class CriticalWindowError(ValidationError):
    """Harmonic correction requested inside its undefined window around h=1.

    Callers that drive dynamics treat this as "correction switched off".
    """


class StructureError(RuntimeError):
    """A driving term violates the expected banded structure.

    Raised when odd-offset or diagonal content exceeds tolerance, which
    would falsify the banded form the extraction relies on.
    """


class AlignmentError(RuntimeError):
    """Eigenvector continuity could not be established between snapshots."""


class ConvergenceError(RuntimeError):
    """Step-size refinement failed to converge the integrator."""


class DecompositionError(RuntimeError):
    """An operator decomposition left a residual above tolerance."""
