"""
Error types for the qubit-pair cavity simulator.

Every failure the simulator can report has its own exception class here,
so callers (and the command line) can tell them apart. Errors caused by bad
input also inherit from ValueError, which is what the rest of the code
raises for invalid arguments.
"""

from typing import Optional


# Exit codes used by the command line
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_ORACLE_MISMATCH = 3
EXIT_CUTOFF_TOO_SMALL = 4


class SimulationError(Exception):
    """Base class for all simulator errors."""

    exit_code = EXIT_CONFIG_ERROR


class NotHermitianError(SimulationError, ValueError):
    """A matrix that must be Hermitian is not (within tolerance)."""


class NoConvergenceError(SimulationError):
    """The eigenvalue solver ran out of iterations."""


class DimensionMismatchError(SimulationError, ValueError):
    """An array does not have the shape the operation needs."""


class NotNormalizedError(SimulationError, ValueError):
    """A state or amplitude pair does not have unit norm."""


class CutoffTooSmallError(SimulationError, ValueError):
    """
    The Fock-space cutoff leaves too much probability outside the basis.

    Attributes:
        cutoff: The cutoff that was tried
        tail_mass: Probability found beyond (or at the top of) the cutoff
    """

    exit_code = EXIT_CUTOFF_TOO_SMALL

    def __init__(self, cutoff: int, tail_mass: float, detail: str = ""):
        self.cutoff = cutoff
        self.tail_mass = tail_mass
        message = f"cutoff {cutoff} too small: tail mass {tail_mass:.3e}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class NotResonantError(SimulationError, ValueError):
    """Blockwise propagation was requested for detuned parameters."""


class UnknownPresetError(SimulationError, ValueError):
    """No figure preset has the requested name."""


class ConfigError(SimulationError, ValueError):
    """A scenario configuration is invalid."""


class OracleMismatchError(SimulationError):
    """
    The blockwise and full-space propagators disagree.

    Attributes:
        t: Scaled time of the first disagreement
        field: Name of the quantity that disagreed
        delta: Absolute difference between the two paths
    """

    exit_code = EXIT_ORACLE_MISMATCH

    def __init__(self, t: float, field: str, delta: float,
                 tolerance: Optional[float] = None):
        self.t = t
        self.field = field
        self.delta = delta
        message = f"propagators disagree at t={t:.6g} on {field}: delta={delta:.3e}"
        if tolerance is not None:
            message += f" (tolerance {tolerance:.1e})"
        super().__init__(message)


class InvalidDensityError(SimulationError, ValueError):
    """A density matrix has negative eigenvalues beyond numerical slack."""
