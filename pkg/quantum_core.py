"""
Complex linear algebra for two qubits and a cavity mode.

This module provides the building blocks every other module relies on:
Hermitian eigensystems, the Pauli operators, the reduced density matrices of
the qubit pair and of a single qubit, partial traces and von Neumann entropy.

Basis conventions (used everywhere in the project):
- each qubit is ordered (|e>, |g>), so index 0 is excited and index 1 is ground
- the qubit pair is ordered (|ee>, |eg>, |ge>, |gg>)
- sigma_z = |e><e| - |g><g|
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union, TYPE_CHECKING

import numpy as np
import scipy.linalg

from errors import (
    NotHermitianError, NoConvergenceError, DimensionMismatchError,
    NotNormalizedError, InvalidDensityError
)

if TYPE_CHECKING:
    from dynamics import JointState

logger = logging.getLogger(__name__)


# Numerical tolerances
HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
POSITIVITY_SLACK = 1e-9
NORM_TOLERANCE = 1e-10
ENTROPY_CLAMP = 1e-12

# Basis indices for a single qubit
EXCITED = 0
GROUND = 1
PAIR_BASIS_LABELS = ('ee', 'eg', 'ge', 'gg')

QUBIT_CHOICES = ('first', 'second')

# Pauli operators in the (|e>, |g>) basis
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |e><g|
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|

PAULIS = (IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z)

# PAULI_PAIRS[i, j] = sigma_i (x) sigma_j, with index 0 the identity
PAULI_PAIRS = np.array([[np.kron(p, q) for q in PAULIS] for p in PAULIS])


def is_hermitian(matrix: np.ndarray, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
    """
    Check if a square matrix equals its conjugate transpose entrywise.

    Args:
        matrix: The matrix to check
        tolerance: Largest allowed entrywise deviation

    Returns:
        True if the matrix is square and Hermitian within tolerance
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tolerance)


def hermitian_eigensystem(matrix: np.ndarray,
                          tolerance: float = HERMITIAN_TOLERANCE
                          ) -> Tuple[np.ndarray, np.ndarray]:
    """
    Diagonalize a Hermitian matrix.

    Args:
        matrix: Square Hermitian matrix
        tolerance: Allowed entrywise asymmetry before the matrix is rejected

    Returns:
        Tuple of (eigenvalues, eigenvectors). Eigenvalues are real and sorted
        ascending; eigenvectors are the orthonormal columns of a unitary matrix.

    Raises:
        NotHermitianError: If the matrix is not square or not Hermitian
        NoConvergenceError: If the solver fails to converge
    """
    matrix = np.asarray(matrix, dtype=complex)
    if not is_hermitian(matrix, tolerance):
        raise NotHermitianError(
            f"matrix of shape {matrix.shape} is not square and Hermitian "
            f"within {tolerance:g}")

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"eigensystem did not converge: {exc}") from exc

    logger.debug("diagonalized %dx%d Hermitian matrix", *matrix.shape)
    return eigenvalues, eigenvectors


@dataclass(eq=False)
class _DensityMatrix:
    """
    Shared validation for the fixed-size density matrices below.

    Attributes:
        matrix: Complex square matrix in the project's basis order
    """
    matrix: np.ndarray

    DIMENSION = 0

    def __post_init__(self):
        """Check shape, Hermiticity, unit trace and positivity."""
        self.matrix = np.array(self.matrix, dtype=complex)
        size = self.DIMENSION

        if self.matrix.shape != (size, size):
            raise DimensionMismatchError(
                f"{type(self).__name__} needs a {size}x{size} matrix, "
                f"got shape {self.matrix.shape}")

        if not is_hermitian(self.matrix):
            raise NotHermitianError(f"{type(self).__name__} is not Hermitian")

        trace = np.trace(self.matrix)
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise NotNormalizedError(
                f"{type(self).__name__} has trace {trace.real:.12g}, expected 1")

        eigenvalues = np.linalg.eigvalsh(self.matrix)
        if eigenvalues[0] < -POSITIVITY_SLACK or eigenvalues[-1] > 1 + POSITIVITY_SLACK:
            raise InvalidDensityError(
                f"{type(self).__name__} eigenvalues {eigenvalues} outside [0, 1]")

    def eigenvalues(self) -> np.ndarray:
        """Return the (real, ascending) eigenvalues."""
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        """Return tr(rho^2); 1 for pure states."""
        return purity(self.matrix)

    def __repr__(self) -> str:
        """Compact representation for debugging."""
        return f"{type(self).__name__}(purity={self.purity():.6f})"


@dataclass(eq=False, repr=False)
class QubitPairDensity(_DensityMatrix):
    """Reduced 4x4 state of the qubit pair over (|ee>, |eg>, |ge>, |gg>)."""

    DIMENSION = 4


@dataclass(eq=False, repr=False)
class SingleQubitDensity(_DensityMatrix):
    """Reduced 2x2 state of one qubit over (|e>, |g>)."""

    DIMENSION = 2


DensityLike = Union[_DensityMatrix, np.ndarray]


def _as_array(rho: DensityLike) -> np.ndarray:
    """Return the raw matrix (or stack of matrices) behind a density value."""
    if isinstance(rho, _DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def pair_density_from_amplitudes(amplitudes: np.ndarray, cutoff: int) -> np.ndarray:
    """
    Trace the cavity field out of one or many joint amplitude vectors.

    Works on a single vector of length 4*(cutoff+1) or on a stack of them
    with shape (count, 4*(cutoff+1)); no validation is done here.

    Args:
        amplitudes: Joint amplitudes in (qubit1, qubit2, Fock) order
        cutoff: Highest Fock index in the basis

    Returns:
        Array of shape (4, 4), or (count, 4, 4) for stacked input
    """
    amplitudes = np.asarray(amplitudes)
    psi = amplitudes.reshape(amplitudes.shape[:-1] + (4, cutoff + 1))
    return np.einsum('...qn,...pn->...qp', psi, psi.conj())


def partial_trace_field(psi: 'JointState') -> QubitPairDensity:
    """
    Trace out the cavity field to get the state of the qubit pair.

    Args:
        psi: Joint qubit-pair and field state

    Returns:
        The reduced two-qubit density matrix

    Raises:
        DimensionMismatchError: If the amplitude vector length is not 4*(cutoff+1)
        NotNormalizedError: If the state does not have unit norm
    """
    amplitudes = np.asarray(psi.amplitudes)
    expected = 4 * (psi.cutoff + 1)
    if amplitudes.shape != (expected,):
        raise DimensionMismatchError(
            f"joint state with cutoff {psi.cutoff} needs {expected} amplitudes, "
            f"got shape {amplitudes.shape}")

    norm = np.vdot(amplitudes, amplitudes).real
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NotNormalizedError(f"joint state has squared norm {norm:.12g}")

    return QubitPairDensity(pair_density_from_amplitudes(amplitudes, psi.cutoff))


def trace_out_qubit(pair_matrices: np.ndarray, which: str) -> np.ndarray:
    """
    Partial trace over one qubit of a 4x4 matrix (or a stack of them).

    Args:
        pair_matrices: Array of shape (..., 4, 4)
        which: 'first' to trace out the first qubit, 'second' for the second

    Returns:
        Array of shape (..., 2, 2) describing the remaining qubit
    """
    if which not in QUBIT_CHOICES:
        raise ValueError(f"which must be one of {QUBIT_CHOICES}, got {which!r}")

    pair_matrices = np.asarray(pair_matrices)
    tensor = pair_matrices.reshape(pair_matrices.shape[:-2] + (2, 2, 2, 2))
    if which == 'first':
        return np.einsum('...ijik->...jk', tensor)
    return np.einsum('...ijkj->...ik', tensor)


def partial_trace_qubit(rho: QubitPairDensity, which: str) -> SingleQubitDensity:
    """
    Reduce the qubit pair to a single qubit.

    Tracing out the 'first' qubit leaves the state of the second one
    (this is rho_B when the first qubit belongs to the sender).

    Args:
        rho: Two-qubit density matrix
        which: Which qubit to trace out, 'first' or 'second'

    Returns:
        The remaining qubit's density matrix
    """
    return SingleQubitDensity(trace_out_qubit(_as_array(rho), which))


def entropy_bits(matrices: np.ndarray) -> np.ndarray:
    """
    Von Neumann entropy in bits of a density matrix or a stack of them.

    Eigenvalues below the clamp threshold contribute nothing (0 log 0 = 0).

    Args:
        matrices: Array of shape (..., d, d)

    Returns:
        Array of shape (...) with entropies
    """
    eigenvalues = np.linalg.eigvalsh(np.asarray(matrices))
    kept = np.where(eigenvalues < ENTROPY_CLAMP, 1.0, eigenvalues)
    return -np.sum(np.where(eigenvalues < ENTROPY_CLAMP, 0.0, kept * np.log2(kept)),
                   axis=-1)


def von_neumann_entropy(rho: DensityLike) -> float:
    """
    Compute S(rho) = -sum p log2 p over the eigenvalues of rho.

    Args:
        rho: A SingleQubitDensity, QubitPairDensity or a raw square matrix

    Returns:
        Entropy in bits, between 0 and log2(dimension)
    """
    return float(entropy_bits(_as_array(rho)))


def purity(rho: DensityLike) -> float:
    """Return tr(rho^2) of a single density matrix."""
    matrix = _as_array(rho)
    return float(np.real(np.einsum('ij,ji->', matrix, matrix)))


def trace_distance(rho: DensityLike, sigma: DensityLike) -> float:
    """
    Trace distance 1/2 * ||rho - sigma||_1 between two density matrices.

    Args:
        rho: First density matrix
        sigma: Second density matrix of the same size

    Returns:
        Distance between 0 and 1
    """
    difference = _as_array(rho) - _as_array(sigma)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference))))


if __name__ == "__main__":
    # Example usage
    print("Bell state (|ee> + |gg>)/sqrt(2):")
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    bell_state = QubitPairDensity(bell)
    print(f"  purity: {bell_state.purity():.3f}")

    second_qubit = partial_trace_qubit(bell_state, 'first')
    print(f"  remaining qubit:\n{second_qubit.matrix.real}")
    print(f"  entropy of one qubit: {von_neumann_entropy(second_qubit):.3f} bits")
    print(f"  entropy of the pair: {von_neumann_entropy(bell_state):.3f} bits")

    values, vectors = hermitian_eigensystem(PAULI_X)
    print(f"\nEigenvalues of sigma_x: {values}")
