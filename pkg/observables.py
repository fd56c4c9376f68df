"""
Bloch vectors, entanglement and dense-coding capacity of the qubit pair.

A two-qubit density matrix can be written as

    rho = 1/4 (1 + s.sigma (x) 1 + 1 (x) t.tau + sum_ij C_ij sigma_i (x) tau_j)

where s and t are the Bloch vectors of the two qubits and C is the cross
dyadic. This module extracts (s, t, C) from a state, builds the entangled
dyadic E = C - s t^T, and evaluates its degree of entanglement and the
dense-coding capacity of the pair.
"""

import logging
from dataclasses import dataclass

import numpy as np

from errors import NotHermitianError, InvalidDensityError
from quantum_core import (
    QubitPairDensity, SingleQubitDensity, PAULI_PAIRS, PAULIS, POSITIVITY_SLACK,
    entropy_bits, trace_out_qubit
)

logger = logging.getLogger(__name__)


# Sender dimension for dense coding (Alice holds one qubit), log2(2) = 1 bit
SENDER_DIMENSION = 2
IMAGINARY_TOLERANCE = 1e-10

# Degree of entanglement of a Bell state, used to normalize for display
BELL_DOE = 3.0


@dataclass(eq=False)
class BlochDecomposition:
    """
    Bloch vectors and cross dyadic of a two-qubit state.

    Attributes:
        s: Bloch vector of the first qubit
        t: Bloch vector of the second qubit
        C: 3x3 cross dyadic, C_ij = <sigma_i (x) tau_j>
    """
    s: np.ndarray
    t: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        """Check shapes and that both Bloch vectors lie inside the unit ball."""
        self.s = np.asarray(self.s, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.C = np.asarray(self.C, dtype=float)
        if self.s.shape != (3,) or self.t.shape != (3,) or self.C.shape != (3, 3):
            raise ValueError("Bloch vectors need shape (3,) and the cross dyadic (3, 3)")
        for name, vector in (('s', self.s), ('t', self.t)):
            if np.linalg.norm(vector) > 1 + POSITIVITY_SLACK:
                raise InvalidDensityError(
                    f"Bloch vector {name} has length {np.linalg.norm(vector):.12g} > 1")

    @property
    def s_length(self) -> float:
        """Length of the first qubit's Bloch vector."""
        return float(np.linalg.norm(self.s))

    @property
    def t_length(self) -> float:
        """Length of the second qubit's Bloch vector."""
        return float(np.linalg.norm(self.t))


@dataclass(eq=False)
class EntangledDyadic:
    """The 3x3 entangled dyadic E = C - s t^T."""
    E: np.ndarray


def pauli_expectations(pair_matrices: np.ndarray) -> np.ndarray:
    """
    Table T_ij = tr(rho sigma_i (x) sigma_j) for i, j in (1, x, y, z).

    T[0, 0] is the trace, T[1:, 0] is s, T[0, 1:] is t and T[1:, 1:] is C.

    Args:
        pair_matrices: Array of shape (..., 4, 4)

    Returns:
        Real array of shape (..., 4, 4)

    Raises:
        NotHermitianError: If any expectation has an imaginary part > 1e-10
    """
    table = np.einsum('...ab,ijba->...ij', np.asarray(pair_matrices), PAULI_PAIRS)
    residue = np.max(np.abs(table.imag), initial=0.0)
    if residue > IMAGINARY_TOLERANCE:
        raise NotHermitianError(f"Pauli expectations have imaginary residue {residue:.2e}")
    return table.real


def bloch_decomposition(rho: QubitPairDensity) -> BlochDecomposition:
    """
    Decompose a two-qubit state into Bloch vectors and cross dyadic.

    Args:
        rho: Two-qubit density matrix

    Returns:
        The BlochDecomposition (s, t, C)
    """
    table = pauli_expectations(rho.matrix)
    return BlochDecomposition(s=table[1:, 0], t=table[0, 1:], C=table[1:, 1:])


def bloch_reconstruct(decomposition: BlochDecomposition) -> QubitPairDensity:
    """
    Rebuild the density matrix from (s, t, C).

    Args:
        decomposition: Bloch vectors and cross dyadic

    Returns:
        rho = 1/4 sum_ij T_ij sigma_i (x) sigma_j with T_00 = 1
    """
    table = np.zeros((4, 4))
    table[0, 0] = 1.0
    table[1:, 0] = decomposition.s
    table[0, 1:] = decomposition.t
    table[1:, 1:] = decomposition.C
    return QubitPairDensity(0.25 * np.einsum('ij,ijab->ab', table, PAULI_PAIRS))


def bloch_vector(rho: SingleQubitDensity) -> np.ndarray:
    """Bloch vector (<sigma_x>, <sigma_y>, <sigma_z>) of one qubit."""
    return np.array([np.trace(rho.matrix @ pauli).real for pauli in PAULIS[1:]])


def entangled_dyadic(decomposition: BlochDecomposition) -> EntangledDyadic:
    """
    Build E = C - s t^T.

    E vanishes for product states, so what is left measures correlation
    that cannot be explained by the single-qubit Bloch vectors.
    """
    return EntangledDyadic(decomposition.C - np.outer(decomposition.s, decomposition.t))


def degree_of_entanglement(dyadic: EntangledDyadic) -> float:
    """
    DoE = tr(E^T E), the squared Frobenius norm of E.

    Returns 0 for product states and 3 for Bell states.
    """
    return float(np.sum(dyadic.E ** 2))


def channel_capacity(rho: QubitPairDensity) -> float:
    """
    Dense-coding capacity C = log2(D_A) + S(rho_B) - S(rho_AB) in bits.

    The first qubit is the sender's (Alice's), so rho_B is obtained by
    tracing it out.

    Args:
        rho: Two-qubit density matrix shared by sender and receiver

    Returns:
        Capacity in bits, between 0 and 2 for two qubits
    """
    receiver = trace_out_qubit(rho.matrix, 'first')
    return float(np.log2(SENDER_DIMENSION) + entropy_bits(receiver) - entropy_bits(rho.matrix))


@dataclass(eq=False)
class ObservableSeries:
    """
    All observables for a stack of reduced states (one row per time).

    Attributes:
        s: First-qubit Bloch vectors, shape (count, 3)
        t: Second-qubit Bloch vectors, shape (count, 3)
        C: Cross dyadics, shape (count, 3, 3)
        doe: Degree of entanglement
        capacity: Dense-coding capacity in bits
        entropy_B: Entropy of the receiver's qubit in bits
        purity: tr(rho^2) of the pair
    """
    s: np.ndarray
    t: np.ndarray
    C: np.ndarray
    doe: np.ndarray
    capacity: np.ndarray
    entropy_B: np.ndarray
    purity: np.ndarray

    @property
    def s_length(self) -> np.ndarray:
        """Lengths of the first-qubit Bloch vectors."""
        return np.linalg.norm(self.s, axis=-1)

    @property
    def t_length(self) -> np.ndarray:
        """Lengths of the second-qubit Bloch vectors."""
        return np.linalg.norm(self.t, axis=-1)


def evaluate_series(pair_matrices: np.ndarray) -> ObservableSeries:
    """
    Evaluate every observable for a stack of two-qubit states at once.

    This is the batched form of bloch_decomposition, entangled_dyadic,
    degree_of_entanglement and channel_capacity.

    Args:
        pair_matrices: Array of shape (count, 4, 4)

    Returns:
        ObservableSeries with one entry per input state
    """
    pair_matrices = np.asarray(pair_matrices)
    table = pauli_expectations(pair_matrices)
    s = table[:, 1:, 0]
    t = table[:, 0, 1:]
    C = table[:, 1:, 1:]
    E = C - np.einsum('ki,kj->kij', s, t)

    entropy_B = entropy_bits(trace_out_qubit(pair_matrices, 'first'))
    entropy_AB = entropy_bits(pair_matrices)
    purity = np.real(np.einsum('kab,kba->k', pair_matrices, pair_matrices))

    return ObservableSeries(
        s=s, t=t, C=C,
        doe=np.sum(E ** 2, axis=(1, 2)),
        capacity=np.log2(SENDER_DIMENSION) + entropy_B - entropy_AB,
        entropy_B=entropy_B,
        purity=purity,
    )


if __name__ == "__main__":
    # Example usage with a Bell state and a product state
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    excited = np.zeros((4, 4), dtype=complex)
    excited[0, 0] = 1.0

    for name, matrix in (("Bell", bell), ("|ee>", excited)):
        rho = QubitPairDensity(matrix)
        decomposition = bloch_decomposition(rho)
        doe = degree_of_entanglement(entangled_dyadic(decomposition))
        print(f"{name}: s={decomposition.s}, t={decomposition.t}")
        print(f"  cross dyadic diagonal: {np.diag(decomposition.C)}")
        print(f"  DoE={doe:.3f}  capacity={channel_capacity(rho):.3f} bits")
