"""
Time evolution of two qubits coupled to one cavity mode.

This module builds the rotating-wave Hamiltonian, prepares the initial state
(a|ee> + b|gg>) (x) coherent field, and evolves it in two independent ways:

- FullPropagator diagonalizes the whole truncated Hamiltonian once. It is
  slow but unambiguous, so it serves as the reference (oracle).
- BlockPropagator uses the fact that the resonant interaction only mixes the
  four states |ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>. Each such block is a
  4x4 problem that is diagonalized on its own.

Units: hbar = lambda_1 = 1, so times are the scaled time lambda_1 * t.

Joint basis layout: index = (q1 * 2 + q2) * (cutoff + 1) + n, where q = 0
means excited and q = 1 means ground.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from errors import (
    CutoffTooSmallError, DimensionMismatchError, NotNormalizedError,
    NotResonantError
)
from quantum_core import (
    hermitian_eigensystem, IDENTITY_2, PAULI_Z, SIGMA_PLUS, SIGMA_MINUS,
    NORM_TOLERANCE
)

logger = logging.getLogger(__name__)


# Truncation guards
TAIL_TOLERANCE = 1e-12
GUARD_LEVELS = 5
GUARD_THRESHOLD = 1e-8
VACUUM_BLOCK_REACH = 2  # highest Fock level reachable from the vacuum block

RESONANCE_TOLERANCE = 1e-12

# Qubit-pair indices in the joint basis
EE, EG, GE, GG = 0, 1, 2, 3

# Pair index and Fock offset of the four block slots A, B, C, D:
# (|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>)
BLOCK_SLOTS = ((EE, 0), (EG, 1), (GE, 1), (GG, 2))

# Lowest block index: n = -2 holds only |gg,0>, n = -1 holds |eg,0>, |ge,0>, |gg,1>
FIRST_BLOCK = -2

Times = Union[float, List[float], np.ndarray]


def default_cutoff(nbar: float) -> int:
    """
    Pick a Fock cutoff for a coherent field with mean photon number nbar.

    Uses ceil(nbar + 10 * sqrt(nbar)) + 2, i.e. ten standard deviations of
    the Poisson distribution above the mean plus room for the two photons a
    block can add.

    Args:
        nbar: Mean photon number (>= 0)

    Returns:
        The cutoff (highest Fock index kept)
    """
    if nbar < 0:
        raise ValueError(f"mean photon number must be >= 0, got {nbar}")
    return int(math.ceil(nbar + 10.0 * math.sqrt(nbar))) + 2


def auto_cutoff(nbar: float) -> int:
    """
    Smallest cutoff, starting from default_cutoff, that fits the field.

    Two tails have to be small enough. The Poisson mass above the cutoff
    must stay below TAIL_TOLERANCE, and the mass that evolution can carry
    into the guarded top levels must stay below the warning level of
    check_cutoff. A block moves the photon number by at most
    VACUUM_BLOCK_REACH, so that mass is bounded by the initial Poisson
    mass at or above cutoff - GUARD_LEVELS - 1.

    For small nbar the Poisson distribution is skewed and ten standard
    deviations are not enough, so the cutoff grows there.

    Args:
        nbar: Mean photon number (>= 0)

    Returns:
        The cutoff (highest Fock index kept)
    """
    cutoff = default_cutoff(nbar)
    if nbar == 0:
        return cutoff

    while (poisson.sf(cutoff, nbar) >= TAIL_TOLERANCE
           or poisson.sf(cutoff - GUARD_LEVELS - VACUUM_BLOCK_REACH, nbar)
           >= 0.01 * GUARD_THRESHOLD):
        cutoff += 1

    if cutoff != default_cutoff(nbar):
        logger.debug("raised cutoff from %d to %d for nbar = %g",
                     default_cutoff(nbar), cutoff, nbar)
    return cutoff


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """
    Fock amplitudes q_n = alpha^n / sqrt(n!) * exp(-|alpha|^2 / 2).

    The magnitudes are computed in log space so large n does not overflow.

    Args:
        alpha: Coherent amplitude (mean photon number is |alpha|^2)
        cutoff: Highest Fock index to keep

    Returns:
        Complex array q_0 .. q_cutoff

    Raises:
        CutoffTooSmallError: If the probability beyond the cutoff is >= 1e-12
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")

    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    amplitudes = np.zeros(cutoff + 1, dtype=complex)

    if nbar == 0.0:
        amplitudes[0] = 1.0
        return amplitudes

    tail_mass = float(poisson.sf(cutoff, nbar))
    if tail_mass >= TAIL_TOLERANCE:
        raise CutoffTooSmallError(cutoff, tail_mass, f"coherent field with nbar={nbar:g}")

    n = np.arange(cutoff + 1)
    log_magnitude = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * nbar
    amplitudes[:] = np.exp(log_magnitude) * np.exp(1j * n * np.angle(alpha))
    return amplitudes


def joint_index(pair: int, n: int, cutoff: int) -> int:
    """Position of |pair, n> in the joint amplitude vector."""
    return pair * (cutoff + 1) + n


@dataclass(eq=False)
class JointState:
    """
    Wavefunction of the qubit pair and the cavity field.

    Attributes:
        cutoff: Highest Fock index in the basis
        amplitudes: Complex vector of length 4 * (cutoff + 1)
    """
    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        """Check the vector length and normalization."""
        self.amplitudes = np.array(self.amplitudes, dtype=complex)
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")

        if self.amplitudes.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"cutoff {self.cutoff} needs {self.dimension} amplitudes, "
                f"got shape {self.amplitudes.shape}")

        norm = self.norm_squared()
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalizedError(f"joint state has squared norm {norm:.12g}")

    @property
    def dimension(self) -> int:
        """Length of the amplitude vector."""
        return 4 * (self.cutoff + 1)

    def norm_squared(self) -> float:
        """Return sum |amplitude|^2."""
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (qubit pair, Fock index)."""
        return self.amplitudes.reshape(4, self.cutoff + 1)

    def fock_populations(self) -> np.ndarray:
        """Photon-number distribution P(n) with the qubits traced out."""
        return np.sum(np.abs(self.as_matrix()) ** 2, axis=0)

    def mean_photon_number(self) -> float:
        """Return <a^dagger a>."""
        populations = self.fock_populations()
        return float(np.dot(np.arange(self.cutoff + 1), populations))

    def mean_excitation(self) -> float:
        """Return <N> for the conserved excitation number N."""
        weights = np.abs(self.amplitudes) ** 2
        return float(np.dot(excitation_numbers(self.cutoff), weights))

    def top_level_occupancy(self) -> float:
        """Probability in the guarded top Fock levels."""
        return float(top_level_occupancy(self.amplitudes, self.cutoff))

    def overlap(self, other: 'JointState') -> float:
        """Return |<self|other>|^2."""
        if other.cutoff != self.cutoff:
            raise DimensionMismatchError(
                f"cannot compare states with cutoffs {self.cutoff} and {other.cutoff}")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    @classmethod
    def basis_state(cls, pair: int, n: int, cutoff: int) -> 'JointState':
        """
        Create the basis state |pair, n>.

        Args:
            pair: Qubit-pair index (EE, EG, GE or GG)
            n: Photon number
            cutoff: Highest Fock index
        """
        amplitudes = np.zeros(4 * (cutoff + 1), dtype=complex)
        amplitudes[joint_index(pair, n, cutoff)] = 1.0
        return cls(cutoff, amplitudes)

    def __repr__(self) -> str:
        """Technical representation for debugging."""
        return (f"JointState(cutoff={self.cutoff}, "
                f"mean_photons={self.mean_photon_number():.4f})")


def top_level_occupancy(amplitudes: np.ndarray, cutoff: int) -> np.ndarray:
    """
    Probability in the guarded top Fock levels of one or many joint vectors.

    The guard covers the top GUARD_LEVELS levels but never levels 0..2,
    which the vacuum block reaches without any truncation error.

    Args:
        amplitudes: Array of shape (..., 4 * (cutoff + 1))
        cutoff: Highest Fock index

    Returns:
        Array of shape (...) with the guarded occupancy
    """
    amplitudes = np.asarray(amplitudes)
    first_guarded = max(VACUUM_BLOCK_REACH + 1, cutoff - GUARD_LEVELS + 1)
    by_level = np.abs(amplitudes.reshape(amplitudes.shape[:-1] + (4, cutoff + 1))) ** 2
    return np.sum(by_level[..., first_guarded:], axis=(-2, -1))


def check_cutoff(psi: Union[JointState, np.ndarray], cutoff: Optional[int] = None) -> None:
    """
    Guard against a cutoff that is too small for the state.

    Args:
        psi: A JointState, or a stack of amplitude vectors (then cutoff is needed)
        cutoff: Highest Fock index when psi is a raw array

    Raises:
        CutoffTooSmallError: If the guarded top Fock levels hold >= 1e-8
    """
    if isinstance(psi, JointState):
        amplitudes, cutoff = psi.amplitudes, psi.cutoff
    else:
        amplitudes = psi

    occupancy = float(np.max(top_level_occupancy(amplitudes, cutoff)))
    if occupancy >= GUARD_THRESHOLD:
        raise CutoffTooSmallError(cutoff, occupancy, "top Fock levels occupied")
    if occupancy >= 0.01 * GUARD_THRESHOLD:
        logger.warning("top Fock levels hold %.2e of the state at cutoff %d",
                       occupancy, cutoff)


def initial_joint_state(a: complex, b: complex, alpha: complex,
                        cutoff: Optional[int] = None) -> JointState:
    """
    Prepare (a|ee> + b|gg>) (x) sum_n q_n |n>.

    Args:
        a: Amplitude of |ee>
        b: Amplitude of |gg>
        alpha: Coherent amplitude of the cavity field
        cutoff: Highest Fock index, or None for auto_cutoff

    Returns:
        The normalized joint state

    Raises:
        NotNormalizedError: If |a|^2 + |b|^2 differs from 1 by more than 1e-10
        CutoffTooSmallError: If the coherent field does not fit the cutoff
    """
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NotNormalizedError(f"|a|^2 + |b|^2 = {norm:.12g}, expected 1")

    if cutoff is None:
        cutoff = auto_cutoff(abs(alpha) ** 2)
        logger.debug("automatic cutoff %d for |alpha|^2 = %g", cutoff, abs(alpha) ** 2)

    field = coherent_amplitudes(alpha, cutoff)
    amplitudes = np.zeros(4 * (cutoff + 1), dtype=complex)
    amplitudes[joint_index(EE, 0, cutoff):joint_index(EE, cutoff + 1, cutoff)] = a * field
    amplitudes[joint_index(GG, 0, cutoff):] = b * field
    return JointState(cutoff, amplitudes)


@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of the Hamiltonian.

    Attributes:
        R: Coupling ratio lambda_2 / lambda_1 (>= 0)
        E1: Charging energy of the first qubit (units of hbar * lambda_1)
        E2: Charging energy of the second qubit
        omega: Cavity frequency (units of lambda_1)
        resonant: True when E1 = E2 = omega / 2; only then is blockwise
            propagation allowed
    """
    R: float
    E1: float = 0.5
    E2: float = 0.5
    omega: float = 1.0
    resonant: bool = True

    def __post_init__(self):
        """Validate the coupling ratio and the resonance flag."""
        if not self.R >= 0:
            raise ValueError(f"coupling ratio R must be >= 0, got {self.R}")
        if self.resonant and not self.energies_resonant():
            raise NotResonantError(
                f"resonant flag set but E1={self.E1}, E2={self.E2}, omega={self.omega}")

    def energies_resonant(self) -> bool:
        """Check whether E1 = E2 = omega / 2."""
        half = 0.5 * self.omega
        return (abs(self.E1 - half) <= RESONANCE_TOLERANCE and
                abs(self.E2 - half) <= RESONANCE_TOLERANCE)

    @classmethod
    def from_energies(cls, R: float, omega: float = 1.0, E1: Optional[float] = None,
                      E2: Optional[float] = None) -> 'ModelParams':
        """
        Build parameters and set the resonance flag from the energies.

        Missing charging energies default to omega / 2.
        """
        E1 = 0.5 * omega if E1 is None else E1
        E2 = 0.5 * omega if E2 is None else E2
        trial = cls(R, E1, E2, omega, resonant=False)
        return cls(R, E1, E2, omega, resonant=trial.energies_resonant())


def annihilation_operator(cutoff: int) -> np.ndarray:
    """Truncated field operator a with a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)


def excitation_numbers(cutoff: int) -> np.ndarray:
    """
    Diagonal of N = a^dagger a + (sigma_z + tau_z) / 2 + 1.

    |ee,n> carries n + 2, |eg,n> and |ge,n> carry n + 1, |gg,n> carries n.
    """
    photons = np.arange(cutoff + 1)
    return np.concatenate([photons + 2, photons + 1, photons + 1, photons]).astype(float)


def excitation_operator(cutoff: int) -> np.ndarray:
    """The conserved excitation number N as a diagonal matrix."""
    return np.diag(excitation_numbers(cutoff)).astype(complex)


def build_hamiltonian(params: ModelParams, cutoff: int,
                      interaction_picture: bool = False) -> np.ndarray:
    """
    Build the rotating-wave Hamiltonian on the truncated joint space.

    H = omega (a^dagger a + 1/2) + E1 sigma_z + E2 tau_z
        + (a sigma_1^+ + a^dagger sigma_1^-) + R (a sigma_2^+ + a^dagger sigma_2^-)

    Args:
        params: Model parameters
        cutoff: Highest Fock index
        interaction_picture: Drop the free terms (valid at exact resonance,
            where they commute with the coupling)

    Returns:
        Hermitian matrix of dimension 4 * (cutoff + 1)
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")

    field_identity = np.eye(cutoff + 1, dtype=complex)
    a = annihilation_operator(cutoff)
    a_dag = a.conj().T

    def on_first(qubit_op, field_op):
        return np.kron(np.kron(qubit_op, IDENTITY_2), field_op)

    def on_second(qubit_op, field_op):
        return np.kron(np.kron(IDENTITY_2, qubit_op), field_op)

    hamiltonian = (on_first(SIGMA_PLUS, a) + on_first(SIGMA_MINUS, a_dag) +
                   params.R * (on_second(SIGMA_PLUS, a) + on_second(SIGMA_MINUS, a_dag)))

    if not interaction_picture:
        number = a_dag @ a + 0.5 * field_identity
        hamiltonian = hamiltonian + params.omega * np.kron(np.eye(4), number)
        hamiltonian = hamiltonian + params.E1 * on_first(PAULI_Z, field_identity)
        hamiltonian = hamiltonian + params.E2 * on_second(PAULI_Z, field_identity)

    return hamiltonian


def _as_times(times: Times) -> np.ndarray:
    """Return times as a 1-D float array."""
    return np.atleast_1d(np.asarray(times, dtype=float))


class FullPropagator:
    """
    Evolves states by diagonalizing the full truncated Hamiltonian once.

    At resonance the interaction picture is used so the result can be
    compared directly with BlockPropagator.
    """

    def __init__(self, params: ModelParams, cutoff: int):
        """
        Diagonalize the Hamiltonian for these parameters.

        Args:
            params: Model parameters
            cutoff: Highest Fock index
        """
        self.params = params
        self.cutoff = cutoff
        hamiltonian = build_hamiltonian(params, cutoff, interaction_picture=params.resonant)
        self.eigenvalues, self.eigenvectors = hermitian_eigensystem(hamiltonian)
        logger.debug("full propagator ready: dimension %d, R=%g", len(self.eigenvalues), params.R)

    def evolve_grid(self, psi0: JointState, times: Times) -> np.ndarray:
        """
        Evolve psi0 to every time in the grid.

        Args:
            psi0: Initial state (same cutoff as the propagator)
            times: Scaled times

        Returns:
            Array of shape (len(times), dimension); row k is psi(times[k])
        """
        _check_same_cutoff(psi0, self.cutoff)
        times = _as_times(times)
        coefficients = self.eigenvectors.conj().T @ psi0.amplitudes
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        states = (phases * coefficients) @ self.eigenvectors.T
        states[times == 0.0] = psi0.amplitudes
        return states

    def evolve(self, psi0: JointState, t: float) -> JointState:
        """Evolve psi0 to a single time t."""
        return JointState(self.cutoff, self.evolve_grid(psi0, [t])[0])


@lru_cache(maxsize=8)
def full_propagator(params: ModelParams, cutoff: int) -> FullPropagator:
    """Shared FullPropagator for a parameter set (eigensystem computed once)."""
    return FullPropagator(params, cutoff)


def evolve_full(psi0: JointState, params: ModelParams, t: float) -> JointState:
    """
    Compute psi(t) = exp(-iHt) psi0 by full diagonalization.

    Args:
        psi0: Initial state
        params: Model parameters (resonant runs use the interaction picture)
        t: Scaled time lambda_1 * t

    Returns:
        The evolved state
    """
    return full_propagator(params, psi0.cutoff).evolve(psi0, t)


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    """
    Eigen-data of one invariant block (|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>).

    Attributes:
        n: Block index
        gamma: sqrt(n + 1)
        beta: sqrt(n + 2)
        delta: (1 + R^2)(gamma^2 + beta^2)
        Delta: (1 - R^2) beta gamma
        mu: Larger squared block frequency
        nu: Smaller squared block frequency
        matrix: The 4x4 block
        eigenvalues: Block eigenvalues, ascending ({-sqrt(mu), -sqrt(nu), sqrt(nu), sqrt(mu)})
        eigenvectors: Orthonormal eigenvectors as columns
    """
    n: int
    gamma: float
    beta: float
    delta: float
    Delta: float
    mu: float
    nu: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def block_matrix(n: int, R: float) -> np.ndarray:
    """
    The resonant interaction restricted to block n.

    Couplings: ee-eg = R gamma, ee-ge = gamma, eg-gg = beta, ge-gg = R beta.
    For the edge blocks n = -1, -2 the missing partners have zero coupling.
    """
    gamma = math.sqrt(max(n + 1, 0))
    beta = math.sqrt(max(n + 2, 0))
    block = np.zeros((4, 4))
    block[0, 1] = block[1, 0] = R * gamma
    block[0, 2] = block[2, 0] = gamma
    block[1, 3] = block[3, 1] = beta
    block[2, 3] = block[3, 2] = R * beta
    return block


def block_spectrum(n: int, R: float) -> BlockSpectrum:
    """
    Diagonalize block n and compute its analytic invariants.

    mu, nu = (delta +- sqrt(delta^2 - 4 Delta^2)) / 2 are the squared
    frequencies of the block; the block eigenvalues are +-sqrt(mu), +-sqrt(nu).

    Args:
        n: Block index (>= 0)
        R: Coupling ratio

    Returns:
        The block's BlockSpectrum
    """
    if n < 0:
        raise ValueError(f"block index must be >= 0, got {n}")

    gamma = math.sqrt(n + 1)
    beta = math.sqrt(n + 2)
    delta = (1 + R ** 2) * (gamma ** 2 + beta ** 2)
    Delta = (1 - R ** 2) * beta * gamma
    # delta^2 >= 4 Delta^2 always; clamp round-off only
    root = math.sqrt(max(delta ** 2 - 4 * Delta ** 2, 0.0))
    mu = 0.5 * (delta + root)
    nu = 0.5 * (delta - root)

    matrix = block_matrix(n, R)
    eigenvalues, eigenvectors = hermitian_eigensystem(matrix)
    return BlockSpectrum(n, gamma, beta, delta, Delta, mu, nu,
                         matrix, eigenvalues, eigenvectors)


@dataclass
class BlockCoefficients:
    """
    Amplitudes of one block at one time.

    A, B, C, D belong to |ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2> and already
    include the coherent-field weights. Slots outside the truncated basis
    (edge blocks n = -2, -1 and blocks at the cutoff) stay 0.
    """
    n: int
    A: complex = 0j
    B: complex = 0j
    C: complex = 0j
    D: complex = 0j

    def norm_squared(self) -> float:
        """Return |A|^2 + |B|^2 + |C|^2 + |D|^2."""
        return abs(self.A) ** 2 + abs(self.B) ** 2 + abs(self.C) ** 2 + abs(self.D) ** 2


@dataclass(frozen=True, eq=False)
class _Block:
    """One block as used by BlockPropagator (slots kept inside the cutoff)."""
    n: int
    slots: Tuple[int, ...]
    indices: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class BlockPropagator:
    """
    Evolves states block by block at exact resonance.

    The blocks n = -2 .. cutoff partition the truncated joint basis. Blocks
    whose states run past the cutoff are truncated the same way the full
    Hamiltonian is, so both propagators describe the same model.
    """

    def __init__(self, params: ModelParams, cutoff: int):
        """
        Diagonalize every block.

        Args:
            params: Model parameters (must be resonant)
            cutoff: Highest Fock index

        Raises:
            NotResonantError: If the parameters are detuned
        """
        if not params.resonant:
            raise NotResonantError("blockwise propagation needs E1 = E2 = omega / 2")

        self.params = params
        self.cutoff = cutoff
        self.blocks: List[_Block] = []

        for n in range(FIRST_BLOCK, cutoff + 1):
            slots = tuple(slot for slot, (_, offset) in enumerate(BLOCK_SLOTS)
                          if 0 <= n + offset <= cutoff)
            indices = np.array([joint_index(BLOCK_SLOTS[slot][0], n + BLOCK_SLOTS[slot][1], cutoff)
                                for slot in slots])

            if len(slots) == 4:
                spectrum = block_spectrum(n, params.R)
                eigenvalues, eigenvectors = spectrum.eigenvalues, spectrum.eigenvectors
            else:
                sub_block = block_matrix(n, params.R)[np.ix_(slots, slots)]
                eigenvalues, eigenvectors = hermitian_eigensystem(sub_block)

            self.blocks.append(_Block(n, slots, indices, eigenvalues, eigenvectors))

        logger.debug("block propagator ready: %d blocks, R=%g", len(self.blocks), params.R)

    def evolve_grid(self, psi0: JointState, times: Times) -> np.ndarray:
        """
        Evolve psi0 to every time in the grid.

        Args:
            psi0: Initial state (same cutoff as the propagator)
            times: Scaled times

        Returns:
            Array of shape (len(times), dimension); row k is psi(times[k])
        """
        _check_same_cutoff(psi0, self.cutoff)
        times = _as_times(times)
        states = np.zeros((len(times), psi0.dimension), dtype=complex)

        for block in self.blocks:
            start = psi0.amplitudes[block.indices]
            if not np.any(start):
                continue
            coefficients = block.eigenvectors.conj().T @ start
            phases = np.exp(-1j * np.outer(times, block.eigenvalues))
            states[:, block.indices] = (phases * coefficients) @ block.eigenvectors.T

        states[times == 0.0] = psi0.amplitudes
        return states

    def evolve(self, psi0: JointState, t: float) -> JointState:
        """Evolve psi0 to a single time t."""
        return JointState(self.cutoff, self.evolve_grid(psi0, [t])[0])

    def coefficients(self, psi0: JointState, t: float) -> List[BlockCoefficients]:
        """
        Block amplitudes A_n, B_n, C_n, D_n of psi(t), one entry per block.

        Args:
            psi0: Initial state
            t: Scaled time

        Returns:
            BlockCoefficients for n = -2 .. cutoff
        """
        state = self.evolve_grid(psi0, [t])[0]
        result = []
        for block in self.blocks:
            values = [0j, 0j, 0j, 0j]
            for slot, index in zip(block.slots, block.indices):
                values[slot] = complex(state[index])
            result.append(BlockCoefficients(block.n, *values))
        return result


@lru_cache(maxsize=8)
def block_propagator(params: ModelParams, cutoff: int) -> BlockPropagator:
    """Shared BlockPropagator for a parameter set."""
    return BlockPropagator(params, cutoff)


def evolve_blockwise(a: complex, b: complex, alpha: complex, params: ModelParams,
                     t: float, cutoff: Optional[int] = None
                     ) -> Tuple[JointState, List[BlockCoefficients]]:
    """
    Evolve (a|ee> + b|gg>) (x) coherent field block by block.

    Block n starts with a*q_n on |ee,n> and b*q_{n+2} on |gg,n+2>; the edge
    pieces b*q_0|gg,0> (stationary) and b*q_1|gg,1> (a 3-state block) are
    treated exactly.

    Args:
        a: Amplitude of |ee>
        b: Amplitude of |gg>
        alpha: Coherent amplitude
        params: Resonant model parameters
        t: Scaled time
        cutoff: Highest Fock index, or None for auto_cutoff

    Returns:
        Tuple of (evolved state, block coefficients)

    Raises:
        NotResonantError: If the parameters are not resonant
    """
    if not params.resonant:
        raise NotResonantError("blockwise propagation needs E1 = E2 = omega / 2")

    psi0 = initial_joint_state(a, b, alpha, cutoff)
    propagator = block_propagator(params, psi0.cutoff)
    return propagator.evolve(psi0, t), propagator.coefficients(psi0, t)


def _check_same_cutoff(psi: JointState, cutoff: int) -> None:
    """Raise DimensionMismatchError if psi was built for another cutoff."""
    if psi.cutoff != cutoff:
        raise DimensionMismatchError(
            f"state has cutoff {psi.cutoff} but propagator was built for {cutoff}")


if __name__ == "__main__":
    # Example usage: compare the two propagators for one state
    params = ModelParams(R=0.9)
    psi0 = initial_joint_state(1.0, 0.0, math.sqrt(20.0))
    print(f"Initial state: {psi0}")

    for t in (1.0, 5.0, 10.0):
        full = evolve_full(psi0, params, t)
        blockwise, coefficients = evolve_blockwise(1.0, 0.0, math.sqrt(20.0), params, t)
        print(f"t={t:5.1f}  overlap={full.overlap(blockwise):.12f}  "
              f"<N>={full.mean_excitation():.6f}")

    spectrum = block_spectrum(0, 1.0)
    print(f"\nBlock n=0 at R=1: eigenvalues {np.round(spectrum.eigenvalues, 6)}")
