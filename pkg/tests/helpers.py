"""
Shared helpers for the test suites: random states and reference states.

All random objects come from a numpy Generator so a test can reproduce
them from a seed.
"""

import sys
import os

import numpy as np
from scipy.stats import unitary_group, special_ortho_group

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dynamics import JointState


def bell_matrix() -> np.ndarray:
    """Projector on (|ee> + |gg>)/sqrt(2)."""
    matrix = np.zeros((4, 4), dtype=complex)
    matrix[0, 0] = matrix[0, 3] = matrix[3, 0] = matrix[3, 3] = 0.5
    return matrix


def projector(index: int, dimension: int = 4) -> np.ndarray:
    """Projector on a basis state."""
    matrix = np.zeros((dimension, dimension), dtype=complex)
    matrix[index, index] = 1.0
    return matrix


def random_vector(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex Gaussian vector."""
    vector = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
    return vector / np.linalg.norm(vector)


def random_density(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix G G^dagger / tr."""
    g = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    matrix = g @ g.conj().T
    return matrix / np.trace(matrix).real


def random_hermitian(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix."""
    g = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    return 0.5 * (g + g.conj().T)


def random_unitary(dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary."""
    return unitary_group.rvs(dimension, random_state=rng)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Random 3-D rotation matrix."""
    return special_ortho_group.rvs(3, random_state=rng)


def random_joint_state(cutoff: int, rng: np.random.Generator) -> JointState:
    """Random normalized joint state with the given cutoff."""
    return JointState(cutoff, random_vector(4 * (cutoff + 1), rng))


def product_pure_pair(rng: np.random.Generator) -> np.ndarray:
    """Random pure product state of two qubits as a 4x4 matrix."""
    vector = np.kron(random_vector(2, rng), random_vector(2, rng))
    return np.outer(vector, vector.conj())
