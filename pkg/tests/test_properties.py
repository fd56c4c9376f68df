"""
Property-based tests with random states and parameters.

Runs standalone: python -m unittest tests.test_properties
"""

import unittest
import sys
import os
import math

import numpy as np
from hypothesis import given, settings, strategies as st

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from quantum_core import (
    QubitPairDensity, partial_trace_field, von_neumann_entropy
)
from observables import (
    BlochDecomposition, bloch_decomposition, bloch_reconstruct, entangled_dyadic,
    degree_of_entanglement, channel_capacity
)
from dynamics import ModelParams, FullPropagator, BlockPropagator
from tests.helpers import (
    random_density, random_unitary, random_rotation, random_joint_state
)


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
ratios = st.floats(min_value=0.0, max_value=1.5)
times = st.floats(min_value=0.0, max_value=30.0)
cutoffs = st.integers(min_value=0, max_value=8)

QUICK = settings(max_examples=40, deadline=None)


class TestStateProperties(unittest.TestCase):
    """Properties of two-qubit states and their decomposition."""

    @QUICK
    @given(seed=seeds)
    def test_reconstruction_round_trip(self, seed):
        """Decompose then rebuild gives the state back."""
        matrix = random_density(4, np.random.default_rng(seed))
        decomposition = bloch_decomposition(QubitPairDensity(matrix))
        self.assertLessEqual(decomposition.s_length, 1 + 1e-9)
        self.assertLessEqual(decomposition.t_length, 1 + 1e-9)
        rebuilt = bloch_reconstruct(decomposition)
        self.assertLess(np.max(np.abs(rebuilt.matrix - matrix)), 1e-10)

    @QUICK
    @given(seed=seeds)
    def test_doe_local_rotation_invariance(self, seed):
        """Rotating each qubit's frame leaves the DoE unchanged."""
        rng = np.random.default_rng(seed)
        decomposition = bloch_decomposition(QubitPairDensity(random_density(4, rng)))
        first, second = random_rotation(rng), random_rotation(rng)
        rotated = BlochDecomposition(first @ decomposition.s, second @ decomposition.t,
                                     first @ decomposition.C @ second.T)
        before = degree_of_entanglement(entangled_dyadic(decomposition))
        after = degree_of_entanglement(entangled_dyadic(rotated))
        self.assertLess(abs(before - after), 1e-10)

    @QUICK
    @given(seed=seeds, dimension=st.sampled_from([2, 4]))
    def test_entropy_unitary_invariance(self, seed, dimension):
        """S(U rho U^dagger) = S(rho)."""
        rng = np.random.default_rng(seed)
        matrix = random_density(dimension, rng)
        unitary = random_unitary(dimension, rng)
        rotated = unitary @ matrix @ unitary.conj().T
        self.assertLess(abs(von_neumann_entropy(matrix) - von_neumann_entropy(rotated)), 1e-10)

    @QUICK
    @given(seed=seeds)
    def test_capacity_bounds(self, seed):
        """0 <= capacity <= 2 for every two-qubit state."""
        capacity = channel_capacity(QubitPairDensity(random_density(4, np.random.default_rng(seed))))
        self.assertGreaterEqual(capacity, -1e-10)
        self.assertLessEqual(capacity, 2 + 1e-10)

    @QUICK
    @given(seed=seeds, cutoff=cutoffs)
    def test_partial_trace_brute_force(self, seed, cutoff):
        """The field trace matches summing the full density matrix over Fock levels."""
        psi = random_joint_state(cutoff, np.random.default_rng(seed))
        full = np.outer(psi.amplitudes, psi.amplitudes.conj())
        by_axes = full.reshape(4, cutoff + 1, 4, cutoff + 1)
        expected = sum(by_axes[:, n, :, n] for n in range(cutoff + 1))
        self.assertLess(np.max(np.abs(partial_trace_field(psi).matrix - expected)), 1e-12)


class TestEvolutionProperties(unittest.TestCase):
    """Properties of the two propagators on random states."""

    @QUICK
    @given(seed=seeds, cutoff=st.integers(min_value=0, max_value=6), R=ratios, t=times)
    def test_propagators_agree(self, seed, cutoff, R, t):
        """Blockwise and full evolution give the same state."""
        psi0 = random_joint_state(cutoff, np.random.default_rng(seed))
        params = ModelParams(R=R)
        blockwise = BlockPropagator(params, cutoff).evolve(psi0, t)
        full = FullPropagator(params, cutoff).evolve(psi0, t)
        self.assertLess(np.max(np.abs(blockwise.amplitudes - full.amplitudes)), 1e-9)

    @QUICK
    @given(seed=seeds, cutoff=st.integers(min_value=0, max_value=6), R=ratios, t=times)
    def test_conservation(self, seed, cutoff, R, t):
        """Norm and excitation number are conserved."""
        psi0 = random_joint_state(cutoff, np.random.default_rng(seed))
        psi = BlockPropagator(ModelParams(R=R), cutoff).evolve(psi0, t)
        self.assertLess(abs(psi.norm_squared() - 1.0), 1e-10)
        self.assertLess(abs(psi.mean_excitation() - psi0.mean_excitation()), 1e-9)


if __name__ == '__main__':
    unittest.main()
