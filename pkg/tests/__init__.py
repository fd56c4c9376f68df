"""Unit tests for the qubit-pair cavity simulator."""
