"""Integrability obstructions for natural Hamiltonians with degree-zero homogeneous potentials."""

__version__ = "0.1.0"
