"""Alternating-unitary approximation of adiabatic transformation.

Dense exact-diagonalization toolkit: Hamiltonian families, adiabatic gauge
potentials, the alternating-unitary transfer, a reference adiabatic
propagator and a sweep harness.
"""

__version__ = "0.1.0"
