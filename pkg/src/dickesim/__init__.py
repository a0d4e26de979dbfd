"""Simulator for the generalized N-atom single-mode Dicke model.

Covers exact diagonalization of the spin-boson Hamiltonian, coherent-state
initial conditions at fixed total energy, atomic linear entropy dynamics,
the atomic (spin) Wigner function on the Bloch sphere, and the classical
limit with Poincare sections.
"""

__version__ = "0.1.0"
