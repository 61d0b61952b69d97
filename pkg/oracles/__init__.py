"""
Independent reference implementations for the dmrg-lab test suite.

Each oracle recomputes a quantity the library produces, by a route that shares no code
with the module it checks. Not public API.

Dependencies:
- numpy: Arrays and the Gauss-Hermite nodes.
- scipy: Adaptive quadrature for the free-fermion integral.
"""

from .eig_bisection import charpoly_eigenvalues
from .free_fermion import tfim_energy_density_exact
from .gaussian_oracle import two_oscillator_reduced_spectrum
from .ising_oracle import FIVE_BY_FIVE_FREE_COUNTS, PINNED_Z, bond_energy_counts, ising_brute_force_z
from .ed_oracle import tfim_bitstring_hamiltonian
from .report import OracleReport

__all__ = [
    "FIVE_BY_FIVE_FREE_COUNTS",
    "PINNED_Z",
    "OracleReport",
    "bond_energy_counts",
    "charpoly_eigenvalues",
    "ising_brute_force_z",
    "tfim_bitstring_hamiltonian",
    "tfim_energy_density_exact",
    "two_oscillator_reduced_spectrum",
]
