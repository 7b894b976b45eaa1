"""Certify an unknown Hamiltonian against a target from black-box time evolution."""
from .certify import CertificationReport, certify_pauli_norm, certify_schatten_norm, chc, rchc, shc
from .evolution import EvolutionOracle, TimeLedger, trotter_u2
from .hamiltonians import PauliHamiltonian, random_hamiltonian, residual
from .pauli import PauliString, PauliVector, pauli_decompose, pauli_multiply, symplectic_product
from .stabilizer import MaximalStabilizerGroup, syndrome

__version__ = "0.1.0"

__all__ = [
    "CertificationReport", "EvolutionOracle", "MaximalStabilizerGroup", "PauliHamiltonian",
    "PauliString", "PauliVector", "TimeLedger", "certify_pauli_norm", "certify_schatten_norm",
    "chc", "pauli_decompose", "pauli_multiply", "random_hamiltonian", "rchc", "residual", "shc",
    "symplectic_product", "syndrome", "trotter_u2",
]
