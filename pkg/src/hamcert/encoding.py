"""Hamiltonian amplitude encoding: Bell preparation, marking unitary, signal amplitude."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .evolution import EvolutionOracle, trotter_u2, worst_case_trotter_coefficient
from .hamiltonians import PauliHamiltonian
from .linalg import operator_norm
from .pauli import DENSE_MAX_QUBITS, PauliString, pauli_coefficients, qubit_count, to_dense


def _check_size(qubits: int):
    if qubits > DENSE_MAX_QUBITS:
        raise ResourceError(f"{qubits}-qubit state exceeds the dense ceiling {DENSE_MAX_QUBITS}")


def bell_prep(n: int) -> np.ndarray:
    """|Phi+> on 2n qubits: amplitude 2^(-n/2) on every |j>|j>."""
    _check_size(2 * n)
    d = 1 << n
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * d + np.arange(d)] = 1 / math.sqrt(d)
    return psi


def bell_state(alpha: PauliString) -> np.ndarray:
    """|Phi_alpha> = (P_alpha (x) I)|Phi+>."""
    d = 1 << alpha.n
    return np.kron(to_dense(alpha), np.eye(d)) @ bell_prep(alpha.n)


def marking_unitary(n: int) -> np.ndarray:
    """V = I (x) |Phi+><Phi+| + X (x) (I - |Phi+><Phi+|), ancilla first."""
    _check_size(2 * n + 1)
    phi = bell_prep(n)
    proj = np.outer(phi, phi.conj())
    rest = np.eye(phi.size) - proj
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return np.kron(np.eye(2), proj) + np.kron(x, rest)


@dataclass(frozen=True)
class HaeResult:
    p1: float
    p0_complex: complex
    trotter_bound: float


def signal_from_unitary(U: np.ndarray, mode: str = "pauli") -> tuple[float, complex]:
    """(p1, p0) read from U, either via its Pauli coefficients or the literal circuit."""
    n = qubit_count(U.shape[0])
    if mode == "pauli":
        c = pauli_coefficients(U)
        p0 = complex(c[0, 0])
        flat = np.abs(c.ravel()) ** 2
        return float(math.sqrt(flat[1:].sum())), p0
    if mode == "statevector":
        _check_size(2 * n + 1)
        d = 1 << n
        phi = bell_prep(n)
        branch = np.kron(U, np.eye(d)) @ phi           # ancilla starts in |0>
        state = marking_unitary(n) @ np.concatenate([branch, np.zeros_like(branch)])
        half = d * d
        return float(np.linalg.norm(state[half:])), complex(np.vdot(phi, state[:half]))
    raise ValueError(f"unknown mode {mode!r}")


def hae_signal_amplitude(H0: PauliHamiltonian, oracle: EvolutionOracle, t: float, r: int,
                         mode: str = "pauli", *, m0: int | None = None,
                         B0: float | None = None) -> HaeResult:
    """Signal amplitude of the encoding circuit built on the r-step Trotter unitary.

    ``trotter_bound`` is the certifier-side worst-case Trotter error using
    S <= B0; it is NaN unless both ``m0`` and ``B0`` are given.
    """
    U = trotter_u2(H0, oracle, t, r)
    p1, p0 = signal_from_unitary(U, mode)
    if m0 is not None and B0 is not None:
        norm_h0 = operator_norm(H0.to_dense())
        bound = B0 * worst_case_trotter_coefficient(m0, B0, norm_h0, t) / r**2
    else:
        bound = math.nan
    return HaeResult(p1, p0, bound)
