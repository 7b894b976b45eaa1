import math

import numpy as np
import pytest

from conftest import random_unitary
from hamcert.encoding import bell_prep, bell_state, hae_signal_amplitude, marking_unitary, signal_from_unitary
from hamcert.evolution import EvolutionOracle, choose_trotter_steps
from hamcert.hamiltonians import PauliHamiltonian, random_hamiltonian, remainder_R, residual
from hamcert.linalg import operator_norm
from hamcert.pauli import PauliString, all_paulis, pauli_coefficients


def test_bell_prep_one_qubit():
    np.testing.assert_allclose(bell_prep(1), np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert np.linalg.norm(bell_prep(3)) == pytest.approx(1.0, abs=1e-15)


def test_bell_basis_orthonormal():
    states = np.array([bell_state(p) for p in all_paulis(2)])
    np.testing.assert_allclose(states.conj() @ states.T, np.eye(16), atol=1e-12)


def test_marking_unitary():
    V = marking_unitary(1)
    zero = np.array([1, 0])
    one = np.array([0, 1])
    np.testing.assert_allclose(V @ np.kron(zero, bell_prep(1)), np.kron(zero, bell_prep(1)), atol=1e-15)
    phx = bell_state(PauliString.from_label("X"))
    np.testing.assert_allclose(V @ np.kron(zero, phx), np.kron(one, phx), atol=1e-15)
    np.testing.assert_allclose(V @ V, np.eye(8), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bell_dispersion(n, rng):
    U = random_unitary(n, rng)
    state = np.kron(U, np.eye(1 << n)) @ bell_prep(n)
    c = pauli_coefficients(U)
    paulis = list(all_paulis(n))
    if n == 3:
        paulis = [paulis[i] for i in rng.choice(len(paulis), 20, replace=False)]
    for p in paulis:
        assert abs(np.vdot(bell_state(p), state) - c[p.x, p.z]) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_modes_agree(n, rng):
    U = random_unitary(n, rng)
    p1a, p0a = signal_from_unitary(U, "pauli")
    p1b, p0b = signal_from_unitary(U, "statevector")
    assert p1a == pytest.approx(p1b, abs=1e-12)
    assert abs(p0a - p0b) < 1e-12
    assert p1a**2 + abs(p0a) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_zero_residual_below_trotter_bound(rng):
    H0 = random_hamiltonian(2, 3, 1.0, seed=rng)
    res = hae_signal_amplitude(H0, EvolutionOracle(H0), 0.2, 50, m0=6, B0=2.0)
    assert res.p1 <= res.trotter_bound + 1e-12
    assert math.isnan(hae_signal_amplitude(H0, EvolutionOracle(H0), 0.2, 1).trotter_bound)


def test_single_residual_closed_form():
    s, t = 0.3, 0.8
    H0 = PauliHamiltonian.from_labels({"XI": 0.4}, 1.0)
    H = PauliHamiltonian.from_labels({"XI": 0.4, "IZ": s}, 1.0)   # commutes with H0
    res = hae_signal_amplitude(H0, EvolutionOracle(H), t, 1, "statevector")
    assert res.p1 == pytest.approx(abs(math.sin(s * t)), abs=1e-12)


def test_signal_sandwich(rng):
    m, B = 2, 1.0
    m0, B0 = 2 * m, 2 * B
    t = 1 / (2 * m0**1.5 * B0)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        H0 = random_hamiltonian(n, m, B, seed=rng)
        H = random_hamiltonian(n, m, B, seed=rng)
        s = residual(H, H0)
        r = choose_trotter_steps(m0, B0, operator_norm(H0.to_dense()), t, 1e-4)
        hae = hae_signal_amplitude(H0, EvolutionOracle(H), t, r, m0=m0, B0=B0)
        eps_t = s.S * hae.trotter_bound / B0
        R = remainder_R(m0, s.S, t).value
        norm = s.coefficient_norm(2)
        lower = norm * t - math.sqrt(m0) * R - eps_t
        upper = math.sqrt(np.sum((np.abs(s.coefficients) * t + R) ** 2) + (m0 - s.m) * R**2) + eps_t
        assert lower - 1e-12 <= hae.p1 <= upper + 1e-12
