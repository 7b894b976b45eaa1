"""Stabilizer Bernoulli sampling and its Hamiltonian variant."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .evolution import Cost, EvolutionOracle, TimeLedger, trotter_u2
from .hamiltonians import PauliHamiltonian, remainder_R
from .pauli import PauliString, pauli_coefficients, to_dense
from .stabilizer import MaximalStabilizerGroup, Syndrome, stabilizer_state, syndrome_distribution


@dataclass(frozen=True)
class SbsOutcome:
    z: int
    theta: PauliString
    syndrome: Syndrome


class SbsTable:
    """Exact syndrome distributions of U P_theta |psi0> for every representative theta.

    ``table[theta, s]`` is the probability of observing syndrome value s after
    preparing the representative with syndrome value theta.
    """

    def __init__(self, U: np.ndarray, G: MaximalStabilizerGroup):
        psi0 = stabilizer_state(G)
        self.group = G
        self.reps = G.representatives()
        self.table = np.array([syndrome_distribution(U @ (to_dense(p) @ psi0), G) for p in self.reps])
        self._cdf = np.cumsum(self.table, axis=1)
        self._cdf[:, -1] = 1.0

    def signal_probability(self) -> float:
        """Average over theta of Pr(observed syndrome != sigma(theta))."""
        return float(1.0 - np.mean(np.diag(self.table)))

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized draws of (theta value, observed syndrome value)."""
        thetas = rng.integers(len(self.reps), size=size)
        u = rng.random(size)
        observed = (u[:, None] >= self._cdf[thetas]).sum(axis=1)
        return thetas, observed

    def outcome(self, theta: int, observed: int) -> SbsOutcome:
        n = self.group.n
        return SbsOutcome(int(observed != theta), self.reps[theta], Syndrome(n, int(observed)))


def sbs_sample(U: np.ndarray, G: MaximalStabilizerGroup, rng: np.random.Generator,
               ledger: TimeLedger | None = None) -> SbsOutcome:
    """One run of stabilizer Bernoulli sampling; Z = 1 iff the syndrome moved."""
    table = SbsTable(U, G)
    theta, observed = table.sample(rng, 1)
    if ledger is not None:
        ledger.charge(measurements=1)
    return table.outcome(int(theta[0]), int(observed[0]))


def sbs_signal_probability_exact(U: np.ndarray, G: MaximalStabilizerGroup) -> float:
    """Squared l2 mass of the Pauli coefficients of U outside G."""
    c = pauli_coefficients(U)
    return float(np.sum(np.abs(c[~G.membership_mask()]) ** 2))


def sbs_signal_probability_enumerated(U: np.ndarray, G: MaximalStabilizerGroup) -> float:
    """Same quantity from the sampling procedure: all thetas, exact syndrome statistics."""
    return SbsTable(U, G).signal_probability()


def hss_sample(G: MaximalStabilizerGroup, H0: PauliHamiltonian, oracle: EvolutionOracle,
               t: float, r: int, rng: np.random.Generator) -> SbsOutcome:
    U = trotter_u2(H0, oracle, t, r)
    return sbs_sample(U, G, rng, ledger=oracle.ledger)


def hss_signal_probability_exact(G: MaximalStabilizerGroup, H0: PauliHamiltonian,
                                 oracle: EvolutionOracle, t: float, r: int) -> float:
    return sbs_signal_probability_exact(trotter_u2(H0, oracle, t, r), G)


class SignalBounds(NamedTuple):
    lower: float
    upper: float


def hss_signal_bounds(G: MaximalStabilizerGroup, H_res: PauliHamiltonian, t: float, m0: int,
                      eps_diamond: float) -> SignalBounds:
    """Verification-side bounds on Pr(Z=1), needing the residual explicitly.

    lower = max(||s[S cap X]|| t - sqrt(m0) R, 0)^2 - eps
    upper = sum_{S cap X} (|s| t + R)^2 + (m0 - |S cap X|) R^2 + eps
    with X the complement of G.
    """
    R = remainder_R(m0, H_res.S, t).value
    outside = np.array([c for p, c in H_res.terms.items() if not G.contains(p)])
    lin = float(np.linalg.norm(outside)) * t - math.sqrt(m0) * R
    lower = max(lin, 0.0) ** 2 - eps_diamond
    upper = float(np.sum((np.abs(outside) * t + R) ** 2)) + (m0 - outside.size) * R**2 + eps_diamond
    return SignalBounds(lower, upper)


class HssBernoulliSource:
    """Bit source for BernoulliTest backed by repeated HSS runs.

    Every run of the sampling circuit is an independent Bernoulli trial with
    the same exact success probability, so batches are drawn as binomial
    counts.  Each drawn sample charges one circuit's oracle cost plus one
    measurement to the oracle's ledger.
    """

    def __init__(self, G: MaximalStabilizerGroup, H0: PauliHamiltonian, oracle: EvolutionOracle,
                 t: float, r: int, rng: np.random.Generator):
        with oracle.deferred_charges() as scratch:
            self.p = hss_signal_probability_exact(G, H0, oracle, t, r)
        self.cost_per_sample = scratch.snapshot() + Cost(measurements=1)
        self._ledger = oracle.ledger
        self._rng = rng

    def draw_counts(self, batch: int, n_batches: int) -> np.ndarray:
        self._ledger.charge_cost(self.cost_per_sample, batch * n_batches)
        return self._rng.binomial(batch, min(max(self.p, 0.0), 1.0), size=n_batches)
