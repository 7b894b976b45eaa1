"""Exact outcome distributions of oracle experiments, TV bounds, and scaling fits."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.stats import unitary_group

from .errors import DimensionError, NormalizationError, ResourceError
from .hamiltonians import PauliHamiltonian, random_hamiltonian
from .linalg import hermitian_expm, operator_norm
from .pauli import DENSE_MAX_QUBITS, anticommuting_chain
from .stats import tv_distance

__all__ = [
    "SingleExperiment", "AdaptiveNode", "experiment_distribution", "tv_distance", "tv_bound_check",
    "tree_distribution", "tree_time", "tree_tv_bound_check", "random_experiment", "random_tree",
    "hypothesis_instances", "minimax_success", "ScalingResult", "scaling_experiment",
]


@dataclass
class SingleExperiment:
    """U_{D+1} O(t_D) U_D ... O(t_1) U_1 |psi0>, then a POVM.

    The oracle acts on the first n qubits of the n_prime-qubit register, or on
    the first n+1 qubits as a controlled evolution (control = qubit 0).
    """

    n: int
    n_prime: int
    initial_state: np.ndarray
    unitaries: list
    durations: list
    povm: list
    controlled: bool = False

    def __post_init__(self):
        need = self.n + 1 if self.controlled else self.n
        if self.n_prime < need:
            raise DimensionError("register too small for the oracle")
        if self.n_prime > DENSE_MAX_QUBITS:
            raise ResourceError("register exceeds the dense ceiling")
        if len(self.unitaries) != len(self.durations) + 1:
            raise ValueError("need exactly one more interleaving unitary than oracle calls")
        d = 1 << self.n_prime
        psi = np.asarray(self.initial_state, dtype=complex)
        if psi.shape != (d,) or abs(np.vdot(psi, psi).real - 1) > 1e-9:
            raise NormalizationError("initial state must be a normalized vector on n_prime qubits")
        total = np.zeros((d, d), dtype=complex)
        for M in self.povm:
            if np.linalg.eigvalsh((M + M.conj().T) / 2).min() < -1e-9:
                raise ValueError("POVM element is not positive semidefinite")
            total += M
        if np.max(np.abs(total - np.eye(d))) > 1e-9:
            raise NormalizationError("POVM elements do not sum to the identity")

    @property
    def time(self) -> float:
        return float(sum(abs(t) for t in self.durations))

    def oracle_operator(self, H_dense: np.ndarray, t: float) -> np.ndarray:
        U = hermitian_expm(H_dense, t)
        if self.controlled:
            d = U.shape[0]
            C = np.eye(2 * d, dtype=complex)
            C[d:, d:] = U
            U = C
        rest = self.n_prime - (self.n + 1 if self.controlled else self.n)
        return np.kron(U, np.eye(1 << rest))


def experiment_distribution(E: SingleExperiment, H: PauliHamiltonian) -> np.ndarray:
    if H.n != E.n:
        raise DimensionError("Hamiltonian and experiment act on different qubit counts")
    Hd = H.to_dense()
    psi = E.unitaries[0] @ E.initial_state
    for t, U in zip(E.durations, E.unitaries[1:]):
        psi = U @ (E.oracle_operator(Hd, t) @ psi)
    return np.array([np.vdot(psi, M @ psi).real for M in E.povm])


def tv_bound_check(E: SingleExperiment, H1: PauliHamiltonian, H2: PauliHamiltonian):
    """(tv, min(2 ||H1 - H2|| t(E), 1), holds)."""
    tv = tv_distance(experiment_distribution(E, H1), experiment_distribution(E, H2))
    bound = min(2 * operator_norm(H1.to_dense() - H2.to_dense()) * E.time, 1.0)
    return tv, bound, tv <= bound + 1e-10


@dataclass
class AdaptiveNode:
    """An experiment whose outcome selects the next node (missing child = stop)."""

    experiment: SingleExperiment
    children: dict = field(default_factory=dict)


def tree_distribution(node: AdaptiveNode, H: PauliHamiltonian, prefix: tuple = ()) -> dict:
    """Exact probability of every root-to-leaf outcome path."""
    out = {}
    for outcome, p in enumerate(experiment_distribution(node.experiment, H)):
        path = prefix + (outcome,)
        child = node.children.get(outcome)
        if child is None:
            out[path] = out.get(path, 0.0) + p
        else:
            for sub, q in tree_distribution(child, H, path).items():
                out[sub] = out.get(sub, 0.0) + p * q
    return out


def tree_time(node: AdaptiveNode) -> float:
    """Largest total queried time along any path."""
    below = [tree_time(c) for c in node.children.values()]
    return node.experiment.time + max(below, default=0.0)


def tree_tv_bound_check(tree: AdaptiveNode, H1: PauliHamiltonian, H2: PauliHamiltonian):
    d1, d2 = tree_distribution(tree, H1), tree_distribution(tree, H2)
    keys = sorted(set(d1) | set(d2))
    tv = tv_distance([d1.get(k, 0.0) for k in keys], [d2.get(k, 0.0) for k in keys])
    bound = min(2 * operator_norm(H1.to_dense() - H2.to_dense()) * tree_time(tree), 1.0)
    return tv, bound, tv <= bound + 1e-10


def random_povm(dim: int, outcomes: int, rng: np.random.Generator) -> list:
    """Random POVM: A_i^dag A_i normalized by G^{-1/2} on both sides."""
    A = rng.normal(size=(outcomes, dim, dim)) + 1j * rng.normal(size=(outcomes, dim, dim))
    raw = [a.conj().T @ a for a in A]
    w, v = np.linalg.eigh(sum(raw))
    g = (v / np.sqrt(w)) @ v.conj().T
    return [g @ M @ g for M in raw]


def random_experiment(n: int, n_prime: int, depth: int, rng: np.random.Generator, *,
                      outcomes: int = 3, max_time: float = 1.0, controlled: bool = False) -> SingleExperiment:
    d = 1 << n_prime
    psi = np.zeros(d, dtype=complex)
    psi[0] = 1
    unitaries = [unitary_group.rvs(d, random_state=rng) for _ in range(depth + 1)]
    durations = list(rng.uniform(-max_time, max_time, size=depth))
    return SingleExperiment(n, n_prime, psi, unitaries, durations, random_povm(d, outcomes, rng), controlled)


def random_tree(n: int, n_prime: int, levels: int, rng: np.random.Generator, *,
                branching: int = 2, depth: int = 1, max_time: float = 0.5) -> AdaptiveNode:
    """Adaptive tree with ``levels`` experiment layers and ``branching`` outcomes per node."""
    exp = random_experiment(n, n_prime, depth, rng, outcomes=branching, max_time=max_time)
    node = AdaptiveNode(exp)
    if levels > 1:
        for outcome in range(branching):
            node.children[outcome] = random_tree(n, n_prime, levels - 1, rng, branching=branching,
                                                 depth=depth, max_time=max_time)
    return node


def hypothesis_instances(p: float, m: int, eps1: float, eps2: float, n: int):
    """Pair of Hamiltonians on the anticommuting chain with Pauli-p norms eps1, eps2."""
    chain = anticommuting_chain(n)
    if m > len(chain):
        raise ValueError(f"m = {m} exceeds the chain length {len(chain)}")
    if m < 1:
        raise ValueError("need m >= 1")
    root = 1.0 if np.isinf(p) else m ** (1.0 / p)
    out = []
    for eps in (eps1, eps2):
        c = eps / root
        out.append(PauliHamiltonian(n, {q: c for q in chain[:m]}, abs(c)))
    return tuple(out)


def minimax_success(P: Sequence[float], Q: Sequence[float]) -> float:
    """Best worst-case success of any (randomized) rule deciding P versus Q from one outcome."""
    P, Q = np.asarray(P, dtype=float), np.asarray(Q, dtype=float)
    k = P.size
    # variables (f_1..f_k, s); maximize s with s <= f.P and s <= 1 - f.Q
    c = np.zeros(k + 1)
    c[-1] = -1
    A = np.vstack([np.append(-P, 1.0), np.append(Q, 1.0)])
    res = linprog(c, A_ub=A, b_ub=[0.0, 1.0], bounds=[(0, 1)] * k + [(0, 1)], method="highs")
    return float(-res.fun)


@dataclass
class ScalingResult:
    slope: float
    intercept: float
    residuals: np.ndarray
    rows: list

    def to_csv(self) -> str:
        lines = ["grid,T,queries,measurements,accuracy"]
        for r in self.rows:
            lines.append(f"{r['grid']!r},{r['T']!r},{r['queries']},{r['measurements']},{r['accuracy']!r}")
        return "\n".join(lines) + "\n"


def fit_loglog(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, np.ndarray]:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept), ly - (slope * lx + intercept)


def scaling_experiment(certifier: str, grid: Sequence[float], trials: int = 1, seed: int = 0, *,
                       n: int = 3, m: int = 2, B: float = 1.0, eps: float = 0.05,
                       eta: float | None = 1.0, eps1: float | None = None,
                       delta: float = 0.1) -> ScalingResult:
    """Run a certifier across a parameter grid on H = H0 instances and fit log T.

    ``rchc``: the grid is eps2 - eps1; eps1 = gap/eta unless ``eps1`` is fixed.
    ``shc``: the grid is m at fixed ``eps``.
    """
    from .certify import rchc, shc
    from .evolution import EvolutionOracle

    grid = list(grid)
    if len(grid) < 3:
        raise ValueError("scaling fits need at least three grid points")
    seeds = np.random.SeedSequence(seed).spawn(len(grid))
    rows = []
    for g, ss in zip(grid, seeds):
        rng = np.random.default_rng(ss)
        T = []
        queries = []
        meas = []
        correct = 0
        for _ in range(trials):
            if certifier == "rchc":
                H0 = random_hamiltonian(n, m, B, rng)
                e1 = eps1 if eps1 is not None else g / eta
                oracle = EvolutionOracle(H0)
                rep = rchc(H0, oracle, m, B, e1, e1 + g, delta, rng)
            elif certifier == "shc":
                mm = int(g)
                H0 = random_hamiltonian(n, mm, B, rng)
                oracle = EvolutionOracle(H0, forward_only=True)
                rep = shc(H0, oracle, mm, B, eps, delta, rng)
            else:
                raise ValueError(f"unknown certifier {certifier!r}")
            T.append(rep.ledger.time)
            queries.append(rep.ledger.queries)
            meas.append(rep.ledger.measurements)
            correct += rep.accepted
        rows.append({"grid": g, "T": float(np.mean(T)), "queries": int(np.mean(queries)),
                     "measurements": int(np.mean(meas)), "accuracy": correct / trials})
    slope, intercept, resid = fit_loglog([r["grid"] for r in rows], [r["T"] for r in rows])
    return ScalingResult(slope, intercept, resid, rows)
