"""The black-box evolution oracle, its cost ledger, and second-order Trotterization."""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError, ResourceError
from .hamiltonians import PauliHamiltonian
from .linalg import commutator, hermitian_expm, operator_norm


@dataclass(frozen=True)
class Cost:
    """Immutable snapshot or difference of ledger fields."""

    time: float = 0.0
    queries: int = 0
    measurements: int = 0

    def __add__(self, other: "Cost") -> "Cost":
        return Cost(self.time + other.time, self.queries + other.queries,
                    self.measurements + other.measurements)

    def __sub__(self, other: "Cost") -> "Cost":
        return Cost(self.time - other.time, self.queries - other.queries,
                    self.measurements - other.measurements)

    def times(self, k: int) -> "Cost":
        return Cost(self.time * k, self.queries * k, self.measurements * k)

    def as_dict(self) -> dict:
        return {"T": self.time, "queries": self.queries, "measurements": self.measurements}


class TimeLedger:
    """Running totals of queried evolution time, oracle queries and measurements."""

    def __init__(self):
        self.total_time = 0.0
        self.queries = 0
        self.measurements = 0

    def charge(self, time: float = 0.0, queries: int = 0, measurements: int = 0):
        if time < 0 or queries < 0 or measurements < 0:
            raise ValueError("ledger charges must be nonnegative")
        self.total_time += time
        self.queries += int(queries)
        self.measurements += int(measurements)

    def charge_cost(self, cost: Cost, runs: int = 1):
        """Charge ``runs`` repetitions of an identical experiment."""
        self.charge(cost.time * runs, cost.queries * runs, cost.measurements * runs)

    def snapshot(self) -> Cost:
        return Cost(self.total_time, self.queries, self.measurements)

    def merge(self, other: "TimeLedger"):
        self.charge_cost(other.snapshot())

    def __repr__(self) -> str:
        return f"TimeLedger(T={self.total_time:.6g}, queries={self.queries}, measurements={self.measurements})"


class EvolutionOracle:
    """Black-box access to e^{-iHt} for a sealed Hamiltonian H.

    The only ways to interact are :meth:`apply` and :meth:`deferred_charges`.
    Each call to :meth:`apply` charges |t| and one query to ``ledger``.
    Setting ``forward_only`` rejects negative times and controlled calls.
    """

    __slots__ = ("n", "ledger", "max_duration", "forward_only", "_evolve")

    def __init__(self, hamiltonian: PauliHamiltonian, *, max_duration: float = math.inf,
                 forward_only: bool = False, ledger: TimeLedger | None = None):
        w, v = np.linalg.eigh(hamiltonian.to_dense())
        vh = v.conj().T

        def evolve(t):
            return (v * np.exp(-1j * w * t)) @ vh

        self._evolve = evolve
        self.n = hamiltonian.n
        self.max_duration = max_duration
        self.forward_only = forward_only
        self.ledger = TimeLedger() if ledger is None else ledger

    def __repr__(self) -> str:
        return f"EvolutionOracle(n={self.n}, {self.ledger!r})"

    def apply(self, t: float, controlled: bool = False) -> np.ndarray:
        """e^{-iHt}, or |0><0| (x) I + |1><1| (x) e^{-iHt} when controlled."""
        if abs(t) > self.max_duration:
            raise ResourceError(f"duration {t} exceeds the single-call limit {self.max_duration}")
        if self.forward_only and (t < 0 or controlled):
            raise ConfigurationError("oracle only accepts uncontrolled calls with t >= 0")
        U = self._evolve(t)
        self.ledger.charge(time=abs(t), queries=1)
        if controlled:
            d = U.shape[0]
            out = np.eye(2 * d, dtype=complex)
            out[d:, d:] = U
            return out
        return U

    @contextmanager
    def deferred_charges(self):
        """Route charges to a scratch ledger that the caller settles later.

        Used when one simulated circuit stands in for many identical runs:
        the caller measures the cost of a single run here and then charges it
        once per repetition with :meth:`TimeLedger.charge_cost`.
        """
        main = self.ledger
        scratch = TimeLedger()
        self.ledger = scratch
        try:
            yield scratch
        finally:
            self.ledger = main


def trotter_u2(H0: PauliHamiltonian, oracle: EvolutionOracle, t: float, r: int) -> np.ndarray:
    """(e^{iH0 t/2r} O_H(t/r) e^{iH0 t/2r})^r, approximating e^{-i(H-H0)t}.

    Issues exactly r oracle calls of duration t/r; the H0 factors are computed
    classically and cost nothing.
    """
    if r < 1:
        raise ConfigurationError("need at least one Trotter step")
    if H0.n != oracle.n:
        raise DimensionError("H0 and the oracle act on different qubit counts")
    delta = t / r
    half = hermitian_expm(H0.to_dense(), -delta / 2)
    U = np.eye(1 << H0.n, dtype=complex)
    for _ in range(r):
        U = half @ oracle.apply(delta) @ half @ U
    return U


def _dense(A) -> np.ndarray:
    return A.to_dense() if isinstance(A, PauliHamiltonian) else np.asarray(A)


def trotter_error_bound(A, B, t: float, r: int) -> float:
    """Bound on ||e^{-i(A+B)t} - (e^{-iB d/2} e^{-iA d} e^{-iB d/2})^r||, d = t/r."""
    if r < 1:
        raise ConfigurationError("need at least one Trotter step")
    a, b = _dense(A), _dense(B)
    inner = commutator(a, b)
    c1 = operator_norm(commutator(a, inner))
    c2 = operator_norm(commutator(b, -inner))
    t3 = abs(t) ** 3
    return t3 / (12 * r**2) * c1 + t3 / (24 * r**2) * c2


def trotter_product(A, B, t: float, r: int) -> np.ndarray:
    """Symmetric product (e^{-iB d/2} e^{-iA d} e^{-iB d/2})^r with exact factors."""
    a, b = _dense(A), _dense(B)
    d = t / r
    half = hermitian_expm(b, d / 2)
    step = half @ hermitian_expm(a, d) @ half
    return np.linalg.matrix_power(step, r)


def worst_case_trotter_coefficient(m0: int, B0: float, norm_h0: float, t: float) -> float:
    """K with ||e^{-iH_res t} - U_{t,r}|| <= S * K / r^2 for every admissible hidden H.

    Only certifier-visible quantities enter.  With A = H and B = -H0 in the
    symmetric Trotter bound, [A,[A,B]] = -[H,[H_res,H0]] and
    [B,[B,A]] = [H0,[H0,H_res]].  Chaining ||[X,Y]|| <= 2||X|| ||Y||,
    ||H_res|| <= m0 S and ||H|| <= ||H0|| + m0 S <= ||H0|| + m0 B0 gives
    ||[H,[H_res,H0]]|| <= 4 (||H0|| + m0 B0) m0 S ||H0|| and
    ||[H0,[H0,H_res]]|| <= 4 ||H0||^2 m0 S.
    """
    h = norm_h0
    per_s = m0 * h * ((h + m0 * B0) / 3.0 + h / 6.0)
    return per_s * abs(t) ** 3


def choose_trotter_steps(m0: int, B0: float, norm_h0: float, t: float, target_coefficient: float,
                         max_steps: int = 10**9) -> int:
    """Smallest r with worst_case_trotter_coefficient(...) / r^2 <= target_coefficient.

    The target is per unit of S (the largest residual coefficient).  Search is
    by doubling followed by bisection.
    """
    if m0 <= 0 or B0 <= 0 or t < 0 or norm_h0 < 0:
        raise ConfigurationError("m0, B0 must be positive and t, ||H0|| nonnegative")
    if not target_coefficient > 0:
        raise ConfigurationError("Trotter target must be positive")
    coeff = worst_case_trotter_coefficient(m0, B0, norm_h0, t)

    def ok(r):
        return coeff / r**2 <= target_coefficient

    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > 2 * max_steps:
            raise ConfigurationError("Trotter target unreachable within the step limit")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if hi > max_steps:
        raise ConfigurationError("Trotter target unreachable within the step limit")
    return hi
