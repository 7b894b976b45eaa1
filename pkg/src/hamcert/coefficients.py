"""Pauli coefficients of e^{-iHt} and brute-force checks of the coefficient bounds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ResourceError
from .hamiltonians import PauliHamiltonian, remainder_R
from .linalg import hermitian_expm
from .pauli import PauliString, PauliVector, pauli_coefficients, product_phase
from .stabilizer import MaximalStabilizerGroup

ENUMERATION_BUDGET = 10**6
_PHASES = np.array([1, 1j, -1, -1j])


def evolution_coefficients(H: PauliHamiltonian, t: float) -> np.ndarray:
    """Array v[x, z] of Pauli coefficients of e^{-iHt}."""
    return pauli_coefficients(hermitian_expm(H.to_dense(), t))


def evolution_pauli_vector(H: PauliHamiltonian, t: float) -> PauliVector:
    return PauliVector.from_array(H.n, evolution_coefficients(H, t), atol=1e-15)


def non_identity_set(n: int) -> list[PauliString]:
    d = 1 << n
    return [PauliString(n, x, z) for x in range(d) for z in range(d) if x or z]


def outside_group_set(G: MaximalStabilizerGroup) -> list[PauliString]:
    mask = G.membership_mask()
    xs, zs = np.nonzero(~mask)
    return [PauliString(G.n, int(x), int(z)) for x, z in zip(xs, zs)]


@dataclass(frozen=True)
class TaylorPartition:
    """Grouping of the m^k index tuples of H^k by the Pauli their product lands on."""

    k: int
    m: int
    S: float
    counts: dict
    coefficients: dict

    def total(self) -> int:
        return sum(self.counts.values())


def taylor_partition(H: PauliHamiltonian, k: int, budget: int = ENUMERATION_BUDGET) -> TaylorPartition:
    """Enumerate every tuple (j1..jk), reduce P_j1...P_jk to i^e P_l and accumulate.

    ``coefficients[l]`` is a_{k,l}, the P_l coefficient of H^k, and
    ``counts[l]`` is the number of tuples landing on P_l.
    """
    if k < 1:
        raise ValueError("order must be at least 1")
    m = H.m
    if m == 0:
        raise ValueError("Hamiltonian has no terms")
    if m**k > budget:
        raise ResourceError(f"m^k = {m**k} exceeds the enumeration budget {budget}")
    n = H.n
    xs = np.array([p.x for p in H.support], dtype=np.int64)
    zs = np.array([p.z for p in H.support], dtype=np.int64)
    s = H.coefficients
    cx = np.zeros(1, dtype=np.int64)
    cz = np.zeros(1, dtype=np.int64)
    ph = np.zeros(1, dtype=np.int64)
    val = np.ones(1)
    for _ in range(k):
        ax, az = cx[:, None], cz[:, None]
        ph = (ph[:, None] + product_phase(ax, az, xs[None, :], zs[None, :])).ravel()
        cx = (ax ^ xs[None, :]).ravel()
        cz = (az ^ zs[None, :]).ravel()
        val = (val[:, None] * s[None, :]).ravel()
    keys = (cx << n) | cz
    uniq, inv = np.unique(keys, return_inverse=True)
    counts = np.bincount(inv)
    terms = val * _PHASES[ph % 4]
    coeff = np.bincount(inv, weights=terms.real) + 1j * np.bincount(inv, weights=terms.imag)
    paulis = [PauliString(n, int(key) >> n, int(key) & ((1 << n) - 1)) for key in uniq]
    return TaylorPartition(k, m, H.S, dict(zip(paulis, counts.tolist())), dict(zip(paulis, coeff)))


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _validate_set(H: PauliHamiltonian, X: Sequence[PauliString], m: int):
    if any(p.is_identity() for p in X):
        raise ValueError("the Pauli set must exclude the identity")
    if any(p.n != H.n for p in X):
        raise ValueError("Pauli set acts on a different qubit count")
    if len(set(X)) < m:
        raise ValueError(f"the Pauli set needs at least m = {m} elements")


def _restricted(H: PauliHamiltonian, t: float, X: Iterable[PauliString], m: int | None):
    X = list(X)
    m = H.m if m is None else m
    _validate_set(H, X, m)
    v = evolution_coefficients(H, t)
    vx = np.array([v[p.x, p.z] for p in X])
    sx = np.array([H.coefficient(p) for p in X if H.coefficient(p) != 0.0])
    R = remainder_R(m, H.S, t).value
    return m, vx, sx, R


def l2_lower_bound(H: PauliHamiltonian, t: float, X: Iterable[PauliString],
                   m: int | None = None) -> BoundCheck:
    """||v[X]||_2 >= ||s[S cap X]||_2 t - sqrt(m) R for the coefficients v of e^{-iHt}."""
    m, vx, sx, R = _restricted(H, t, X, m)
    lhs = float(np.linalg.norm(vx))
    rhs = float(np.linalg.norm(sx) * t - math.sqrt(m) * R)
    return BoundCheck(lhs, rhs, lhs >= rhs - 1e-12)


def l2_upper_bound(H: PauliHamiltonian, t: float, X: Iterable[PauliString],
                   m: int | None = None) -> BoundCheck:
    """||v[X]||_2^2 <= sum_{S cap X} (|s| t + R)^2 + (m - |S cap X|) R^2 (squared sides)."""
    m, vx, sx, R = _restricted(H, t, X, m)
    lhs = float(np.sum(np.abs(vx) ** 2))
    rhs = float(np.sum((np.abs(sx) * t + R) ** 2) + (m - sx.size) * R**2)
    return BoundCheck(lhs, rhs, lhs <= rhs + 1e-12)


class OptCheck(NamedTuple):
    brute_max: float
    structured_max: float
    agree: bool


def _row_choices(N: int, cap: int, total: int) -> np.ndarray:
    rows = [r for r in itertools.product(range(cap + 1), repeat=N) if sum(r) <= total]
    return np.array(rows, dtype=float)


def opt_max_check(b: Sequence[float], c: Sequence[float], m: int,
                  budget: int = ENUMERATION_BUDGET) -> OptCheck:
    """Exhaustive maximum of ||b + A^T c||^2 over integer A versus the claimed maximizer.

    Row k of A (k = 1..len(c)) ranges over vectors with entries in
    [0, m^(k-1)] summing to at most m^k.  The claimed maximizer puts
    m^(k-1) on the m largest coordinates of b in every row.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    N, r = b.size, c.size
    if m < 1 or m > N:
        raise ValueError("need 1 <= m <= len(b)")
    rows = [_row_choices(N, m ** (k - 1), m**k) for k in range(1, r + 1)]
    size = math.prod(len(rw) for rw in rows)
    if size > budget:
        raise ResourceError(f"search space {size} exceeds the budget {budget}")
    acc = b[None, :]
    for ck, rw in zip(c, rows):
        acc = (acc[:, None, :] + ck * rw[None, :, :]).reshape(-1, N)
    brute = float(np.max(np.sum(acc**2, axis=1)))
    top = np.argsort(-b, kind="stable")[:m]
    best = b.copy()
    for k, ck in enumerate(c, start=1):
        best[top] += ck * m ** (k - 1)
    structured = float(np.sum(best**2))
    return OptCheck(brute, structured, brute <= structured + 1e-12)
