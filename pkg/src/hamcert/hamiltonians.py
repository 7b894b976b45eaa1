"""Sparse Pauli-sum Hamiltonians, residuals, the remainder term and instance generators."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, HamiltonianFormatError
from .pauli import PauliString, _check_dense, to_dense as pauli_to_dense


class PauliHamiltonian:
    """Traceless real combination of Pauli strings with a declared coefficient bound."""

    def __init__(self, n: int, terms: Mapping[PauliString, float], bound: float):
        if bound < 0 or not math.isfinite(bound):
            raise ValueError("coefficient bound must be finite and nonnegative")
        items = []
        for p, c in terms.items():
            if p.n != n:
                raise DimensionError(f"term {p} does not act on {n} qubits")
            if p.is_identity():
                raise ValueError("Hamiltonians are traceless: identity term not allowed")
            if isinstance(c, complex):
                if c.imag != 0:
                    raise ValueError("coefficients must be real")
                c = c.real
            c = float(c)
            if not math.isfinite(c):
                raise ValueError("coefficients must be finite")
            if abs(c) > bound:
                raise ValueError(f"coefficient {c} of {p} exceeds the bound {bound}")
            if c != 0.0:
                items.append((p, c))
        items.sort(key=lambda kv: kv[0])
        self.n = n
        self.bound = float(bound)
        self._terms = dict(items)
        if len(self._terms) > 4**n - 1:
            raise ValueError("more terms than non-identity Paulis")

    @classmethod
    def from_labels(cls, terms: Mapping[str, float], bound: float | None = None) -> "PauliHamiltonian":
        paulis = {PauliString.from_label(k): v for k, v in terms.items()}
        if not paulis:
            raise ValueError("cannot infer qubit count from an empty term map")
        n = next(iter(paulis)).n
        if bound is None:
            bound = max(abs(v) for v in paulis.values())
        return cls(n, paulis, bound)

    @classmethod
    def zero(cls, n: int, bound: float = 0.0) -> "PauliHamiltonian":
        return cls(n, {}, bound)

    @property
    def terms(self) -> dict[PauliString, float]:
        return dict(self._terms)

    @property
    def support(self) -> list[PauliString]:
        return list(self._terms)

    @property
    def m(self) -> int:
        return len(self._terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.fromiter(self._terms.values(), dtype=float, count=self.m)

    @property
    def S(self) -> float:
        """Largest coefficient magnitude."""
        return float(np.max(np.abs(self.coefficients), initial=0.0))

    def coefficient(self, p: PauliString) -> float:
        return self._terms.get(p, 0.0)

    def coefficient_norm(self, p: float = 2) -> float:
        c = np.abs(self.coefficients)
        if p == 0:
            return float(c.size)
        if c.size == 0:
            return 0.0
        if np.isinf(p):
            return float(c.max())
        return float(np.sum(c**p) ** (1.0 / p))

    def to_dense(self, max_qubits: int | None = None) -> np.ndarray:
        _check_dense(self.n, max_qubits)
        d = 1 << self.n
        out = np.zeros((d, d), dtype=complex)
        for p, c in self._terms.items():
            out += c * pauli_to_dense(p, max_qubits)
        return out

    def with_bound(self, bound: float) -> "PauliHamiltonian":
        return PauliHamiltonian(self.n, self._terms, bound)

    def scaled(self, factor: float) -> "PauliHamiltonian":
        return PauliHamiltonian(self.n, {p: factor * c for p, c in self._terms.items()},
                                abs(factor) * self.bound)

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        if other.n != self.n:
            raise DimensionError("qubit counts differ")
        terms = dict(self._terms)
        for p, c in other._terms.items():
            terms[p] = terms.get(p, 0.0) + c
        return PauliHamiltonian(self.n, terms, self.bound + other.bound)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliHamiltonian) and self.n == other.n
                and self.bound == other.bound and self._terms == other._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:+.6g}*{p.label}" for p, c in self._terms.items()) or "0"
        return f"PauliHamiltonian(n={self.n}, B={self.bound:g}, {body})"

    # JSON round trip; coefficients are written as shortest round-trip decimal strings.
    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "bound": self.bound,
            "terms": [{"pauli": p.label, "coeff": repr(c)} for p, c in self._terms.items()],
        }

    @classmethod
    def from_json_dict(cls, data) -> "PauliHamiltonian":
        if not isinstance(data, dict):
            raise HamiltonianFormatError("Hamiltonian record must be a JSON object")
        for key in ("n", "bound", "terms"):
            if key not in data:
                raise HamiltonianFormatError(f"missing field {key!r}")
        try:
            n = int(data["n"])
            bound = float(data["bound"])
            terms = {}
            for entry in data["terms"]:
                p = PauliString.from_label(entry["pauli"])
                if p.n != n:
                    raise HamiltonianFormatError(f"term {entry['pauli']!r} does not have {n} qubits")
                if p in terms:
                    raise HamiltonianFormatError(f"duplicate term {entry['pauli']!r}")
                terms[p] = float(entry["coeff"])
            return cls(n, terms, bound)
        except HamiltonianFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise HamiltonianFormatError(str(exc)) from exc


def load_hamiltonian(path: str | Path) -> PauliHamiltonian:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise HamiltonianFormatError(f"{path}: {exc}") from exc
    return PauliHamiltonian.from_json_dict(data)


def save_hamiltonian(H: PauliHamiltonian, path: str | Path):
    Path(path).write_text(json.dumps(H.to_json_dict(), indent=2) + "\n")


def residual(H: PauliHamiltonian, H0: PauliHamiltonian) -> PauliHamiltonian:
    """H - H0, dropping only exact cancellations; the bound is B_H + B_H0."""
    if H.n != H0.n:
        raise DimensionError("qubit counts differ")
    return H + H0.scaled(-1.0)


@dataclass(frozen=True)
class RemainderTerm:
    m: int
    S: float
    t: float
    value: float

    def __float__(self) -> float:
        return self.value


def remainder_R(m: int, S: float, t: float) -> RemainderTerm:
    """(exp(mSt) - 1 - mSt)/m, the tail of the Taylor series from second order."""
    if m < 1:
        raise ValueError("remainder term needs m >= 1")
    if S < 0 or t < 0:
        raise ValueError("S and t must be nonnegative")
    x = m * S * t
    return RemainderTerm(m, S, t, float((math.expm1(x) - x) / m))


def random_hamiltonian(n: int, m: int, B: float, seed=None,
                       candidates: Iterable[PauliString] | None = None) -> PauliHamiltonian:
    """m distinct random non-identity terms with |coeff| uniform in [0.01B, B] and random sign."""
    rng = np.random.default_rng(seed)
    if candidates is None:
        pool = None
        size = 4**n - 1
    else:
        pool = [p for p in candidates if not p.is_identity()]
        size = len(pool)
    if not 1 <= m <= size:
        raise ValueError(f"m={m} outside [1, {size}]")
    picks = rng.choice(size, size=m, replace=False)
    if pool is None:
        d = 1 << n
        paulis = [PauliString(n, *divmod(int(i) + 1, d)) for i in picks]
    else:
        paulis = [pool[int(i)] for i in picks]
    mags = rng.uniform(0.01 * B, B, size=m)
    signs = rng.choice([-1.0, 1.0], size=m)
    return PauliHamiltonian(n, dict(zip(paulis, mags * signs)), B)


def plant_residual(H0: PauliHamiltonian, norm: float, seed=None, *, extra_terms: int = 0,
                   candidates: Iterable[PauliString] | None = None,
                   bound: float | None = None) -> PauliHamiltonian:
    """H0 plus a random residual of exact Frobenius norm ``norm``.

    The residual lives on the support of H0 together with ``extra_terms`` new
    Paulis, or on ``candidates`` if given.  The result keeps H0's bound unless
    ``bound`` is supplied.
    """
    rng = np.random.default_rng(seed)
    if candidates is not None:
        support = [p for p in candidates if not p.is_identity()]
    else:
        support = list(H0.support)
        if extra_terms:
            taken = set(support)
            free = [PauliString(H0.n, x, z) for x in range(1 << H0.n) for z in range(1 << H0.n)
                    if (x or z) and PauliString(H0.n, x, z) not in taken]
            idx = rng.choice(len(free), size=extra_terms, replace=False)
            support += [free[int(i)] for i in idx]
    if not support:
        raise ValueError("no Paulis available for the residual")
    direction = rng.normal(size=len(support))
    direction *= norm / np.linalg.norm(direction)
    res = PauliHamiltonian(H0.n, dict(zip(support, direction)), float(np.max(np.abs(direction))))
    total = H0 + res
    return total.with_bound(H0.bound if bound is None else bound)
