"""Binary symplectic Pauli algebra.

A Pauli string on n qubits is stored as two n-bit integers ``x`` and ``z``.
Qubit 1 is the most significant bit, which matches the text format (qubit 1
leftmost) and the Kronecker ordering used by :func:`to_dense`.  The matrix
represented by ``(x, z)`` is ``i**(x.z) X[x] Z[z]``, so that ``(1, 1)`` on one
qubit is exactly ``Y``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DimensionError, ResourceError

DENSE_MAX_QUBITS = 12

_PHASES = np.array([1, 1j, -1, -1j])
_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _CHARS.items()}


def popcount(v) -> np.ndarray | int:
    """Number of set bits, elementwise for arrays."""
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count()
    return np.bitwise_count(np.asarray(v, dtype=np.uint64)).astype(np.int64)


@dataclass(frozen=True, order=True)
class PauliString:
    """Phase-free n-qubit Pauli matrix in binary symplectic form."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("qubit count must be nonnegative")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"bit masks do not fit in {self.n} qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for ch in label.upper():
            try:
                bx, bz = _BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def from_bits(cls, x_bits: Iterable[int], z_bits: Iterable[int]) -> "PauliString":
        xb, zb = list(x_bits), list(z_bits)
        if len(xb) != len(zb):
            raise DimensionError("x and z bit strings differ in length")
        x = z = 0
        for bx, bz in zip(xb, zb):
            x = (x << 1) | (int(bx) & 1)
            z = (z << 1) | (int(bz) & 1)
        return cls(len(xb), x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        """``kind`` acting on ``qubit`` (0-based, leftmost is 0)."""
        bx, bz = _BITS[kind.upper()]
        shift = n - 1 - qubit
        return cls(n, bx << shift, bz << shift)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @property
    def label(self) -> str:
        return "".join(_CHARS[b] for b in zip(self.x_bits, self.z_bits))

    @property
    def index(self) -> int:
        """Position in the flattened ``(x, z)`` coefficient array."""
        return (self.x << self.n) | self.z

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


@dataclass(frozen=True)
class PhasedPauli:
    """``i**phase_exp`` times a phase-free Pauli string."""

    phase_exp: int
    body: PauliString

    def __post_init__(self):
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def phase(self) -> complex:
        return complex(_PHASES[self.phase_exp])

    def dense(self) -> np.ndarray:
        return self.phase * to_dense(self.body)


def _check_same_n(a: PauliString, b: PauliString):
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 if the two Paulis commute, 1 if they anticommute."""
    _check_same_n(a, b)
    return (popcount(a.x & b.z) + popcount(a.z & b.x)) & 1


def product_phase(ax, az, bx, bz):
    """Exponent e with P_a P_b = i**e P_{a xor b}; works on ints or arrays."""
    cx, cz = ax ^ bx, az ^ bz
    return popcount(ax & az) + popcount(bx & bz) + 2 * popcount(az & bx) - popcount(cx & cz)


def pauli_multiply(a: PauliString, b: PauliString) -> PhasedPauli:
    _check_same_n(a, b)
    e = product_phase(a.x, a.z, b.x, b.z)
    return PhasedPauli(e, PauliString(a.n, a.x ^ b.x, a.z ^ b.z))


def all_paulis(n: int) -> Iterator[PauliString]:
    """Every element of the n-qubit Pauli set in (x, z) lexicographic order."""
    d = 1 << n
    for x in range(d):
        for z in range(d):
            yield PauliString(n, x, z)


def _check_dense(n: int, max_qubits: int | None):
    limit = DENSE_MAX_QUBITS if max_qubits is None else max_qubits
    if n > limit:
        raise ResourceError(f"dense construction on {n} qubits exceeds the ceiling of {limit}")


def to_dense(p: PauliString, max_qubits: int | None = None) -> np.ndarray:
    """2^n x 2^n matrix of the Pauli string."""
    _check_dense(p.n, max_qubits)
    d = 1 << p.n
    k = np.arange(d, dtype=np.int64)
    signs = 1 - 2 * (popcount(k & p.z) & 1)
    out = np.zeros((d, d), dtype=complex)
    out[k ^ p.x, k] = _PHASES[popcount(p.x & p.z) % 4] * signs
    return out


def qubit_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def _walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    lead = a.shape[:-1]
    d = a.shape[-1]
    h = 1
    while h < d:
        a = a.reshape(*lead, d // (2 * h), 2, h)
        a = np.stack([a[..., 0, :] + a[..., 1, :], a[..., 0, :] - a[..., 1, :]], axis=-2)
        h *= 2
    return a.reshape(*lead, d)


def pauli_coefficients(A: np.ndarray) -> np.ndarray:
    """Array ``c[x, z] = Tr(A P_(x,z)) / 2^n`` for a 2^n x 2^n operator.

    Uses ``(P)_(k xor x, k) = i^(x.z) (-1)^(z.k)`` so each row of fixed x is a
    Walsh-Hadamard transform of the x-shifted diagonal of A.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("operator must be square")
    d = A.shape[0]
    qubit_count(d)
    k = np.arange(d)
    xs = k[:, None]
    shifted = A[k[None, :], k[None, :] ^ xs]  # shifted[x, k] = A[k, k ^ x]
    coeffs = _walsh_hadamard(shifted.astype(complex))
    phase = _PHASES[popcount(xs & k[None, :]) % 4]
    return phase * coeffs / d


class PauliVector(Mapping):
    """Sparse map from Pauli strings to complex coefficients.

    Only nonzero entries are stored and iteration follows (x, z) order.
    """

    def __init__(self, n: int, entries: Mapping[PauliString, complex] | None = None):
        self.n = n
        items = []
        for p, v in (entries or {}).items():
            if p.n != n:
                raise DimensionError("entry has the wrong qubit count")
            if v != 0:
                items.append((p, complex(v)))
        items.sort(key=lambda kv: kv[0])
        self._entries = dict(items)

    @classmethod
    def from_array(cls, n: int, coeffs: np.ndarray, atol: float = 0.0) -> "PauliVector":
        coeffs = np.asarray(coeffs).reshape(1 << n, 1 << n)
        xs, zs = np.nonzero(np.abs(coeffs) > atol)
        return cls(n, {PauliString(n, int(x), int(z)): coeffs[x, z] for x, z in zip(xs, zs)})

    def __getitem__(self, p: PauliString) -> complex:
        return self._entries.get(p, 0j)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def to_array(self) -> np.ndarray:
        d = 1 << self.n
        out = np.zeros((d, d), dtype=complex)
        for p, v in self._entries.items():
            out[p.x, p.z] = v
        return out

    def norm(self, p: float = 2) -> float:
        vals = np.abs(np.fromiter(self._entries.values(), dtype=complex, count=len(self)))
        if p == 0:
            return float(np.count_nonzero(vals))
        if vals.size == 0:
            return 0.0
        if np.isinf(p):
            return float(vals.max())
        return float(np.sum(vals**p) ** (1.0 / p))

    def restricted_norm(self, paulis: Iterable[PauliString]) -> float:
        return float(np.sqrt(sum(abs(self[p]) ** 2 for p in paulis)))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p.label}: {v:.6g}" for p, v in self._entries.items())
        return f"PauliVector({{{inner}}})"


def pauli_decompose(A: np.ndarray, atol: float = 1e-14) -> PauliVector:
    """Pauli coefficients of a dense operator, dropping entries with |c| <= atol."""
    A = np.asarray(A)
    n = qubit_count(A.shape[0])
    return PauliVector.from_array(n, pauli_coefficients(A), atol=atol)


def anticommuting_chain(n: int) -> list[PauliString]:
    """X1, Y1, Z1X2, Z1Y2, ..., Z1..Zn: 2n+1 pairwise anticommuting strings."""
    if n < 1:
        raise DimensionError("the chain needs at least one qubit")
    out = []
    for q in range(n):
        prefix = "Z" * q
        rest = "I" * (n - q - 1)
        out.append(PauliString.from_label(prefix + "X" + rest))
        out.append(PauliString.from_label(prefix + "Y" + rest))
    out.append(PauliString.from_label("Z" * n))
    return out
