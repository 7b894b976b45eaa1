"""Maximal stabilizer groups, syndromes and syndrome measurement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NormalizationError, UnsupportedGroupError
from .pauli import PauliString, pauli_multiply, popcount, to_dense

# single-qubit Pauli that anticommutes with each generator type
_FLIP = {"Z": "X", "X": "Z", "Y": "Z"}
_ONE_QUBIT_STATES = {
    "Z": np.array([1, 0], dtype=complex),
    "X": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "Y": np.array([1, 1j], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True, order=True)
class Syndrome:
    """n anticommutation bits; generator 1 is the most significant bit of ``value``."""

    n: int
    value: int

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Syndrome":
        v = 0
        for b in bits:
            v = (v << 1) | (int(b) & 1)
        return cls(len(bits), v)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    rows = list(rows)
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


class Decomposition(NamedTuple):
    phase_exp: int
    beta: PauliString
    gamma: PauliString


class MaximalStabilizerGroup:
    """Abelian group generated by n independent commuting Pauli strings."""

    def __init__(self, generators: Sequence[PauliString]):
        gens = tuple(generators)
        if not gens:
            raise DimensionError("need at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise DimensionError("generators act on different qubit counts")
        if len(gens) != n:
            raise ValueError(f"a maximal group on {n} qubits needs {n} generators, got {len(gens)}")
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if (popcount(g.x & h.z) + popcount(g.z & h.x)) & 1:
                    raise ValueError(f"generators {g} and {h} anticommute")
        if _gf2_rank([(g.x << n) | g.z for g in gens]) != n:
            raise ValueError("generators are not independent")
        self.n = n
        self.generators = gens
        self._gx = np.array([g.x for g in gens], dtype=np.int64)
        self._gz = np.array([g.z for g in gens], dtype=np.int64)

    @classmethod
    def all_z(cls, n: int) -> "MaximalStabilizerGroup":
        return cls([PauliString.single(n, q, "Z") for q in range(n)])

    @classmethod
    def all_x(cls, n: int) -> "MaximalStabilizerGroup":
        return cls([PauliString.single(n, q, "X") for q in range(n)])

    @classmethod
    def from_descriptor(cls, descriptor: dict, n: int) -> "MaximalStabilizerGroup":
        kind = descriptor.get("kind")
        if kind == "all_z":
            return cls.all_z(n)
        if kind == "all_x":
            return cls.all_x(n)
        raise ValueError(f"unknown group kind {kind!r}")

    def __repr__(self) -> str:
        return f"MaximalStabilizerGroup([{', '.join(g.label for g in self.generators)}])"

    def __eq__(self, other) -> bool:
        return isinstance(other, MaximalStabilizerGroup) and self.generators == other.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    @property
    def is_product_form(self) -> bool:
        return all(g.weight == 1 for g in self.generators)

    def _require_product_form(self):
        if not self.is_product_form:
            raise UnsupportedGroupError("only product-form groups support this operation")

    def syndrome_values(self, x, z) -> np.ndarray:
        """Vectorized syndrome integers for arrays of (x, z) masks."""
        x = np.asarray(x, dtype=np.int64)[..., None]
        z = np.asarray(z, dtype=np.int64)[..., None]
        bits = (popcount(x & self._gz) + popcount(z & self._gx)) & 1
        weights = 1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return (bits * weights).sum(axis=-1)

    def contains(self, p: PauliString) -> bool:
        """Membership up to phase: for a maximal group this is a zero syndrome."""
        return syndrome(self, p).value == 0

    def membership_mask(self) -> np.ndarray:
        """Boolean array ``mask[x, z]`` marking group elements among all 4^n strings."""
        d = 1 << self.n
        x, z = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        return self.syndrome_values(x, z) == 0

    def elements(self) -> list[PauliString]:
        out = []
        for bits in range(1 << self.n):
            x = z = 0
            for i, g in enumerate(self.generators):
                if (bits >> (self.n - 1 - i)) & 1:
                    x ^= g.x
                    z ^= g.z
            out.append(PauliString(self.n, x, z))
        return out

    def representatives(self) -> list[PauliString]:
        """Canonical anticommutant representatives, indexed by syndrome value."""
        return [anticommutant_representative(self, Syndrome(self.n, v)) for v in range(1 << self.n)]


def syndrome(G: MaximalStabilizerGroup, p: PauliString) -> Syndrome:
    if p.n != G.n:
        raise DimensionError("Pauli and group act on different qubit counts")
    v = 0
    for g in G.generators:
        v = (v << 1) | ((popcount(p.x & g.z) + popcount(p.z & g.x)) & 1)
    return Syndrome(G.n, v)


def _generator_sites(G: MaximalStabilizerGroup) -> list[tuple[int, str]]:
    sites = []
    for g in G.generators:
        q = next(i for i, ch in enumerate(g.label) if ch != "I")
        sites.append((q, g.label[q]))
    return sites


def anticommutant_representative(G: MaximalStabilizerGroup, s: Syndrome) -> PauliString:
    """Canonical Pauli with syndrome ``s`` (X[s] for the Z group, Z[s] for the X group)."""
    G._require_product_form()
    if s.n != G.n:
        raise DimensionError("syndrome length does not match the group")
    label = ["I"] * G.n
    for bit, (q, kind) in zip(s.bits, _generator_sites(G)):
        if bit:
            label[q] = _FLIP[kind]
    return PauliString.from_label("".join(label))


def unique_decompose(G: MaximalStabilizerGroup, alpha: PauliString) -> Decomposition:
    """Split alpha = i^k * beta * gamma with beta canonical and gamma in G."""
    beta = anticommutant_representative(G, syndrome(G, alpha))
    gamma = PauliString(alpha.n, alpha.x ^ beta.x, alpha.z ^ beta.z)
    prod = pauli_multiply(beta, gamma)
    return Decomposition((-prod.phase_exp) % 4, beta, gamma)


def stabilizer_state(G: MaximalStabilizerGroup) -> np.ndarray:
    """Common +1 eigenvector of all generators of a product-form group."""
    G._require_product_form()
    factors = [None] * G.n
    for q, kind in _generator_sites(G):
        factors[q] = _ONE_QUBIT_STATES[kind]
    psi = np.ones(1, dtype=complex)
    for f in factors:
        psi = np.kron(psi, f)
    return psi


def _check_state(psi: np.ndarray, n: int):
    if psi.shape != (1 << n,):
        raise DimensionError(f"state has shape {psi.shape}, expected ({1 << n},)")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
        raise NormalizationError("state is not normalized")


def syndrome_distribution(psi: np.ndarray, G: MaximalStabilizerGroup) -> np.ndarray:
    """Exact probabilities of every syndrome value for the projective measurement."""
    psi = np.asarray(psi, dtype=complex)
    _check_state(psi, G.n)
    branches = psi[None, :]
    for g in G.generators:
        gp = branches @ to_dense(g).T
        branches = np.stack([(branches + gp) / 2, (branches - gp) / 2], axis=1).reshape(-1, psi.size)
    return np.sum(np.abs(branches) ** 2, axis=1)


def syndrome_measurement(psi: np.ndarray, G: MaximalStabilizerGroup, mode: str = "exact",
                         rng: np.random.Generator | None = None):
    """Exact syndrome distribution, or one sampled :class:`Syndrome`."""
    probs = syndrome_distribution(psi, G)
    if mode == "exact":
        return probs
    if mode == "sample":
        rng = np.random.default_rng() if rng is None else rng
        probs = np.clip(probs, 0, None)
        return Syndrome(G.n, int(rng.choice(probs.size, p=probs / probs.sum())))
    raise ValueError(f"unknown mode {mode!r}")
