"""Dense operators, Hermitian exponentials and the norm families."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .pauli import pauli_coefficients

HERMITIAN_TOL = 1e-9


def _as_square(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A


def is_hermitian(H, tol: float = HERMITIAN_TOL) -> bool:
    H = _as_square(H)
    return bool(np.max(np.abs(H - H.conj().T), initial=0.0) <= tol * max(1.0, np.max(np.abs(H), initial=0.0)))


def is_unitary(U, tol: float = 1e-9) -> bool:
    U = _as_square(U)
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol)


def hermitian_expm(H, t: float) -> np.ndarray:
    """e^{-iHt} through an eigendecomposition of the Hermitian H."""
    H = _as_square(H)
    if not is_hermitian(H):
        raise ValueError("hermitian_expm needs a Hermitian matrix")
    w, v = np.linalg.eigh((H + H.conj().T) / 2)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def operator_norm(A) -> float:
    return float(np.linalg.norm(_as_square(A), 2))


def schatten_norm(A, p: float) -> float:
    """Normalized Schatten p-norm (Tr|A|^p / dim)^(1/p); p = inf is the operator norm."""
    if p < 1:
        raise ValueError("Schatten norms need p >= 1")
    A = _as_square(A)
    sv = np.linalg.svd(A, compute_uv=False)
    if np.isinf(p):
        return float(sv.max(initial=0.0))
    return float((np.sum(sv**p) / A.shape[0]) ** (1.0 / p))


def pauli_norm(A, p: float) -> float:
    """l_p norm of the Pauli coefficient vector; p = 0 counts nonzero entries."""
    if p < 0:
        raise ValueError("Pauli norms need p >= 0")
    c = np.abs(pauli_coefficients(_as_square(A))).ravel()
    if p == 0:
        scale = c.max(initial=0.0)
        return float(np.count_nonzero(c > 1e-12 * scale)) if scale > 0 else 0.0
    if np.isinf(p):
        return float(c.max(initial=0.0))
    return float(np.sum(c**p) ** (1.0 / p))


def operator_norm_distance(U, V) -> float:
    """Largest singular value of U - V."""
    U, V = _as_square(U), _as_square(V)
    if U.shape != V.shape:
        raise DimensionError(f"shapes differ: {U.shape} vs {V.shape}")
    return operator_norm(U - V)
