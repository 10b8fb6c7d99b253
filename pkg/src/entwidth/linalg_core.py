"""Dense complex linear algebra on qubit registers.

Convention used throughout the package: sites are numbered 1..n and site 1
is the most significant bit of the computational-basis index, so that
``np.reshape(psi, (2,) * n)`` puts site ``j`` on axis ``j - 1``.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.linalg import eigsh

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)

HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
NORM_ATOL = 1e-12
PSD_ATOL = 1e-10

# above this dimension ground_state switches to Lanczos
_DENSE_EIG_LIMIT = 4096


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of operators, left factor most significant."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, ops)


def n_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if dim < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T), initial=0.0) <= atol


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol


def _check_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_eig(a: np.ndarray, atol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending eigenvalues and the matching orthonormal eigenvectors as
    columns. The Hermiticity check is relative to the largest entry.
    """
    a = _check_square(a)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > atol * scale:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh(a)


def ground_state(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue of ``h`` and one normalized eigenvector for it.

    In a degenerate ground space an arbitrary member is returned.
    """
    h = _check_square(h)
    if h.shape[0] <= _DENSE_EIG_LIMIT:
        w, v = hermitian_eig(h)
        return float(w[0]), v[:, 0]
    if not is_hermitian(h, 1e-10 * max(1.0, float(np.max(np.abs(h))))):
        raise ValueError("matrix is not Hermitian")
    w, v = eigsh(h, k=1, which="SA", tol=1e-12)
    psi = v[:, 0] / np.linalg.norm(v[:, 0])
    return float(w[0]), psi


def ground_space(h: np.ndarray, atol: float = 1e-8) -> tuple[float, np.ndarray]:
    """Ground energy and an orthonormal basis (columns) of the full ground space."""
    w, v = hermitian_eig(h)
    k = int(np.sum(w <= w[0] + atol))
    return float(w[0]), v[:, :k]


def as_state(psi: Sequence[complex] | np.ndarray, atol: float = NORM_ATOL) -> np.ndarray:
    """Validate a pure state vector (power-of-two length, unit norm)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("a pure state must be a 1-d amplitude vector")
    n_qubits(psi.size)
    if abs(np.linalg.norm(psi) - 1.0) > atol:
        raise ValueError(f"state is not normalized (norm {np.linalg.norm(psi):.3e})")
    return psi


def as_density(rho: np.ndarray, atol: float = NORM_ATOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    rho = _check_square(np.asarray(rho, dtype=complex))
    n_qubits(rho.shape[0])
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -PSD_ATOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def to_density(state: np.ndarray) -> np.ndarray:
    """Density matrix of a pure state vector; matrices pass through unchanged."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def _sites_to_axes(sites: Iterable[int], n: int) -> list[int]:
    axes = []
    for s in sites:
        if not 1 <= s <= n:
            raise ValueError(f"site {s} out of range 1..{n}")
        axes.append(s - 1)
    return axes


def partial_transpose(rho: np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """Transpose the tensor factors of ``rho`` belonging to the given sites."""
    rho = _check_square(np.asarray(rho))
    n = n_qubits(rho.shape[0])
    axes = _sites_to_axes(subset, n)
    t = rho.reshape((2,) * (2 * n))
    perm = list(range(2 * n))
    for ax in set(axes):
        perm[ax], perm[n + ax] = perm[n + ax], perm[ax]
    return t.transpose(perm).reshape(rho.shape)


def apply_site(psi: np.ndarray, op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Apply a single-qubit operator to ``site`` of an n-qubit state vector."""
    t = np.asarray(psi).reshape((2,) * n)
    t = np.tensordot(op, t, axes=([1], [site - 1]))
    return np.moveaxis(t, 0, site - 1).reshape(-1)


def reduced_density(state: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``sites`` (kept in the given order)."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits(state.shape[0])
    keep = _sites_to_axes(sites, n)
    rest = [ax for ax in range(n) if ax not in keep]
    k = len(keep)
    if state.ndim == 1:
        t = state.reshape((2,) * n).transpose(keep + rest).reshape(2**k, -1)
        return t @ t.conj().T
    t = state.reshape((2,) * (2 * n))
    t = t.transpose(keep + rest + [n + ax for ax in keep] + [n + ax for ax in rest])
    t = t.reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    return np.einsum("arbr->ab", t)
