"""Chain geometry and the spin observables built on it.

Positions are measured in units of the lattice spacing ``d`` (``d = 1`` by
default), so wavelengths enter every interface as ``lambda_over_d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg_core import PAULIS, apply_site, n_qubits, reduced_density

_SIGMA_DOT_SIGMA = sum(np.kron(p, p) for p in PAULIS).real


@dataclass(frozen=True)
class ChainGeometry:
    """Equally spaced chain, ``x_j = x0 + j * d`` for ``j = 1..n``."""

    n: int
    x0: float = -0.5
    d: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a chain needs at least two sites")
        if self.d <= 0:
            raise ValueError("spacing d must be positive")

    @property
    def positions(self) -> np.ndarray:
        return self.x0 + self.d * np.arange(1, self.n + 1)

    def coefficients(self, lambda_over_d: float) -> np.ndarray:
        """Site weights ``a_j = sin(2 pi x_j / lambda)``."""
        if lambda_over_d == 0:
            raise ValueError("lambda must be non-zero")
        return np.sin(2 * np.pi * self.positions / (lambda_over_d * self.d))


@dataclass(frozen=True)
class SiteSum:
    """Weighted single-site operator ``sum_j c_j P^(j)`` kept in factored form."""

    coefficients: np.ndarray
    pauli: np.ndarray

    @property
    def n(self) -> int:
        return len(self.coefficients)

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi, dtype=complex)
        for j, c in enumerate(self.coefficients, start=1):
            if c != 0:
                out += c * apply_site(psi, self.pauli, j, self.n)
        return out

    def to_dense(self) -> np.ndarray:
        dim = 2**self.n
        out = np.zeros((dim, dim), dtype=complex)
        for j, c in enumerate(self.coefficients, start=1):
            if c != 0:
                left = np.eye(2 ** (j - 1))
                right = np.eye(2 ** (self.n - j))
                out += c * np.kron(np.kron(left, self.pauli), right)
        return out


def spin_vector(coefficients: Sequence[float]) -> tuple[SiteSum, SiteSum, SiteSum]:
    c = np.asarray(coefficients, dtype=float)
    return tuple(SiteSum(c, p) for p in PAULIS)


@dataclass(frozen=True)
class GradientObservable:
    geometry: ChainGeometry
    lambda_over_d: float
    coefficients: np.ndarray
    components: tuple = field(repr=False)

    @property
    def Jx(self) -> SiteSum:
        return self.components[0]

    @property
    def Jy(self) -> SiteSum:
        return self.components[1]

    @property
    def Jz(self) -> SiteSum:
        return self.components[2]


def build_J(geometry: ChainGeometry, lambda_over_d: float) -> GradientObservable:
    """Position-weighted spin vector ``J_l = sum_j sin(2 pi x_j / lambda) sigma_l^(j)``."""
    a = geometry.coefficients(lambda_over_d)
    return GradientObservable(geometry, float(lambda_over_d), a, spin_vector(a))


def collective_spin(n: int) -> tuple[SiteSum, SiteSum, SiteSum]:
    return spin_vector(np.ones(n))


def gradient_coefficients(n: int) -> np.ndarray:
    if n % 2:
        raise ValueError("the gradient operator needs an even number of sites")
    k = np.arange(1, n + 1)
    return (2 * k - n - 1).astype(float)


def build_B(n: int) -> tuple[SiteSum, SiteSum, SiteSum]:
    """Linear-gradient spin vector with integer weights ``2k - N - 1``."""
    return spin_vector(gradient_coefficients(n))


def heisenberg_bond(n: int, j: int, k: int) -> np.ndarray:
    """Dense real matrix of ``sigma_j . sigma_k`` (equal to ``2 SWAP_jk - 1``)."""
    if j == k or not (1 <= j <= n and 1 <= k <= n):
        raise ValueError(f"invalid bond ({j}, {k}) for {n} sites")
    dim = 2**n
    idx = np.arange(dim)
    bj, bk = n - j, n - k
    diff = ((idx >> bj) ^ (idx >> bk)) & 1
    swapped = idx ^ (diff << bj) ^ (diff << bk)
    out = np.zeros((dim, dim))
    out[idx, swapped] += 2.0
    out[idx, idx] -= 1.0
    return out


def build_H1(n: int) -> np.ndarray:
    """Periodic nearest-neighbour Heisenberg ring."""
    if n < 3:
        raise ValueError("H1 needs N >= 3 (N = 2 is a degenerate ring)")
    return ring_sum(n, 1)


def build_H2(n: int, alpha: float) -> np.ndarray:
    """J1-J2 ring: nearest-neighbour plus ``alpha`` times next-nearest-neighbour coupling."""
    if n < 5:
        raise ValueError("H2 needs N >= 5")
    return ring_sum(n, 1) + alpha * ring_sum(n, 2)


def ring_sum(n: int, distance: int) -> np.ndarray:
    # sum over j = 1..n of sigma_j . sigma_{j+distance}, one term per j
    out = np.zeros((2**n, 2**n))
    for j in range(1, n + 1):
        out += heisenberg_bond(n, j, (j + distance - 1) % n + 1)
    return out


def cyclic_shift(n: int) -> np.ndarray:
    """Permutation matrix moving the state of site j to site j + 1 (mod n)."""
    dim = 2**n
    idx = np.arange(dim)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    shifted = np.roll(bits, 1, axis=1)
    target = shifted @ (1 << (n - 1 - np.arange(n)))
    out = np.zeros((dim, dim))
    out[target, idx] = 1.0
    return out


def _dense(op) -> np.ndarray:
    return op.to_dense() if isinstance(op, SiteSum) else np.asarray(op)


def _apply(op, psi: np.ndarray) -> np.ndarray:
    if isinstance(op, SiteSum):
        return op.matvec(psi)
    return np.asarray(op) @ psi


def _check_dims(op, state: np.ndarray) -> None:
    dim = 2**op.n if isinstance(op, SiteSum) else np.asarray(op).shape[0]
    if dim != state.shape[0]:
        raise ValueError(f"operator dimension {dim} does not match state dimension {state.shape[0]}")


def expectation(op, state: np.ndarray) -> float:
    """Real part of ``<op>`` for a state vector or density matrix."""
    state = np.asarray(state, dtype=complex)
    _check_dims(op, state)
    if state.ndim == 1:
        return float(np.vdot(state, _apply(op, state)).real)
    return float(np.trace(_dense(op) @ state).real)


def second_moment(op, state: np.ndarray) -> float:
    """``<op^2>`` for a Hermitian operator."""
    state = np.asarray(state, dtype=complex)
    _check_dims(op, state)
    if state.ndim == 1:
        v = _apply(op, state)
        return float(np.vdot(v, v).real)
    a = _dense(op)
    return float(np.trace(a @ a @ state).real)


def variance_sum(ops, state: np.ndarray, atol: float = 1e-10) -> float:
    """``sum_l <O_l^2> - <O_l>^2``; tiny negative round-off is clamped to zero."""
    total = 0.0
    for op in ops:
        total += second_moment(op, state) - expectation(op, state) ** 2
    if total < -atol:
        raise ArithmeticError(f"negative variance {total:.3e}; operators not Hermitian?")
    return max(total, 0.0)


def squared_norm(ops, state: np.ndarray) -> float:
    """``<O_x^2 + O_y^2 + O_z^2>``."""
    return sum(second_moment(op, state) for op in ops)


def two_point_correlator(state: np.ndarray, j: int, k: int) -> float:
    """``<sigma_j . sigma_k>`` for ``j != k``."""
    if j == k:
        raise ValueError("correlator needs two distinct sites")
    rho2 = reduced_density(state, [j, k])
    return float(np.trace(_SIGMA_DOT_SIGMA @ rho2).real)


def bloch_vector(state: np.ndarray, site: int) -> np.ndarray:
    rho1 = reduced_density(state, [site])
    return np.array([np.trace(p @ rho1).real for p in PAULIS])


def state_sites(state: np.ndarray) -> int:
    return n_qubits(np.asarray(state).shape[0])
