"""Width criterion from the variance of the position-weighted spin vector.

States whose entanglement spans at most ``w`` sites are products of blocks;
with blocks of at most two spins the variance splits into two-particle terms,
each bounded below by a closed-form minimum. Optimizing over admissible
pairings gives a lower bound that long-range entangled states can beat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg_core import PAULIS, I2
from .reports import VIOLATION_TOL, BoundReport
from .spin_ops import ChainGeometry, bloch_vector, build_J, two_point_correlator, variance_sum
from .states import PairingConfiguration

EPSILON0 = 2.0 - np.sqrt(3.0)
MAX_MATCHING_SITES = 20

_PAIR_OPS = [(np.kron(p, I2), np.kron(I2, p)) for p in PAULIS]


@dataclass(frozen=True)
class EpsilonPair:
    """Coefficient pair normalized so that ``|a_major| >= |a_minor|``."""

    a_major: float
    epsilon: float

    @classmethod
    def from_coefficients(cls, a_j: float, a_k: float) -> "EpsilonPair":
        if abs(a_k) > abs(a_j):
            a_j, a_k = a_k, a_j
        if a_j == 0:
            return cls(0.0, 0.0)
        return cls(float(a_j), float(a_k / a_j))


def two_particle_variance(a_j: float, a_k: float, state: np.ndarray) -> float:
    """Variance of ``a_j sigma_1 + a_k sigma_2`` on a two-qubit state.

    Evaluated from the two Bloch vectors and the spin-spin correlator only.
    """
    s_j = bloch_vector(state, 1)
    s_k = bloch_vector(state, 2)
    corr = two_point_correlator(state, 1, 2)
    mean = a_j * s_j + a_k * s_k
    value = 3 * (a_j**2 + a_k**2) - (mean @ mean - 2 * a_j * a_k * corr)
    return max(float(value), 0.0)


def min_two_particle_variance(a_j: float, a_k: float) -> float:
    """Minimum over all two-qubit states of the two-particle variance.

    Two branches in ``eps = a_minor / a_major``, joined continuously at
    ``eps0 = 2 - sqrt(3)``; for ``eps >= eps0`` the singlet is optimal.
    """
    p = EpsilonPair.from_coefficients(a_j, a_k)
    a2, e = p.a_major**2, p.epsilon
    if a2 == 0:
        return 0.0
    if e <= EPSILON0:
        return a2 * (2 + 2 * e**2 - 4 * e**2 / (1 - e) ** 2)
    return 3 * a2 * (1 - e) ** 2


def brute_force_min_two_particle(
    a_j: float,
    a_k: float,
    n_starts: int = 1000,
    seed: int = 0,
    max_iter: int = 300,
) -> float:
    """Numerical minimum of the two-particle variance over pure two-qubit states.

    Multistart local descent on the full complex state manifold. Each step
    replaces ``psi`` by the ground state of ``sum_l (J_l - <J_l>_psi)^2``,
    which never increases the variance. Starts are Haar random and seeded;
    the best few end points are polished with BFGS.
    """
    if n_starts < 100:
        raise ValueError("use at least 100 random starts")
    rng = np.random.default_rng(seed)
    stack = np.stack([a_j * x + a_k * y for x, y in _PAIR_OPS])
    sq = np.einsum("lij,ljk->ik", stack, stack)

    def variance(psi):
        j_psi = psi @ stack.transpose(0, 2, 1)  # (3, starts, 4)
        means = np.einsum("si,lsi->sl", psi.conj(), j_psi).real
        second = np.einsum("si,ij,sj->s", psi.conj(), sq, psi).real
        return second - np.sum(means**2, axis=1), means

    psi = rng.normal(size=(n_starts, 4)) + 1j * rng.normal(size=(n_starts, 4))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    values, means = variance(psi)
    active = np.arange(n_starts)
    for _ in range(max_iter):
        m = means[active]
        shifted = sq[None] - 2 * np.tensordot(m, stack, axes=(1, 0)) + np.sum(m**2, axis=1)[:, None, None] * np.eye(4)
        psi[active] = np.linalg.eigh(shifted)[1][:, :, 0]
        new_values, new_means = variance(psi[active])
        still = values[active] - new_values > 1e-15
        values[active], means[active] = new_values, new_means
        active = active[still]
        if active.size == 0:
            break

    def objective(x):
        v = (x[:4] + 1j * x[4:]) / np.linalg.norm(x[:4] + 1j * x[4:])
        return variance(v[None])[0][0]

    best = float(values.min())
    for i in np.argsort(values)[:5]:
        x0 = np.concatenate([psi[i].real, psi[i].imag])
        best = min(best, float(minimize(objective, x0, method="BFGS", options={"gtol": 1e-12}).fun))
    return max(best, 0.0)


def _pair_cost_matrix(a: np.ndarray) -> np.ndarray:
    n = len(a)
    cost = np.empty((n, n))
    for j in range(n):
        for k in range(n):
            cost[j, k] = min_two_particle_variance(a[j], a[k]) if j != k else np.inf
    return cost


def _check_width(n: int, w: int) -> None:
    if not 1 <= w <= n:
        raise ValueError(f"width must lie in 1..{n}, got {w}")


def width_bound_simple(geometry: ChainGeometry, lambda_over_d: float, w: int) -> float:
    """Cheap lower bound: every site pays half its cheapest admissible pair term.

    Partners ``k`` are restricted to ``1 <= |j - k| <= w - 1``. A site may also
    stay single (cost ``2 a_j^2``), so each site contributes
    ``min(2 a_j^2, min_k cost(j, k) / 2)``; for ``w = 1`` this is the
    separable value ``sum_j 2 a_j^2``.
    """
    _check_width(geometry.n, w)
    a = geometry.coefficients(lambda_over_d)
    single = 2 * a**2
    if w == 1:
        return float(single.sum())
    cost = _pair_cost_matrix(a)
    j, k = np.indices(cost.shape)
    cost[np.abs(j - k) > w - 1] = np.inf
    return float(np.minimum(single, 0.5 * cost.min(axis=1)).sum())


def optimal_pairing(a: Sequence[float], w: int) -> tuple[float, PairingConfiguration]:
    """Exact minimum of the pair/single cost over pairings of span at most ``w``.

    Dynamic programme over sites left to right; the state is the occupancy of
    the next ``w - 1`` sites, so crossing pairings are covered. Cost is
    ``O(N w 2^(w-1))``.
    """
    a = np.asarray(a, dtype=float)
    n = len(a)
    _check_width(n, w)
    if n > MAX_MATCHING_SITES:
        raise ValueError(f"exact pairing search is limited to N <= {MAX_MATCHING_SITES}; use width_bound_simple")
    cost = _pair_cost_matrix(a)
    look = w - 1
    n_masks = 1 << look
    masks = np.arange(n_masks)
    best = np.zeros(n_masks)
    choice = np.zeros((n, n_masks), dtype=int)  # 0 = single / already used, s > 0 = pair (j, j + s)
    for j in range(n - 1, -1, -1):
        nxt = best
        occupied = (masks & 1).astype(bool)
        new = nxt[masks >> 1] + np.where(occupied, 0.0, 2 * a[j] ** 2)
        ch = np.zeros(n_masks, dtype=int)
        for s in range(1, look + 1):
            if j + s >= n:
                break
            ok = ~occupied & ~((masks >> s) & 1).astype(bool)
            cand = np.full(n_masks, np.inf)
            cand[ok] = cost[j, j + s] + nxt[(masks[ok] | (1 << s)) >> 1]
            better = cand < new
            new = np.where(better, cand, new)
            ch = np.where(better, s, ch)
        best = new
        choice[j] = ch
    # walk the choices from the empty window
    pairs, singles, mask = [], {}, 0
    for j in range(n):
        s = choice[j, mask]
        if s:
            pairs.append((j + 1, j + 1 + s))
            mask |= 1 << s
        elif not mask & 1:
            singles[j + 1] = (0.0, 0.0, 1.0)
        mask >>= 1
    return float(best[0]), PairingConfiguration(n, tuple(pairs), singles)


def width_bound_matching(geometry: ChainGeometry, lambda_over_d: float, w: int) -> float:
    """Exact pairing-optimized lower bound on the variance for width ``<= w``."""
    value, _ = optimal_pairing(geometry.coefficients(lambda_over_d), w)
    return value


def pairing_lower_limit(config: PairingConfiguration, a: Sequence[float]) -> float:
    """Smallest variance reachable with entanglement only inside the given pairs."""
    a = np.asarray(a, dtype=float)
    pairs = sum(min_two_particle_variance(a[j - 1], a[k - 1]) for j, k in config.pairs)
    singles = sum(2 * a[s - 1] ** 2 for s in config.singles)
    return float(pairs + singles)


def state_variance(state: np.ndarray, geometry: ChainGeometry, lambda_over_d: float) -> float:
    return variance_sum(build_J(geometry, lambda_over_d).components, state)


@dataclass(frozen=True)
class WidthBoundReport:
    width: int
    lambda_over_d: float
    bound_simple: float
    bound_matching: float | None = None
    methods: tuple[str, ...] = field(default=("simple",))


def width_bounds(geometry: ChainGeometry, lambda_over_d: float, w: int, matching: bool = True) -> WidthBoundReport:
    simple = width_bound_simple(geometry, lambda_over_d, w)
    if not matching:
        return WidthBoundReport(w, lambda_over_d, simple)
    exact = width_bound_matching(geometry, lambda_over_d, w)
    return WidthBoundReport(w, lambda_over_d, simple, exact, ("simple", "matching"))


def detect_width_violation(
    state: np.ndarray,
    geometry: ChainGeometry,
    lambda_over_d: float,
    w: int,
    method: str = "matching",
) -> BoundReport:
    """Flag states whose variance is below what width ``<= w`` allows."""
    if method == "matching":
        bound = width_bound_matching(geometry, lambda_over_d, w)
    elif method == "simple":
        bound = width_bound_simple(geometry, lambda_over_d, w)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BoundReport(
        criterion=f"variance_width_{method}",
        value=state_variance(state, geometry, lambda_over_d),
        bound=bound,
        sense="lower",
        params={"n": geometry.n, "x0": geometry.x0, "lambda_over_d": lambda_over_d, "width": w},
        tol=VIOLATION_TOL,
    )


def violation_windows(
    state: np.ndarray,
    geometry: ChainGeometry,
    lambda_grid: Sequence[float],
    widths: Sequence[int],
    method: str = "matching",
) -> list[tuple[float, float]]:
    """Contiguous runs of grid points where the state violates every listed width bound."""
    windows, start, last = [], None, None
    for lam in lambda_grid:
        hit = all(detect_width_violation(state, geometry, lam, w, method).violated for w in widths)
        if hit and start is None:
            start = lam
        if not hit and start is not None:
            windows.append((float(start), float(last)))
            start = None
        last = lam
    if start is not None:
        windows.append((float(start), float(last)))
    return windows
