"""Width criterion from long-range spin correlations on a ring.

``chi`` sums every correlator at ring distance >= 2. If entanglement only
links nearest neighbours those correlators factorize into Bloch vectors, and
the classical minimum of a circulant quadratic form bounds ``chi`` from below.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg_core import hermitian_eig
from .reports import VIOLATION_TOL, BoundReport
from .spin_ops import ring_sum, build_H1, collective_spin, expectation, squared_norm, two_point_correlator
from .states import spiral_bloch_vectors

FLAG_TOL = 1e-9
MAX_SCAN_SITES = 12


def _check_chi_sites(n: int) -> None:
    if n < 5:
        raise ValueError(f"chi needs N >= 5, got {n}")


def chi(state: np.ndarray, n: int, method: str = "correlators") -> float:
    """Sum of ``<sigma_j . sigma_{j+k}>`` over all j and ring offsets ``2 <= k <= N - 2``.

    ``method="operators"`` evaluates ``<J_c^2 - 2 H1> - 3N`` instead; the two
    agree identically.
    """
    _check_chi_sites(n)
    if method == "correlators":
        total = 0.0
        for j in range(1, n + 1):
            for k in range(2, n - 1):
                total += two_point_correlator(state, j, (j + k - 1) % n + 1)
        return total
    if method == "operators":
        return squared_norm(collective_spin(n), state) - 2 * expectation(build_H1(n), state) - 3 * n
    raise ValueError(f"unknown method {method!r}")


def chi_classical_bound(n: int) -> float:
    """Lowest ``chi`` reachable when entanglement spans at most two neighbouring sites."""
    _check_chi_sites(n)
    return -n * np.sin(3 * np.pi / n) / np.sin(np.pi / n)


def chi_width_report(state: np.ndarray, n: int) -> BoundReport:
    return BoundReport("chi_width2", chi(state, n), chi_classical_bound(n), "lower", {"n": n}, VIOLATION_TOL)


@dataclass(frozen=True)
class CirculantSpec:
    """First row ``c_0..c_{N-1}`` of a symmetric circulant matrix."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", c)
        if np.max(np.abs(c[1:] - c[1:][::-1]), initial=0.0) > 1e-12:
            raise ValueError("circulant coefficients must satisfy c_n = c_(N-n)")

    @property
    def n(self) -> int:
        return len(self.coefficients)

    def matrix(self) -> np.ndarray:
        idx = np.arange(self.n)
        return self.coefficients[(idx[None, :] - idx[:, None]) % self.n]

    @classmethod
    def chi_matrix(cls, n: int) -> "CirculantSpec":
        c = np.zeros(n)
        c[2 : n - 1] = 1.0
        return cls(c)

    @classmethod
    def ring(cls, n: int, couplings: dict[int, float]) -> "CirculantSpec":
        """Symmetric spec with ``c_k = c_(N-k) = couplings[k]``."""
        c = np.zeros(n)
        for k, v in couplings.items():
            c[k % n] += v
            if (n - k) % n != k % n:
                c[(n - k) % n] += v
        return cls(c)


def circulant_eigenvalues(spec: CirculantSpec) -> np.ndarray:
    """``lambda_m = sum_n c_n exp(2 pi i m n / N)`` for ``m = 0..N-1`` (real)."""
    n = spec.n
    m = np.arange(n)
    phases = np.exp(2j * np.pi * np.outer(m, m) / n)
    return (phases @ spec.coefficients).real


def circulant_min_energy(spec: CirculantSpec) -> float:
    """Minimum of ``sum_jk c_|j-k| x_j . x_k`` over Bloch vectors with ``|x_j| <= 1``."""
    lam_min = circulant_eigenvalues(spec).min()
    if lam_min > 1e-12:
        raise ValueError("minimum eigenvalue is positive; the minimum is not at unit-length vectors")
    return spec.n * float(min(lam_min, 0.0))


def circulant_minimizer(spec: CirculantSpec) -> np.ndarray:
    """Planar spiral Bloch vectors attaining :func:`circulant_min_energy`."""
    m = int(np.argmin(circulant_eigenvalues(spec)))
    return spiral_bloch_vectors(spec.n, m)


def circulant_form(spec: CirculantSpec, bloch: np.ndarray) -> float:
    return float(np.einsum("jk,ja,ka->", spec.matrix(), bloch, bloch))


def h_circulant(n: int, alpha: float) -> float:
    """Per-site lower bound on ``<H2>`` for fully separable states."""
    m = np.arange(n)
    return float(np.min(np.cos(2 * np.pi * m / n) + alpha * np.cos(4 * np.pi * m / n)))


def _check_alpha(alpha: float) -> None:
    if alpha <= -0.5:
        raise ValueError("the 2-producible bound has a pole at alpha = -1/2; need alpha > -1/2")


def c_single(alpha: float) -> float:
    _check_alpha(alpha)
    return 1.0 + alpha


def c_double(alpha: float) -> float:
    _check_alpha(alpha)
    return 2 * (1.0 + alpha) + 1.0 / (1.0 + 2 * alpha)


def h_2prod(alpha: float) -> float:
    """Per-site magnitude of the ``<H2>`` floor for 2-producible states."""
    _check_alpha(alpha)
    return 1.0 + alpha + 1.0 / (2 + 4 * alpha)


@dataclass(frozen=True)
class AlphaScanRow:
    n: int
    alpha: float
    ground_energy: float
    chi: float
    chi_ground_average: float
    degeneracy: int
    bound_circulant: float
    bound_2prod: float
    bound_chi_classical: float

    @property
    def flag_entangled(self) -> bool:
        return self.ground_energy < self.bound_circulant - FLAG_TOL

    @property
    def flag_multipartite(self) -> bool:
        return self.ground_energy < self.bound_2prod - FLAG_TOL

    @property
    def flag_width3(self) -> bool:
        return self.chi < self.bound_chi_classical - FLAG_TOL


def _chi_operator(n: int) -> np.ndarray:
    # sum_j sum_{k=2}^{N-2} sigma_j . sigma_{j+k} as a dense matrix
    out = np.zeros((2**n, 2**n))
    for k in range(2, n - 1):
        out += ring_sum(n, k)
    return out


def scan_alpha(n: int, alphas: Iterable[float], workers: int = 1) -> list[AlphaScanRow]:
    """Ground state of H2 across ``alphas`` with its energy, ``chi`` and all bounds.

    ``chi`` is taken on the eigenvector returned by the solver;
    ``chi_ground_average`` averages it over an orthonormal basis of the
    (possibly degenerate) ground space.
    """
    _check_chi_sites(n)
    if n > MAX_SCAN_SITES:
        raise ValueError(f"dense ground states are limited to N <= {MAX_SCAN_SITES}")
    nn, nnn = ring_sum(n, 1), ring_sum(n, 2)
    chi_op = _chi_operator(n)
    chi_bound = chi_classical_bound(n)

    def row(alpha: float) -> AlphaScanRow:
        w, v = hermitian_eig(nn + alpha * nnn)
        deg = int(np.sum(w <= w[0] + 1e-8))
        g = v[:, 0]
        basis = v[:, :deg]
        return AlphaScanRow(
            n=n,
            alpha=float(alpha),
            ground_energy=float(w[0]),
            chi=float(g @ chi_op @ g),
            chi_ground_average=float(np.trace(basis.T @ chi_op @ basis) / deg),
            degeneracy=deg,
            bound_circulant=n * h_circulant(n, alpha),
            bound_2prod=-n * h_2prod(alpha),
            bound_chi_classical=chi_bound,
        )

    alphas = [float(a) for a in alphas]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, alphas))
    return [row(a) for a in alphas]


def detect_jumps(rows: Sequence[AlphaScanRow], threshold: float = 0.1) -> list[tuple[float, float]]:
    """Alpha intervals where ``chi`` changes by more than ``threshold * N`` between grid points.

    Adjacent flagged steps are merged into one interval.
    """
    if len(rows) < 2:
        return []
    n = rows[0].n
    intervals: list[list[float]] = []
    for prev, cur in zip(rows, rows[1:]):
        if abs(cur.chi - prev.chi) > threshold * n:
            if intervals and intervals[-1][1] == prev.alpha:
                intervals[-1][1] = cur.alpha
            else:
                intervals.append([prev.alpha, cur.alpha])
    return [tuple(iv) for iv in intervals]


def first_onset(rows: Sequence[AlphaScanRow], flag: str) -> float | None:
    """Smallest alpha at which the named flag is on."""
    for r in rows:
        if getattr(r, flag):
            return r.alpha
    return None


def flag_crossings(rows: Sequence[AlphaScanRow], flag: str) -> list[float]:
    """Midpoints between neighbouring grid points where the flag switches."""
    out = []
    for prev, cur in zip(rows, rows[1:]):
        if getattr(prev, flag) != getattr(cur, flag):
            out.append(0.5 * (prev.alpha + cur.alpha))
    return out
