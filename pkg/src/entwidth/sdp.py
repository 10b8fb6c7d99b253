"""Dense primal log-barrier solver for PPT-constrained state optimization.

Solves::

    minimize    tr(C rho)
    subject to  tr(rho) = 1,  rho >= 0,  rho^{T_S} >= 0 for every listed site set S

``rho`` is parameterized in an orthonormal basis of Hermitian matrices
(real symmetric when ``C`` is real, which loses nothing: the real part of an
optimal ``rho`` is feasible and optimal). Every block map is a permutation of
matrix entries, so gradient and Hessian of ``-log det`` are assembled by
gathering entries of the block inverses.

Lower bounds come from the dual: for any PSD ``Z_S``,
``lambda_min(C - sum_S Z_S^{T_S})`` is a certified lower bound on the optimum.
The central path supplies ``Z_S = (rho^{T_S})^{-1} / t``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky, eigh

from .linalg_core import n_qubits, partial_transpose

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SdpProblem:
    """Minimize ``tr(objective @ rho)`` over unit-trace PSD ``rho`` with PPT blocks.

    ``transposed_sites`` lists, per extra block, the sites whose partial
    transpose must stay PSD. The identity block is always present.
    """

    objective: np.ndarray
    transposed_sites: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        c = np.asarray(self.objective)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("objective must be square")
        if np.max(np.abs(c - c.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(c))):
            raise ValueError("objective must be Hermitian")
        n = n_qubits(c.shape[0])
        blocks = tuple(tuple(sorted(int(s) for s in b)) for b in self.transposed_sites)
        for b in blocks:
            if not b or any(not 1 <= s <= n for s in b):
                raise ValueError(f"invalid transposed site set {b} for {n} qubits")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "transposed_sites", blocks)

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits(self.dim)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return ((),) + self.transposed_sites


@dataclass
class SdpSolution:
    optimum: float
    rho: np.ndarray = field(repr=False)
    duality_gap: float
    iterations: int
    dual_bound: float
    min_block_eigenvalue: float


class SdpNotConverged(RuntimeError):
    """Raised when the gap target is missed; carries the best certified bracket."""

    def __init__(self, lower: float, upper: float, iterations: int):
        super().__init__(f"SDP did not converge: optimum in [{lower:.8g}, {upper:.8g}] after {iterations} Newton steps")
        self.lower = lower
        self.upper = upper
        self.iterations = iterations


class _Basis:
    # orthonormal Hermitian basis; element u = sum_t coef[u, t] e_{row[u, t]} e_{col[u, t]}^T

    def __init__(self, dim: int, real: bool):
        a, b = np.triu_indices(dim)
        diag = a == b
        s = 1 / np.sqrt(2)
        rows = [np.stack([a, b], 1)]
        cols = [np.stack([b, a], 1)]
        coefs = [np.stack([np.where(diag, 1.0, s), np.where(diag, 0.0, s)], 1).astype(complex)]
        if not real:
            a2, b2 = np.triu_indices(dim, 1)
            rows.append(np.stack([a2, b2], 1))
            cols.append(np.stack([b2, a2], 1))
            coefs.append(np.tile([1j * s, -1j * s], (len(a2), 1)))
        self.dim = dim
        self.real = real
        self.row = np.concatenate(rows)
        self.col = np.concatenate(cols)
        coef = np.concatenate(coefs)
        self.coef = coef.real if real else coef
        self.trace = np.real(np.sum(self.coef * (self.row == self.col), axis=1))

    @property
    def size(self) -> int:
        return len(self.row)

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        d = self.dim
        flat = (self.row * d + self.col).ravel()
        w = (self.coef * x[:, None]).ravel()
        if self.real:
            return np.bincount(flat, weights=w, minlength=d * d).reshape(d, d)
        re = np.bincount(flat, weights=w.real, minlength=d * d)
        im = np.bincount(flat, weights=w.imag, minlength=d * d)
        return (re + 1j * im).reshape(d, d)

    def from_matrix(self, m: np.ndarray) -> np.ndarray:
        return np.real(np.sum(np.conj(self.coef) * m[self.row, self.col], axis=1))

    def pair_with(self, m: np.ndarray, row: np.ndarray, col: np.ndarray) -> np.ndarray:
        """``Re tr(m A(E_u))`` for each element, with A given by permuted indices."""
        return np.real(np.sum(self.coef * m[col, row], axis=1))


def _pt_indices(row: np.ndarray, col: np.ndarray, sites: Sequence[int], n: int) -> tuple[np.ndarray, np.ndarray]:
    mask = 0
    for s in sites:
        mask |= 1 << (n - s)
    return (row & ~mask) | (col & mask), (col & ~mask) | (row & mask)


def _block(rho: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    return partial_transpose(rho, sites) if sites else rho


def _newton_direction(h: np.ndarray, grad: np.ndarray, a: np.ndarray) -> np.ndarray:
    # Newton step keeping a @ x fixed, on the Jacobi-scaled Hessian (its
    # condition number grows like t^2 along the path). The component of grad
    # along a only moves the multiplier; it is huge at large t and removing it
    # first avoids cancellation.
    grad = grad - (grad @ a) / (a @ a) * a
    d = 1 / np.sqrt(np.diag(h))
    hs = h * d[:, None] * d[None, :]
    g, a = grad * d, a * d
    # numerically indefinite at large t: retry with a growing ridge (the
    # scaled Hessian has unit diagonal)
    dx = None
    for ridge in (0.0, 1e-14, 1e-12, 1e-10, 1e-8):
        try:
            factor = cho_factor(hs + ridge * np.eye(len(hs)), check_finite=False)
        except LinAlgError:
            continue
        hg, ha = cho_solve(factor, g, check_finite=False), cho_solve(factor, a, check_finite=False)
        dx = -(hg - (a @ hg) / (a @ ha) * ha)
        if -(g @ dx) >= 0:
            break
    else:
        if dx is None:
            raise LinAlgError("Newton system is not positive definite")
        # no descent direction left at working precision; the caller stops centering
    return dx * d


def _dual_bound(c, t, blocks, inverses, step) -> float:
    # Z_S = (Y - Y A_S(step) Y) / t with Y the block inverse: the dual estimate
    # after one Newton step, which is PSD whenever the decrement is below 1 and
    # satisfies stationarity to first order even slightly off the central path.
    # Any negative eigenvalues left by rounding are clipped, so the bound is
    # valid regardless.
    slack = c.copy()
    for y, b in zip(inverses[1:], blocks[1:]):
        z = (y - y @ _block(step, b) @ y) / t
        w, v = np.linalg.eigh((z + z.conj().T) / 2)
        slack = slack - _block((v * np.maximum(w, 0.0)) @ v.conj().T, b)
    return float(eigh(slack, eigvals_only=True, subset_by_index=[0, 0])[0])


def solve_sdp(
    problem: SdpProblem,
    gap_tol: float | None = None,
    mu: float = 10.0,
    max_outer: int = 60,
    max_newton: int = 200,
) -> SdpSolution:
    """Log-barrier path following with Newton centering and a certified dual bound.

    Stops once ``primal - dual <= gap_tol`` (default ``1e-6 * dim``). Raises
    :class:`SdpNotConverged` with the best bracket otherwise.
    """
    c = problem.objective
    dim, n = problem.dim, problem.n_qubits
    real = np.max(np.abs(np.imag(c))) == 0.0
    if real:
        c = np.real(c)
    gap_tol = 1e-6 * dim if gap_tol is None else gap_tol
    basis = _Basis(dim, real)
    blocks = problem.blocks
    perm = [_pt_indices(basis.row, basis.col, b, n) for b in blocks]
    c_vec = basis.pair_with(c, basis.row, basis.col)
    a_vec = basis.trace
    nu = dim * len(blocks)

    x = basis.from_matrix(np.eye(dim) / dim)
    t = dim / max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(c)))))
    newton_steps = 0
    best_lower, best_upper = -np.inf, np.inf
    best_rho = basis.to_matrix(x)

    def barrier_parts(x):
        rho = basis.to_matrix(x)
        logdet, chol = 0.0, []
        for b in blocks:
            m = _block(rho, b)
            try:
                lo = cholesky(m, lower=True, check_finite=False)
            except LinAlgError:
                return None
            logdet += 2 * np.sum(np.log(np.real(np.diag(lo))))
            chol.append(lo)
        return rho, logdet, chol

    if real:
        # element u maps to s_u (E_pq + E_qp) in each block; for symmetric Y
        # tr(Y A(E_u) Y A(E_v)) = 2 s_u s_v (Y_qp Y_pq + Y_qq Y_pp) entrywise
        scale = np.where(basis.row[:, 0] == basis.col[:, 0], 0.5, basis.coef[:, 0])
        outer_scale = 2 * np.outer(scale, scale)
        ends = [(rb[:, 0], cb[:, 0]) for rb, cb in perm]

    def hessian(inverses):
        h = np.zeros((basis.size, basis.size))
        if real:
            for y, (p, q) in zip(inverses, ends):
                yq, yp = y[q], y[p]
                h += yq[:, p] * yp[:, q] + yq[:, q] * yp[:, p]
            return h * outer_scale
        k = basis.coef
        for y, (rb, cb) in zip(inverses, perm):
            for ti in range(2):
                for si in range(2):
                    term = y[cb[:, ti][:, None], rb[:, si][None, :]] * y[cb[:, si][None, :], rb[:, ti][:, None]]
                    h += np.real(k[:, ti][:, None] * k[:, si][None, :] * term)
        return h

    for outer in range(max_outer):
        parts = barrier_parts(x)
        last_decrement = np.inf
        # loose centering early; the certificate only needs accuracy near the end
        center_tol = 1e-20 if nu / t <= 10 * gap_tol else 1e-4
        for _ in range(max_newton):
            rho, logdet, chol = parts
            inverses = [cho_solve((lo, True), np.eye(dim), check_finite=False) for lo in chol]
            grad = t * c_vec - sum(basis.pair_with(y, rb, cb) for y, (rb, cb) in zip(inverses, perm))
            h = hessian(inverses)
            dx = _newton_direction(h, grad, a_vec)
            decrement = -(grad - (grad @ a_vec) / (a_vec @ a_vec) * a_vec) @ dx
            newton_steps += 1
            if decrement <= center_tol or (decrement >= last_decrement and decrement < 1e-8):
                break
            last_decrement = decrement
            # inside the quadratic region (decrement < 1/16) the full step is
            # safe for a self-concordant barrier and only feasibility is checked;
            # an Armijo test there would drown in rounding of f at large t
            quadratic = decrement < 1 / 16
            f0 = t * (c_vec @ x) - logdet
            step = 1.0
            while step > 1e-14:
                trial = barrier_parts(x + step * dx)
                if trial is not None and (
                    quadratic or t * (c_vec @ (x + step * dx)) - trial[1] <= f0 - 0.25 * step * decrement
                ):
                    break
                step *= 0.5
            else:
                log.debug("line search stalled at decrement %.3g", decrement)
                break
            x = x + step * dx
            parts = trial
        log.debug("centered, decrement %.3g", decrement)

        rho, _, chol = parts
        primal = float(np.real(np.trace(c @ rho)))
        dual = _dual_bound(c, t, blocks, inverses, basis.to_matrix(dx))
        if primal < best_upper:
            best_upper, best_rho = primal, rho
        best_lower = max(best_lower, dual)
        log.debug("outer %d t=%.3g primal=%.10g dual=%.10g steps=%d", outer, t, primal, dual, newton_steps)
        if best_upper - best_lower <= gap_tol:
            min_eig = min(float(np.linalg.eigvalsh(_block(best_rho, b))[0]) for b in blocks)
            return SdpSolution(best_upper, best_rho, best_upper - best_lower, newton_steps, best_lower, min_eig)
        if nu / t < gap_tol * 1e-3:
            break
        t *= mu
    raise SdpNotConverged(best_lower, best_upper, newton_steps)
