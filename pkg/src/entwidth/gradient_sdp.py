"""Width criteria from the gradient-weighted spin ``B`` against the collective spin ``J``.

States with entanglement confined to given blocks of the chain obey upper
bounds ``<B^2> <= a + m <J^2>``. The constants come from PPT relaxations
solved as semidefinite programmes, the endpoints are analytic, and the
conjectured half-chain line is checked by sampling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg_core import n_qubits
from .reports import VIOLATION_TOL, BoundReport
from .sdp import SdpProblem, SdpSolution, solve_sdp
from .spin_ops import build_B, collective_spin, gradient_coefficients
from .states import (
    PairingConfiguration,
    domain_wall_state,
    haar_state,
    mixture,
    right_neighbor,
    singlet_pairing_state,
)

CONJECTURE_TOL = 1e-6
MAX_SDP_SITES = 6
MAX_SAMPLE_SITES = 8

Cuts = tuple[tuple[int, ...], ...]


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"the gradient operator needs an even number of sites, got {n}")


def _squared_dense(ops) -> np.ndarray:
    return sum((o.to_dense() @ o.to_dense()).real for o in ops)


def j_squared_operator(n: int) -> np.ndarray:
    return _squared_dense(collective_spin(n))


def b_squared_operator(n: int) -> np.ndarray:
    _check_even(n)
    return _squared_dense(build_B(n))


def _expect(op: np.ndarray, state: np.ndarray) -> float:
    state = np.asarray(state)
    if state.ndim == 1:
        return float(np.real(np.vdot(state, op @ state)))
    return float(np.real(np.trace(op @ state)))


def j_squared(state: np.ndarray) -> float:
    """``<J^2>`` with ``J`` the unweighted collective spin (Pauli units)."""
    n = n_qubits(np.shape(state)[0])
    return max(_expect(j_squared_operator(n), state), 0.0)


def b_squared(state: np.ndarray) -> float:
    """``<B^2>`` with site weights ``2k - N - 1``."""
    n = n_qubits(np.shape(state)[0])
    return max(_expect(b_squared_operator(n), state), 0.0)


def b_squared_classical(n: int) -> float:
    """``<B^2>`` of the half-up, half-down product state."""
    _check_even(n)
    return n**4 / 4 + 2 * (n - 1) * n * (n + 1) / 3


def b_squared_singlet(n: int) -> float:
    """``<B^2>`` of neighbouring singlets ``(1,2)(3,4)...``: every pair has ``b_k - b_j = 2``."""
    _check_even(n)
    return 6.0 * n


def nearest_neighbor_limit(n: int) -> float:
    """Largest ``<B^2>`` for nearest-neighbour entanglement across the two halves.

    Relative to the classical state only the middle pair's correlator can
    change, adding at most 4.
    """
    return b_squared_classical(n) + 4.0


def singlet_pair_b_squared(config: PairingConfiguration) -> float:
    """``3 sum (b_j - b_k)^2`` over pairs, valid for singlets covering every site."""
    if config.singles:
        raise ValueError("the singlet-pair identity needs every site paired")
    b = gradient_coefficients(config.n)
    return float(3 * sum((b[j - 1] - b[k - 1]) ** 2 for j, k in config.pairs))


def gradient_objective(n: int, slope: float) -> np.ndarray:
    """``slope * J^2 - B^2``; its minimum over a state family is ``-intercept``."""
    return slope * j_squared_operator(n) - b_squared_operator(n)


def cut_sites(cut: int) -> tuple[int, ...]:
    """Sites ``1..cut``: the side transposed for the bipartition after site ``cut``."""
    return tuple(range(1, cut + 1))


def bipartition_blocks(n: int, cuts: Sequence[int]) -> Cuts:
    """PPT blocks for simultaneous bipartitions; each side transposed is the smaller one."""
    blocks = []
    for c in cuts:
        if not 1 <= c < n:
            raise ValueError(f"cut {c} must lie in 1..{n - 1}")
        blocks.append(cut_sites(c) if c <= n - c else tuple(range(c + 1, n + 1)))
    return tuple(blocks)


@dataclass(frozen=True)
class SdpIntercept:
    n: int
    cuts: tuple[int, ...]
    slope: float
    intercept: float
    optimum: float
    gap: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "partitions": [[list(range(1, c + 1)), list(range(c + 1, self.n + 1))] for c in self.cuts],
            "slope": self.slope,
            "intercept": self.intercept,
            "optimum": self.optimum,
            "gap": self.gap,
            "iterations": self.iterations,
        }


def sdp_intercept(n: int, slope: float, cuts: Sequence[int], **solver_options) -> SdpIntercept:
    """Certified intercept ``a`` of ``<B^2> <= a + slope <J^2>`` for states PPT across every cut.

    Raises :class:`~entwidth.sdp.SdpNotConverged` if the gap target is missed.
    """
    _check_even(n)
    if n > MAX_SDP_SITES:
        raise ValueError(f"dense SDP is limited to N <= {MAX_SDP_SITES}")
    problem = SdpProblem(gradient_objective(n, slope), bipartition_blocks(n, cuts))
    sol: SdpSolution = solve_sdp(problem, **solver_options)
    # report the certified side: -dual bound is a valid intercept
    return SdpIntercept(
        n=n,
        cuts=tuple(int(c) for c in cuts),
        slope=float(slope),
        intercept=-sol.dual_bound,
        optimum=sol.optimum,
        gap=sol.duality_gap,
        iterations=sol.iterations,
    )


@dataclass(frozen=True)
class ParetoRow:
    slope: float
    intercepts: tuple[float, ...]

    @property
    def joint(self) -> float:
        """Intercept valid for every family at once."""
        return max(self.intercepts)


def pareto_scan(
    n: int,
    slopes: Iterable[float],
    families: Sequence[Sequence[int]],
    workers: int = 1,
) -> list[ParetoRow]:
    """Intercept per cut family along a slope grid; rows keep the grid order."""
    slopes = [float(m) for m in slopes]
    jobs = [(m, tuple(f)) for m in slopes for f in families]

    def run(job):
        m, f = job
        return sdp_intercept(n, m, f).intercept

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(run, jobs))
    else:
        values = [run(j) for j in jobs]
    k = len(families)
    return [ParetoRow(m, tuple(values[i * k : (i + 1) * k])) for i, m in enumerate(slopes)]


def optimal_intercept_slope(rows: Sequence[ParetoRow], target: float, tol: float = 1e-3) -> float | None:
    """Smallest grid slope whose joint intercept reaches ``target``."""
    for r in rows:
        if r.joint <= target + tol:
            return r.slope
    return None


def refine_optimal_slope(
    n: int,
    families: Sequence[Sequence[int]],
    lo: float,
    hi: float,
    target: float,
    tol: float = 1e-3,
    slope_tol: float = 1e-3,
) -> float:
    """Bisect for the smallest slope with joint intercept ``<= target + tol``.

    Intercepts do not increase with the slope, so the feasible slopes form a
    half-line. ``hi`` must be feasible.
    """

    def ok(m):
        return max(sdp_intercept(n, m, f).intercept for f in families) <= target + tol

    if not ok(hi):
        raise ValueError(f"slope {hi} does not reach intercept {target}")
    while hi - lo > slope_tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def check_partition_inequality(state: np.ndarray, n: int, slope: float, intercept: float) -> BoundReport:
    """Flag states above ``<B^2> = intercept + slope <J^2>``."""
    j2 = j_squared(state)
    return BoundReport(
        criterion="gradient_partition",
        value=b_squared(state),
        bound=intercept + slope * j2,
        sense="upper",
        params={"n": n, "slope": slope, "intercept": intercept, "j_squared": j2},
        tol=VIOLATION_TOL,
    )


def conjecture_line(n: int) -> tuple[float, float]:
    """``(intercept, slope)`` of the conjectured half-chain bound.

    The line joins the singlet endpoint ``(0, 6N)`` and the classical endpoint
    ``(2N, <B^2>_cl)``.
    """
    low = b_squared_singlet(n)
    return low, (b_squared_classical(n) - low) / (2 * n)


def endpoint_mixture(n: int, p: float) -> np.ndarray:
    """``p |Psi^-><Psi^-| + (1 - p) |cl><cl|``: both endpoints and the line between them."""
    return mixture([singlet_pairing_state(right_neighbor(n)), domain_wall_state(n)], [p, 1 - p])


def expectation_pairs(states: np.ndarray, n: int) -> np.ndarray:
    """``(<J^2>, <B^2>)`` for a batch of pure states, one per row."""
    j2, b2 = j_squared_operator(n), b_squared_operator(n)
    s = np.asarray(states)
    return np.stack(
        [np.einsum("si,ij,sj->s", s.conj(), j2, s).real, np.einsum("si,ij,sj->s", s.conj(), b2, s).real],
        axis=1,
    )


def half_chain_products(n: int, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state on sites ``1..N/2`` times an independent one on the rest."""
    half = n // 2
    a = np.stack([haar_state(half, rng) for _ in range(n_samples)])
    b = np.stack([haar_state(n - half, rng) for _ in range(n_samples)])
    return np.einsum("si,sj->sij", a, b).reshape(n_samples, -1)


@dataclass
class ConjectureReport:
    n: int
    n_samples: int
    intercept: float
    slope: float
    violations: int
    min_margin: float
    histogram: tuple[np.ndarray, np.ndarray] = field(repr=False)


def conjecture_check(n: int, n_samples: int, seed: int = 0, mixture_fraction: float = 0.5) -> ConjectureReport:
    """Sample half-chain product states and their mixtures against the conjectured line.

    A share ``mixture_fraction`` of the samples are mixtures of three pure
    half-chain products with Dirichlet(1, 1, 1) weights; both ``<J^2>`` and
    ``<B^2>`` are linear in the state, so the mixture's point is the weighted
    average of its components' points.
    """
    _check_even(n)
    if n > MAX_SAMPLE_SITES:
        raise ValueError(f"sampling is limited to N <= {MAX_SAMPLE_SITES}")
    rng = np.random.default_rng(seed)
    n_mix = int(round(mixture_fraction * n_samples))
    n_pure = n_samples - n_mix
    points = expectation_pairs(half_chain_products(n, n_pure + 3 * n_mix, rng), n)
    pure, parts = points[:n_pure], points[n_pure:].reshape(n_mix, 3, 2)
    weights = rng.dirichlet(np.ones(3), size=n_mix)
    mixed = np.einsum("sk,skc->sc", weights, parts)
    all_points = np.concatenate([pure, mixed])
    intercept, slope = conjecture_line(n)
    margins = intercept + slope * all_points[:, 0] - all_points[:, 1]
    return ConjectureReport(
        n=n,
        n_samples=n_samples,
        intercept=intercept,
        slope=slope,
        violations=int(np.sum(margins < -CONJECTURE_TOL)),
        min_margin=float(margins.min()),
        histogram=np.histogram(margins, bins=20),
    )


SCATTER_KINDS = ("12|34", "12|34-same", "14|23")


def scatter_samples(kind: str, n_samples: int, seed: int = 0) -> np.ndarray:
    """``(<J^2>, <B^2>)`` for random four-qubit states of a given pair structure.

    ``"12|34"``: independent Haar states on (1,2) and (3,4);
    ``"12|34-same"``: the same state on both pairs;
    ``"14|23"``: the same state on (1,4) and (2,3).
    """
    if kind not in SCATTER_KINDS:
        raise ValueError(f"kind must be one of {SCATTER_KINDS}")
    rng = np.random.default_rng(seed)
    psi = np.stack([haar_state(2, rng) for _ in range(n_samples)])
    if kind == "12|34":
        phi = np.stack([haar_state(2, rng) for _ in range(n_samples)])
        states = np.einsum("si,sj->sij", psi, phi).reshape(n_samples, 16)
    elif kind == "12|34-same":
        states = np.einsum("si,sj->sij", psi, psi).reshape(n_samples, 16)
    else:
        # amplitude index (s1 s4)(s2 s3) -> (s1 s2 s3 s4)
        t = np.einsum("si,sj->sij", psi, psi).reshape(n_samples, 2, 2, 2, 2)
        states = t.transpose(0, 1, 3, 4, 2).reshape(n_samples, 16)
    return expectation_pairs(states, 4)
