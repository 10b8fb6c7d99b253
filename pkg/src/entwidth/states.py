"""State families on a chain: singlet pairings, product, domain-wall and mixtures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .linalg_core import as_density

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
UP = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class PairingConfiguration:
    """Disjoint site pairs plus single sites carrying unit Bloch vectors.

    Sites are 1-based. Pairs are stored as ``(j, k)`` with ``j < k``.
    """

    n: int
    pairs: tuple[tuple[int, int], ...]
    singles: Mapping[int, tuple[float, float, float]] = field(default_factory=dict)

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted((int(j), int(k)))) for j, k in self.pairs))
        singles = {int(s): tuple(float(x) for x in b) for s, b in dict(self.singles).items()}
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "singles", singles)
        used: list[int] = [s for p in pairs for s in p] + list(singles)
        if any(j == k for j, k in pairs):
            raise ValueError("a pair needs two distinct sites")
        if len(used) != len(set(used)):
            raise ValueError("pairs and singles overlap")
        if sorted(used) != list(range(1, self.n + 1)):
            raise ValueError(f"pairs and singles must partition sites 1..{self.n}")
        for s, b in singles.items():
            if abs(np.linalg.norm(b) - 1.0) > 1e-10:
                raise ValueError(f"Bloch vector of site {s} is not a unit vector")

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[Sequence[int]], bloch=UP) -> "PairingConfiguration":
        """Pairs as given; every unpaired site becomes a single along ``bloch``."""
        paired = {s for p in pairs for s in p}
        singles = {s: tuple(bloch) for s in range(1, n + 1) if s not in paired}
        return cls(n, tuple(tuple(p) for p in pairs), singles)

    @property
    def width(self) -> int:
        """Largest number of chain sites spanned by a pair (1 if there are none)."""
        return max((k - j + 1 for j, k in self.pairs), default=1)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": [list(p) for p in self.pairs],
            "singles": [{"site": s, "bloch": list(b)} for s, b in sorted(self.singles.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "PairingConfiguration":
        try:
            singles = {int(item["site"]): tuple(item["bloch"]) for item in data.get("singles", [])}
            return cls(int(data["n"]), tuple(tuple(p) for p in data["pairs"]), singles)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed pairing description: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "PairingConfiguration":
        return cls.from_dict(json.loads(text))


def _need_even(n: int, what: str) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"{what} needs an even number of sites, got {n}")


def hugging(n: int) -> PairingConfiguration:
    """Nested pairing ``(j, N + 1 - j)``; width N."""
    _need_even(n, "hugging")
    return PairingConfiguration(n, tuple((j, n + 1 - j) for j in range(1, n // 2 + 1)))


def right_neighbor(n: int) -> PairingConfiguration:
    """Pairing ``(2j - 1, 2j)``; width 2."""
    _need_even(n, "right_neighbor")
    return PairingConfiguration(n, tuple((2 * j - 1, 2 * j) for j in range(1, n // 2 + 1)))


def nnn(n: int) -> PairingConfiguration:
    """Next-nearest-neighbour pairing in blocks of four: ``(1,3),(2,4),(5,7),(6,8),...``."""
    if n < 4 or n % 4:
        raise ValueError(f"nnn needs N divisible by 4, got {n}")
    pairs = []
    for b in range(0, n, 4):
        pairs += [(b + 1, b + 3), (b + 2, b + 4)]
    return PairingConfiguration(n, tuple(pairs))


def majumdar_ghosh(n: int, offset: int = 0) -> PairingConfiguration:
    """Dimer covering of the ring.

    ``offset=0`` pairs ``(2k, 2k + 1 mod N)``; ``offset=1`` gives the partner
    covering ``(2k - 1, 2k)``. The wrap-around pair ``(1, N)`` makes the
    chain width of the first covering equal to N.
    """
    _need_even(n, "majumdar_ghosh")
    if offset % 2:
        return right_neighbor(n)
    return PairingConfiguration(n, tuple((2 * k, 2 * k % n + 1) for k in range(1, n // 2 + 1)))


def qubit_from_bloch(bloch: Sequence[float]) -> np.ndarray:
    x, y, z = bloch
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _assemble(n: int, blocks: list[tuple[tuple[int, ...], np.ndarray]]) -> np.ndarray:
    # blocks: (sites, amplitudes over those sites); kron in block order, then reorder axes
    order: list[int] = []
    psi = np.ones(1, dtype=complex)
    for sites, amps in blocks:
        psi = np.kron(psi, amps)
        order += [s - 1 for s in sites]
    t = psi.reshape((2,) * n)
    return t.transpose(np.argsort(order)).reshape(-1)


def pairing_state(
    config: PairingConfiguration,
    pair_states: Mapping[tuple[int, int], np.ndarray] | None = None,
) -> np.ndarray:
    """Product over pairs (singlet unless overridden) and single-site Bloch states.

    ``pair_states[(j, k)]`` is a normalized 4-vector with site ``j`` as the
    more significant qubit.
    """
    pair_states = pair_states or {}
    blocks = [((j, k), np.asarray(pair_states.get((j, k), SINGLET), dtype=complex)) for j, k in config.pairs]
    blocks += [((s,), qubit_from_bloch(b)) for s, b in sorted(config.singles.items())]
    return _assemble(config.n, blocks)


def singlet_pairing_state(config: PairingConfiguration) -> np.ndarray:
    """``(|01> - |10>)/sqrt(2)`` on every pair, lower site first."""
    return pairing_state(config)


def domain_wall_state(n: int) -> np.ndarray:
    """Basis state with the first N/2 spins up (0) and the rest down (1)."""
    _need_even(n, "domain_wall_state")
    psi = np.zeros(2**n, dtype=complex)
    psi[(1 << (n // 2)) - 1] = 1.0
    return psi


def product_state(bloch_vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """Product of single-qubit pure states with the given unit Bloch vectors."""
    psi = np.ones(1, dtype=complex)
    for i, b in enumerate(bloch_vectors):
        if abs(np.linalg.norm(b) - 1.0) > 1e-10:
            raise ValueError(f"Bloch vector {i + 1} is not a unit vector")
        psi = np.kron(psi, qubit_from_bloch(b))
    return psi


def spiral_bloch_vectors(n: int, m: int = 1) -> np.ndarray:
    """Planar spiral ``(cos 2 pi m j / N, sin 2 pi m j / N, 0)`` for ``j = 1..N``."""
    phase = 2 * np.pi * m * np.arange(1, n + 1) / n
    return np.stack([np.cos(phase), np.sin(phase), np.zeros(n)], axis=1)


def mixture(states: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    """Convex combination of states (vectors are turned into projectors)."""
    w = np.asarray(weights, dtype=float)
    if len(states) != len(w) or len(w) == 0:
        raise ValueError("need one weight per state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be non-negative and sum to one")
    rho = sum(wi * (np.outer(s, s.conj()) if np.ndim(s) == 1 else np.asarray(s)) for wi, s in zip(w, states))
    return as_density(rho, atol=1e-10)


def haar_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def random_pairing(n: int, max_width: int, rng: np.random.Generator, pair_prob: float = 0.7) -> PairingConfiguration:
    """Random configuration whose pairs span at most ``max_width`` sites.

    Sites are visited left to right; a free site is paired with a random free
    partner inside the window with probability ``pair_prob``, otherwise it
    stays single with a random Bloch vector.
    """
    free = set(range(1, n + 1))
    pairs, singles = [], {}
    for j in range(1, n + 1):
        if j not in free:
            continue
        free.discard(j)
        partners = [k for k in range(j + 1, min(n, j + max_width - 1) + 1) if k in free]
        if partners and rng.random() < pair_prob:
            k = int(rng.choice(partners))
            free.discard(k)
            pairs.append((j, k))
        else:
            v = rng.normal(size=3)
            singles[j] = tuple(v / np.linalg.norm(v))
    return PairingConfiguration(n, tuple(pairs), singles)
