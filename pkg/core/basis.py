"""
Computational basis as bitmasks, split into conserved S^z sectors

Bit i set means spin i is down, so the all-up state is mask 0 in sector k=0.
"""

import logging
from functools import lru_cache
from math import comb
from typing import Iterator, Optional

import numpy as np

from core.errors import InvalidParameter, SectorMismatch, SectorTooLarge

logger = logging.getLogger(__name__)

MAX_SITES = 30
MAX_SECTOR_SIZE = 40_000_000


def _gosper_masks(n: int, k: int) -> Iterator[int]:
    """All n-bit integers with k set bits, increasing."""
    if k == 0:
        yield 0
        return
    mask = (1 << k) - 1
    limit = 1 << n
    while mask < limit:
        yield mask
        low = mask & -mask
        ripple = mask + low
        mask = (((ripple ^ mask) >> 2) // low) | ripple


@lru_cache(maxsize=128)
def _sector_states(n: int, k: int) -> np.ndarray:
    size = comb(n, k)
    states = np.fromiter(_gosper_masks(n, k), dtype=np.int64, count=size)
    states.setflags(write=False)
    return states


class SectorBasis:
    """Basis states of the sector with ``k`` down spins out of ``n``.

    ``states`` is strictly increasing; ``rank`` inverts it by binary search.
    """

    def __init__(self, n: int, k: int, states: np.ndarray):
        self.n = n
        self.k = k
        self.states = states

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def sz(self) -> float:
        return (self.n - 2 * self.k) / 2

    @property
    def label(self):
        return (self.n, self.k)

    def rank(self, masks):
        """Position of each mask in ``states``; raises SectorMismatch for foreign masks."""
        masks_arr = np.asarray(masks, dtype=np.int64)
        positions = np.searchsorted(self.states, masks_arr)
        clipped = np.minimum(positions, self.size - 1)
        if not np.all(self.states[clipped] == masks_arr):
            raise SectorMismatch(f"Mask not in sector (N={self.n}, k={self.k})")
        return int(positions) if np.ndim(positions) == 0 else positions

    def unrank(self, position):
        return self.states[position]

    def __eq__(self, other):
        return isinstance(other, SectorBasis) and self.label == other.label

    def __hash__(self):
        return hash(self.label)

    def __repr__(self):
        return f"SectorBasis(n={self.n}, k={self.k}, size={self.size})"


def enumerate_sector(n: int, k: int, max_sites: int = MAX_SITES,
                     max_sector_size: int = MAX_SECTOR_SIZE) -> SectorBasis:
    """All masks of ``n`` bits with ``k`` set bits, in increasing order."""
    if not 0 <= k <= n:
        raise InvalidParameter(f"Need 0 <= k <= N, got N={n}, k={k}")
    if n < 1 or n > max_sites:
        raise InvalidParameter(f"N={n} outside 1..{max_sites}")
    size = comb(n, k)
    if size > max_sector_size:
        raise SectorTooLarge(f"Sector (N={n}, k={k}) has {size} states, budget is {max_sector_size}")
    return SectorBasis(n, k, _sector_states(n, k))


def popcounts(n: int) -> np.ndarray:
    """Number of down spins for every mask 0..2^n - 1."""
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for site in range(n):
        counts += (masks >> site) & 1
    return counts


class StateVector:
    """Complex amplitudes over one sector, or over the full 2^N space when ``sector`` is None."""

    def __init__(self, n: int, amplitudes, sector: Optional[SectorBasis] = None):
        self.n = n
        self.sector = sector
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        expected = sector.size if sector is not None else 1 << n
        if self.amplitudes.shape != (expected,):
            raise InvalidParameter(f"Expected {expected} amplitudes, got shape {self.amplitudes.shape}")
        if not np.all(np.isfinite(self.amplitudes)):
            raise InvalidParameter("Amplitudes must be finite")

    @property
    def is_full_space(self) -> bool:
        return self.sector is None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0:
            raise InvalidParameter("Cannot normalize the zero vector")
        return StateVector(self.n, self.amplitudes / norm, self.sector)

    def vdot(self, other: "StateVector") -> complex:
        if self.n != other.n or self.sector != other.sector:
            raise SectorMismatch("Inner product of vectors from different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_full(self) -> "StateVector":
        """Embed into the full space, indexed by mask."""
        if self.sector is None:
            return self
        full = np.zeros(1 << self.n, dtype=np.complex128)
        full[self.sector.states] = self.amplitudes
        return StateVector(self.n, full)

    def restrict(self, sector: SectorBasis) -> "StateVector":
        """Component of a full-space vector inside ``sector``."""
        if self.sector is not None:
            if self.sector != sector:
                raise SectorMismatch(f"Vector bound to {self.sector}, requested {sector}")
            return self
        return StateVector(self.n, self.amplitudes[sector.states], sector)

    def __repr__(self):
        where = f"sector k={self.sector.k}" if self.sector is not None else "full space"
        return f"StateVector(n={self.n}, {where}, norm={self.norm():.6g})"


def all_up_state(n: int) -> StateVector:
    """|up ... up>, the single state of sector k=0."""
    if n < 2:
        raise InvalidParameter(f"Need N >= 2, got {n}")
    return StateVector(n, [1.0], enumerate_sector(n, 0))


def dicke_state(n: int, k: int, **budget) -> StateVector:
    """Uniform superposition of all states with ``k`` down spins."""
    sector = enumerate_sector(n, k, **budget)
    return StateVector(n, np.full(sector.size, 1.0 / np.sqrt(sector.size)), sector)
