"""
Matrix-free spin operators on S^z sectors

Every operator here has the form  shift * I + sum_p w_p * P_p  over swap operators
P_ij, using s_i . s_j = P_ij / 2 - 1/4:

    H                = sum_<ij> (J_ij / 4) (I - P_ij)        (each edge once)
    S^2              = (3N/4 - N(N-1)/4) I + sum_{i<j} P_ij
    s_i . s_j        = P_ij / 2 - I / 4
    swap             = P_ij
"""

import functools
import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.basis import MAX_SECTOR_SIZE, MAX_SITES, SectorBasis, StateVector, enumerate_sector, popcounts
from core.errors import (
    IndexOutOfRange, InternalInvariantViolation, InvalidParameter, NonPositiveCoupling,
    NotSpecialUnitary, NotUnitary, SectorMismatch, SectorTooLargeForDense,
)
from core.graph import CouplingGraph

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 4096
OPERATOR_KINDS = ("hamiltonian", "total_spin_squared", "pair_coupling", "swap")


class ImplicitOperator:
    """Hermitian operator bound to one sector, applied without storing a matrix."""

    def __init__(self, kind: str, sector: SectorBasis, shift: float,
                 pair_weights: Sequence[Tuple[int, int, float]], norm_bound: float,
                 label: str = ""):
        if kind not in OPERATOR_KINDS:
            raise InvalidParameter(f"Unknown operator kind: {kind}")
        self.kind = kind
        self.sector = sector
        self.shift = float(shift)
        self.pair_weights = tuple(pair_weights)
        self.norm_bound = float(norm_bound)
        self.label = label or kind
        self._tables: Optional[List[Tuple[np.ndarray, np.ndarray, float]]] = None

    @property
    def n(self) -> int:
        return self.sector.n

    @property
    def size(self) -> int:
        return self.sector.size

    def _pair_tables(self) -> List[Tuple[np.ndarray, np.ndarray, float]]:
        # For each pair: states whose bits differ, and the rank of the swapped mask
        if self._tables is None:
            states = self.sector.states
            tables = []
            for i, j, weight in self.pair_weights:
                differ = np.nonzero(((states >> i) ^ (states >> j)) & 1)[0]
                swapped = states[differ] ^ ((1 << i) | (1 << j))
                target = np.searchsorted(states, swapped)
                if not np.array_equal(states[np.minimum(target, self.size - 1)], swapped):
                    raise InternalInvariantViolation(f"Swap ({i},{j}) left sector {self.sector}")
                tables.append((differ, target, weight))
            self._tables = tables
        return self._tables

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """y = op x for a plain amplitude array of the bound sector."""
        x = np.asarray(x)
        if x.shape != (self.size,):
            raise SectorMismatch(f"{self.label}: expected {self.size} amplitudes, got shape {x.shape}")
        y = (self.shift + sum(w for _, _, w in self.pair_weights)) * x
        for differ, target, weight in self._pair_tables():
            y[differ] += weight * (x[target] - x[differ])
        return y

    def apply(self, x: StateVector) -> StateVector:
        if x.sector is None or x.sector != self.sector:
            raise SectorMismatch(f"{self.label} is bound to {self.sector}, vector lives in "
                                 f"{x.sector if x.sector is not None else 'full space'}")
        return StateVector(x.n, self.matvec(x.amplitudes), self.sector)

    def __repr__(self):
        return f"ImplicitOperator({self.label}, N={self.n}, k={self.sector.k}, size={self.size})"


def _check_pair(i: int, j: int, n: int):
    for v in (i, j):
        if not 0 <= v < n:
            raise IndexOutOfRange(f"Site {v} outside 0..{n - 1}")
    if i == j:
        raise InvalidParameter(f"Pair operator needs i != j, got ({i}, {j})")


def hamiltonian(graph: CouplingGraph, sector: SectorBasis) -> ImplicitOperator:
    """H = 1/2 sum over edges of J (1/4 - s_i . s_j), each unordered edge once."""
    if sector.n != graph.vertex_count:
        raise SectorMismatch(f"Graph has N={graph.vertex_count}, sector has N={sector.n}")
    weights = [(i, j, -J / 4) for i, j, J in graph.edges]
    shift = sum(J / 4 for _, _, J in graph.edges)
    return ImplicitOperator("hamiltonian", sector, shift, weights,
                            norm_bound=graph.total_coupling / 2, label="H")


def total_spin_squared(sector: SectorBasis) -> ImplicitOperator:
    n = sector.n
    weights = [(i, j, 1.0) for i, j in itertools.combinations(range(n), 2)]
    return ImplicitOperator("total_spin_squared", sector, 3 * n / 4 - n * (n - 1) / 4, weights,
                            norm_bound=(n / 2) * (n / 2 + 1), label="S^2")


def pair_coupling(i: int, j: int, sector: SectorBasis) -> ImplicitOperator:
    _check_pair(i, j, sector.n)
    return ImplicitOperator("pair_coupling", sector, -0.25, [(min(i, j), max(i, j), 0.5)],
                            norm_bound=0.75, label=f"s{i}.s{j}")


def swap(i: int, j: int, sector: SectorBasis) -> ImplicitOperator:
    _check_pair(i, j, sector.n)
    return ImplicitOperator("swap", sector, 0.0, [(min(i, j), max(i, j), 1.0)],
                            norm_bound=1.0, label=f"P{i}{j}")


def materialize_dense(op: ImplicitOperator, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Dense real symmetric matrix of ``op`` in the sector basis."""
    if op.size > dense_cap:
        raise SectorTooLargeForDense(f"{op!r} exceeds dense cap {dense_cap}")
    diagonal = op.shift + sum(w for _, _, w in op.pair_weights)
    matrix = np.eye(op.size) * diagonal
    for differ, target, weight in op._pair_tables():
        matrix[differ, differ] -= weight
        matrix[differ, target] += weight
    return matrix


class FullSpaceOperator:
    """Applies a sector-preserving operator to full-space vectors sector by sector."""

    def __init__(self, n: int, factory: Callable[[SectorBasis], ImplicitOperator], label: str = "",
                 max_sites: int = MAX_SITES, max_sector_size: int = MAX_SECTOR_SIZE):
        self.n = n
        self.factory = factory
        self.label = label
        self.max_sites = max_sites
        self.max_sector_size = max_sector_size
        self._bound: Dict[int, ImplicitOperator] = {}
        self._counts = popcounts(n)

    def bound(self, k: int) -> ImplicitOperator:
        if k not in self._bound:
            self._bound[k] = self.factory(enumerate_sector(self.n, k, self.max_sites, self.max_sector_size))
        return self._bound[k]

    def apply(self, x: StateVector) -> StateVector:
        if x.sector is not None:
            return self.bound(x.sector.k).apply(x)
        if x.n != self.n:
            raise SectorMismatch(f"{self.label}: N={self.n}, vector has N={x.n}")
        y = np.zeros_like(x.amplitudes)
        occupied = np.unique(self._counts[np.nonzero(x.amplitudes)[0]])
        for k in occupied:
            op = self.bound(int(k))
            states = op.sector.states
            y[states] = op.matvec(x.amplitudes[states])
        return StateVector(self.n, y)


def full_space(n: int, builder: Callable[..., ImplicitOperator], *args, label: str = "",
               **budget) -> FullSpaceOperator:
    """``full_space(n, hamiltonian, graph)`` or ``full_space(n, pair_coupling, 0, 3)``.

    ``budget`` takes ``max_sites`` and ``max_sector_size`` for the sector enumeration.
    """
    return FullSpaceOperator(n, lambda sector: builder(*args, sector), label or builder.__name__, **budget)


# Single spin-1/2 operators, basis order (up, down)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def edge_term_spectrum_deviation(J: float) -> float:
    """Largest |eigenvalue - {0, 0, 0, J/2}| of (J/2)(1/4 - s_1 . s_2) on two spins."""
    if not J > 0:
        raise NonPositiveCoupling(f"Edge term check needs J > 0, got {J}")
    spin_dot = sum(np.kron(s / 2, s / 2) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
    term = (J / 2) * (np.eye(4) / 4 - spin_dot)
    eigenvalues = np.linalg.eigvalsh(term)
    return float(np.max(np.abs(eigenvalues - np.array([0.0, 0.0, 0.0, J / 2]))))


def edge_term_spectrum_check(J: float, tol: float = 1e-12) -> bool:
    return edge_term_spectrum_deviation(J) < tol


def check_su2(u, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise NotUnitary(f"Rotation must be 2x2, got shape {u.shape}")
    if np.linalg.norm(u.conj().T @ u - np.eye(2)) >= tol:
        raise NotUnitary("Rotation matrix is not unitary")
    if abs(np.linalg.det(u) - 1) >= tol:
        raise NotSpecialUnitary(f"Rotation has determinant {np.linalg.det(u):.6g}, expected 1")
    return u


def su2_rotation(axis: Sequence[float], angle: float) -> np.ndarray:
    """exp(-i angle n.sigma / 2)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    generator = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return scipy.linalg.expm(-0.5j * angle * generator)


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) from a normalized pair of complex Gaussians."""
    a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / norm, b / norm
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def rotated_product_state(u, n: int, tol: float = 1e-10) -> StateVector:
    """(u|up>) on every site: amplitude of mask m is u00^(N - pop m) * u10^(pop m)."""
    u = check_su2(u, tol)
    # Identical factors, so the Kronecker order of sites does not matter
    amplitudes = functools.reduce(np.kron, [u[:, 0]] * n)
    return StateVector(n, amplitudes)


def total_spin_component(axis: str, x: StateVector) -> StateVector:
    """S^x, S^y or S^z acting on a full-space vector (S^x, S^y change the sector)."""
    if x.sector is not None:
        x = x.to_full()
    n = x.n
    masks = np.arange(1 << n, dtype=np.int64)
    psi = x.amplitudes
    y = np.zeros_like(psi)
    for site in range(n):
        bit = 1 << site
        down = (masks & bit) != 0
        if axis == "z":
            y += np.where(down, -0.5, 0.5) * psi
        elif axis == "x":
            y += 0.5 * psi[masks ^ bit]
        elif axis == "y":
            # sigma_y |up> = i |down>, sigma_y |down> = -i |up>
            y += np.where(down, 0.5j, -0.5j) * psi[masks ^ bit]
        else:
            raise InvalidParameter(f"Unknown spin axis '{axis}'")
    return StateVector(n, y)
