"""
Zero-energy ground space of H, assembled sector by sector
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.basis import StateVector
from core.errors import DegeneracyInconclusive, InternalInvariantViolation
from core.graph import CouplingGraph
from core.operators import hamiltonian
from pipeline.eigensolve import SectorSpectrum, SolverPolicy, sector_spectrum

logger = logging.getLogger(__name__)


def energy_threshold(graph: CouplingGraph, policy: SolverPolicy) -> float:
    return policy.tolerances.energy * max(1.0, graph.total_coupling)


def gap_threshold(graph: CouplingGraph, policy: SolverPolicy) -> float:
    return policy.tolerances.gap * graph.min_coupling


@dataclass
class GroundSpace:
    """Orthonormal kernel basis of H in the full 2^N space, with sector provenance."""

    n: int
    vectors: List[StateVector]
    sector_labels: List[int]
    per_sector_counts: Dict[int, int]
    energy_threshold: float
    gap_threshold: float
    residuals: List[float]
    spectra: Dict[int, SectorSpectrum] = field(default_factory=dict)
    budget: Dict[str, int] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """Columns are the ground vectors."""
        if not self.vectors:
            return np.zeros((1 << self.n, 0), dtype=np.complex128)
        return np.column_stack([v.amplitudes for v in self.vectors])

    def min_eigenvalue(self) -> float:
        return min(spectrum.lowest for spectrum in self.spectra.values())

    def orthonormality_error(self) -> float:
        basis = self.matrix()
        return float(np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1])), initial=0.0))


def _kernel_of_sector(graph: CouplingGraph, k: int, policy: SolverPolicy,
                      threshold: float, gap: float) -> Tuple[SectorSpectrum, List[np.ndarray]]:
    sector = policy.sector(graph.vertex_count, k)
    op = hamiltonian(graph, sector)
    count = policy.krylov_count
    while True:
        spectrum = sector_spectrum(op, policy, count)
        below = int(np.sum(spectrum.eigenvalues < threshold))
        exhausted = spectrum.mode == "dense" or len(spectrum.eigenvalues) >= sector.size
        if below < len(spectrum.eigenvalues) or exhausted:
            break
        # Every Krylov value sits in the kernel; ask for more until one lies above it
        count *= 2
        logger.info("Sector k=%d: %d zero modes in %d values, retrying with %d", k, below, len(spectrum.eigenvalues), count)

    if below < len(spectrum.eigenvalues):
        next_value = float(spectrum.eigenvalues[below])
        if next_value <= gap:
            raise DegeneracyInconclusive(
                f"Sector k={k}: eigenvalue {next_value:.3e} lies between the energy threshold "
                f"{threshold:.3e} and the gap threshold {gap:.3e}"
            )

    kernel = [spectrum.eigenvectors[:, c] for c in range(below)]
    logger.debug("Sector k=%d (%s, size %d): %d zero modes", k, spectrum.mode, sector.size, below)
    return spectrum, kernel


def _modified_gram_schmidt(columns: List[np.ndarray], passes: int = 2) -> List[np.ndarray]:
    basis: List[np.ndarray] = []
    for column in columns:
        v = column.astype(np.complex128)
        for _ in range(passes):
            for b in basis:
                v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            raise InternalInvariantViolation("Kernel vectors are linearly dependent")
        basis.append(v / norm)
    return basis


def _worker_count(policy: SolverPolicy, sector_count: int) -> int:
    workers = policy.workers or min(4, os.cpu_count() or 1)
    return max(1, min(workers, sector_count))


def extract_ground_space(graph: CouplingGraph, policy: Optional[SolverPolicy] = None) -> GroundSpace:
    """Kernel of H over every sector k = 0..N, embedded in the full space."""
    policy = policy or SolverPolicy()
    n = graph.vertex_count
    threshold = energy_threshold(graph, policy)
    gap = gap_threshold(graph, policy)
    sectors = list(range(n + 1))

    workers = _worker_count(policy, len(sectors))
    logger.info(f"Extracting ground space: N={n}, |E|={len(graph.edges)}, "
                f"threshold={threshold:.2e}, workers={workers}")
    if workers == 1:
        results = [_kernel_of_sector(graph, k, policy, threshold, gap) for k in sectors]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps sector order, so the merge is deterministic
            results = list(pool.map(lambda k: _kernel_of_sector(graph, k, policy, threshold, gap), sectors))

    embedded, labels, spectra, counts = [], [], {}, {}
    for k, (spectrum, kernel) in zip(sectors, results):
        spectra[k] = spectrum
        counts[k] = len(kernel)
        states = policy.sector(n, k).states
        for column in kernel:
            full = np.zeros(1 << n, dtype=np.complex128)
            full[states] = column
            embedded.append(full)
            labels.append(k)

    # Different sectors have disjoint support, so only same-sector vectors mix
    orthonormal = _modified_gram_schmidt(embedded)
    vectors = [StateVector(n, v) for v in orthonormal]

    residuals = []
    for k, v in zip(labels, vectors):
        sector = policy.sector(n, k)
        residuals.append(float(np.linalg.norm(hamiltonian(graph, sector).matvec(v.amplitudes[sector.states]))))

    logger.info(f"Ground space dimension {len(vectors)} (expected {n + 1}), per sector {counts}")
    budget = {"max_sites": policy.max_sites, "max_sector_size": policy.max_sector_size}
    return GroundSpace(n, vectors, labels, counts, threshold, gap, residuals, spectra, budget)
