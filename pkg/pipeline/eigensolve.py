"""
Sector eigensolvers: dense symmetric decomposition for small sectors,
Lanczos with full reorthogonalization and deflation for large ones
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from config.config_manager import ConfigManager, Tolerances
from core.basis import MAX_SECTOR_SIZE, MAX_SITES, SectorBasis, enumerate_sector
from core.errors import EigensolverFailure, InvalidParameter, NoConvergence
from core.operators import DEFAULT_DENSE_CAP, ImplicitOperator, materialize_dense

logger = logging.getLogger(__name__)


@dataclass
class SectorSpectrum:
    """Eigenvalues of one sector, ascending, with per-pair residuals ||Hv - lambda v||."""

    n: int
    k: int
    eigenvalues: np.ndarray
    mode: str
    residual_norms: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def sector(self) -> Tuple[int, int]:
        return (self.n, self.k)

    @property
    def lowest(self) -> float:
        return float(self.eigenvalues[0])

    def summary(self, count: Optional[int] = None) -> dict:
        values = self.eigenvalues if count is None else self.eigenvalues[:count]
        residuals = self.residual_norms if count is None else self.residual_norms[:count]
        return {
            "k": self.k,
            "mode": self.mode,
            "eigenvalues": [float(v) for v in values],
            "max_residual": float(np.max(residuals)) if len(residuals) else 0.0,
        }


@dataclass
class SolverPolicy:
    """Which solver runs on which sector, and how hard it tries."""

    dense_cap: int = DEFAULT_DENSE_CAP
    krylov_count: int = 3
    krylov_max_basis: int = 120
    krylov_max_matvecs: int = 20000
    workers: int = 0
    seed: int = 0
    max_sites: int = MAX_SITES
    max_sector_size: int = MAX_SECTOR_SIZE
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.dense_cap < 1:
            raise InvalidParameter(f"dense_cap must be positive, got {self.dense_cap}")
        if self.krylov_count < 2:
            raise InvalidParameter(f"krylov_count must be at least 2, got {self.krylov_count}")
        if self.max_sites < 2 or self.max_sector_size < 1:
            raise InvalidParameter(f"Basis budget must be positive, got max_sites={self.max_sites}, "
                                   f"max_sector_size={self.max_sector_size}")

    @classmethod
    def from_config(cls, manager: ConfigManager, **overrides) -> "SolverPolicy":
        values = dict(
            dense_cap=int(manager.get('solver.dense_cap', DEFAULT_DENSE_CAP)),
            krylov_count=int(manager.get('solver.krylov_count', 3)),
            krylov_max_basis=int(manager.get('solver.krylov_max_basis', 120)),
            krylov_max_matvecs=int(manager.get('solver.krylov_max_matvecs', 20000)),
            workers=manager.get_worker_count(),
            seed=int(manager.get('verification.seed', 0)),
            max_sites=int(manager.get('basis.max_sites', MAX_SITES)),
            max_sector_size=int(manager.get('basis.max_sector_size', MAX_SECTOR_SIZE)),
            tolerances=Tolerances.from_config(manager),
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def sector(self, n: int, k: int) -> SectorBasis:
        """enumerate_sector under the configured basis budget."""
        return enumerate_sector(n, k, self.max_sites, self.max_sector_size)

    def uses_dense(self, sector_size: int) -> bool:
        return sector_size <= self.dense_cap


def _coupling_scale(op: ImplicitOperator) -> float:
    # norm_bound of H is sum(J)/2; thresholds scale with max(1, sum J)
    return max(1.0, 2.0 * op.norm_bound) if op.kind == "hamiltonian" else max(1.0, op.norm_bound)


def _residuals(op: ImplicitOperator, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.array([np.linalg.norm(op.matvec(vectors[:, c]) - values[c] * vectors[:, c])
                     for c in range(vectors.shape[1])])


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Largest component of every column positive, so output is reproducible
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def dense_spectrum(op: ImplicitOperator, dense_cap: int = DEFAULT_DENSE_CAP,
                   compute_vectors: bool = True) -> SectorSpectrum:
    """All eigenvalues (and eigenvectors) of the materialized sector matrix."""
    matrix = materialize_dense(op, dense_cap)
    try:
        if compute_vectors:
            values, vectors = scipy.linalg.eigh(matrix)
            vectors = _fix_signs(vectors)
            residuals = _residuals(op, values, vectors)
        else:
            values = scipy.linalg.eigh(matrix, eigvals_only=True)
            vectors = None
            residuals = np.zeros(len(values))
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"Dense eigensolver failed on {op!r}: {e}") from e

    logger.debug("Dense spectrum of %r: lowest %.3e", op, values[0])
    return SectorSpectrum(op.n, op.sector.k, values, "dense", residuals, vectors)


def _orthogonalize(w: np.ndarray, blocks: List[np.ndarray]) -> np.ndarray:
    for block in blocks:
        if block.shape[0]:
            w = w - block.T @ (block @ w)
    return w


def _lanczos_lowest_pair(op: ImplicitOperator, locked: np.ndarray, rng: np.random.Generator,
                         tol: float, max_basis: int, budget: List[int]) -> Tuple[float, np.ndarray, float]:
    """Lowest eigenpair of op restricted to the orthogonal complement of ``locked`` rows."""
    size = op.size
    room = size - locked.shape[0]
    if room < 1:
        raise EigensolverFailure(f"No room left in {op!r} after deflating {locked.shape[0]} vectors")
    max_dim = min(max_basis, room)
    breakdown = 1e-2 * tol

    start = rng.standard_normal(size)
    while budget[0] > 0:
        q = _orthogonalize(_orthogonalize(start, [locked]), [locked])
        q_norm = np.linalg.norm(q)
        if q_norm < 1e-14:
            start = rng.standard_normal(size)
            continue
        q /= q_norm

        basis = np.zeros((max_dim, size))
        alphas: List[float] = []
        betas: List[float] = []
        beta = 0.0
        for j in range(max_dim):
            basis[j] = q
            w = op.matvec(q)
            budget[0] -= 1
            alpha = float(q @ w)
            w = w - alpha * q
            if j > 0:
                w = w - betas[-1] * basis[j - 1]
            # Full reorthogonalization, twice, against the Krylov basis and the deflated vectors
            for _ in range(2):
                w = _orthogonalize(w, [basis[:j + 1], locked])
            alphas.append(alpha)
            beta = float(np.linalg.norm(w))

            if j == 0:
                theta, coefficients = np.array([alpha]), np.ones((1, 1))
            else:
                theta, coefficients = scipy.linalg.eigh_tridiagonal(
                    np.array(alphas), np.array(betas), select='i', select_range=(0, 0))
            estimate = beta * abs(coefficients[-1, 0])
            if estimate <= tol or beta <= breakdown or j + 1 == max_dim or budget[0] <= 0:
                break
            betas.append(beta)
            q = w / beta

        ritz = basis[:len(alphas)].T @ coefficients[:, 0]
        ritz = _orthogonalize(ritz, [locked])
        ritz /= np.linalg.norm(ritz)
        value = float(ritz @ op.matvec(ritz))
        budget[0] -= 1
        residual = float(np.linalg.norm(op.matvec(ritz) - value * ritz))
        if residual <= tol:
            return value, ritz, residual
        logger.debug("Lanczos restart on %r: residual %.3e after %d steps", op, residual, len(alphas))
        start = ritz

    raise NoConvergence(f"Lanczos did not converge on {op!r}", max_iters=0)


def krylov_lowest(op: ImplicitOperator, count: int, seed: int = 0,
                  tolerances: Optional[Tolerances] = None, max_basis: int = 120,
                  max_matvecs: int = 20000) -> SectorSpectrum:
    """Lowest ``count`` eigenpairs by Lanczos with deflation.

    Each converged vector is locked and the next run works in its orthogonal
    complement, so degenerate eigenvalues come out one copy at a time.
    """
    tolerances = tolerances or Tolerances()
    if count < 2:
        raise InvalidParameter(f"Krylov mode needs count >= 2, got {count}")
    if op.size <= 1:
        raise InvalidParameter(f"Krylov mode needs a sector larger than 1, got {op!r}")
    count = min(count, op.size)

    # Converge well below the reported residual bound so kernel vectors stay accurate
    tol = min(tolerances.krylov_convergence, tolerances.residual) * _coupling_scale(op)
    rng = np.random.default_rng(seed)
    budget = [max_matvecs]
    locked = np.zeros((0, op.size))
    values, residuals = [], []

    try:
        for _ in range(count):
            value, vector, residual = _lanczos_lowest_pair(op, locked, rng, tol, max_basis, budget)
            locked = np.vstack([locked, vector])
            values.append(value)
            residuals.append(residual)
    except NoConvergence:
        raise NoConvergence(f"Lanczos stalled on {op!r} after {len(values)} of {count} eigenpairs",
                            max_iters=max_matvecs)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"Lanczos failed on {op!r}: {e}") from e

    order = np.argsort(values, kind="stable")
    vectors = _fix_signs(locked.T[:, order])
    logger.debug("Krylov spectrum of %r: %s (%d matvecs)", op,
                 np.array(values)[order], max_matvecs - budget[0])
    return SectorSpectrum(op.n, op.sector.k, np.array(values)[order], "krylov",
                          np.array(residuals)[order], vectors)


def sector_spectrum(op: ImplicitOperator, policy: SolverPolicy, count: Optional[int] = None) -> SectorSpectrum:
    """Dense when the sector fits under the cap, Krylov otherwise."""
    if policy.uses_dense(op.size) or op.size <= 1:
        return dense_spectrum(op, max(policy.dense_cap, op.size))
    return krylov_lowest(op, count or policy.krylov_count, seed=policy.seed + op.sector.k,
                         tolerances=policy.tolerances, max_basis=policy.krylov_max_basis,
                         max_matvecs=policy.krylov_max_matvecs)
