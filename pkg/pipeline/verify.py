"""
Clause-by-clause certification of the ferromagnetic ground state
plus the removable-pair Lemma and the exact exclusion arithmetic
"""

import functools
import itertools
import logging
import time
from dataclasses import dataclass, field
from math import isqrt
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

from config.config_manager import Tolerances
from core.errors import DegenerateRotationSample, InvalidN
from core.graph import (
    CouplingGraph, find_removable_pair, is_connected_without, removable_pair_by_induction,
    removable_vertices,
)
from core.operators import (
    edge_term_spectrum_deviation, full_space, haar_su2, pair_coupling, rotated_product_state,
    total_spin_component, total_spin_squared,
)
from pipeline.ground_space import GroundSpace

logger = logging.getLogger(__name__)


@dataclass
class ClauseResult:
    """Verdict of one check with its numeric evidence and the thresholds applied."""

    name: str
    passed: bool
    evidence: Dict[str, Any] = field(default_factory=dict)
    thresholds: Dict[str, float] = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "pass": self.passed,
            "evidence": self.evidence,
            "thresholds": self.thresholds,
        }


def _timed(check):
    @functools.wraps(check)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = check(*args, **kwargs)
        result.elapsed_ms = (time.perf_counter() - start) * 1000.0
        logger.info(f"{'✅' if result.passed else '❌'} {result.name}: {'PASS' if result.passed else 'FAIL'}")
        return result
    return wrapper


def max_total_spin_value(n: int) -> float:
    return (n / 2) * (n / 2 + 1)


@_timed
def verify_clause_a(gs: GroundSpace, n: int, tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """Every ground vector is an S^2 eigenvector with eigenvalue (N/2)(N/2 + 1)."""
    tolerances = tolerances or Tolerances()
    target = max_total_spin_value(n)
    limit = tolerances.total_spin * target
    s_squared = full_space(n, total_spin_squared, label="S^2", **gs.budget)

    expectations, residuals = [], []
    for v in gs.vectors:
        image = s_squared.apply(v)
        expectations.append(float(np.real(np.vdot(v.amplitudes, image.amplitudes))))
        residuals.append(float(np.linalg.norm(image.amplitudes - target * v.amplitudes)))

    expectation_dev = max((abs(e - target) for e in expectations), default=0.0)
    residual_max = max(residuals, default=0.0)
    return ClauseResult(
        "max_total_spin",
        bool(gs.vectors) and expectation_dev < limit and residual_max < limit,
        {
            "target": target,
            "expectations": expectations,
            "max_expectation_deviation": expectation_dev,
            "max_residual": residual_max,
            "max_dev": max(expectation_dev, residual_max),
        },
        {"total_spin": limit},
    )


@_timed
def verify_clause_b(gs: GroundSpace, n: int, tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """s_i . s_j v = v/4 for every pair i < j, edges and non-edges alike."""
    tolerances = tolerances or Tolerances()
    worst, worst_pair = 0.0, None
    pair_means = np.zeros(len(gs.vectors))
    for i, j in itertools.combinations(range(n), 2):
        op = full_space(n, pair_coupling, i, j, **gs.budget)
        for index, v in enumerate(gs.vectors):
            image = op.apply(v).amplitudes
            pair_means[index] += float(np.real(np.vdot(v.amplitudes, image)))
            deviation = float(np.linalg.norm(image - 0.25 * v.amplitudes))
            if deviation > worst or worst_pair is None:
                worst, worst_pair = max(worst, deviation), (i, j)

    # S^2 = 3N/4 + 2 sum_{i<j} s_i . s_j
    implied = [3 * n / 4 + 2 * total for total in pair_means]
    implied_dev = max((abs(value - max_total_spin_value(n)) for value in implied), default=0.0)
    return ClauseResult(
        "pairwise_alignment",
        bool(gs.vectors) and worst < tolerances.pair,
        {
            "pairs_checked": n * (n - 1) // 2,
            "max_dev": worst,
            "worst_pair": list(worst_pair) if worst_pair else None,
            "implied_total_spin": implied,
            "implied_total_spin_max_dev": implied_dev,
        },
        {"pair": tolerances.pair},
    )


@dataclass
class SpanCertificate:
    """Evidence that N+1 rotated product states span the ground space."""

    rotations: List[np.ndarray]
    coefficients: np.ndarray
    gram_min_singular_value: float
    projector_distance: float
    product_residuals: List[float]
    ground_residuals: List[float]
    witness_residual: float
    seed: int
    attempts: int

    def to_evidence(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "attempts": self.attempts,
            "rotations": [[[float(z.real), float(z.imag)] for z in u.ravel()] for u in self.rotations],
            "coefficients": [[float(z.real), float(z.imag)] for z in self.coefficients],
            "gram_min_singular_value": self.gram_min_singular_value,
            "projector_distance": self.projector_distance,
            "max_product_residual": max(self.product_residuals, default=0.0),
            "max_ground_residual": max(self.ground_residuals, default=0.0),
            "witness_residual": self.witness_residual,
        }


def _residuals_outside(basis: np.ndarray, columns: np.ndarray) -> List[float]:
    """||c - Q Q^dagger c|| for each column c, with Q orthonormal."""
    projected = basis @ (basis.conj().T @ columns)
    return [float(np.linalg.norm(columns[:, c] - projected[:, c])) for c in range(columns.shape[1])]


def product_span_certificate(gs: GroundSpace, rotations: Sequence[np.ndarray],
                             tolerances: Optional[Tolerances] = None, seed: int = 0,
                             attempts: int = 1, witness_index: int = 0) -> SpanCertificate:
    """Certify span{u_k ... u_k |up...up>} against the ground space for given rotations."""
    tolerances = tolerances or Tolerances()
    n = gs.n
    products = np.column_stack([rotated_product_state(u, n, tolerances.unitary).amplitudes
                                for u in rotations])
    ground = gs.matrix()

    singular_values = scipy.linalg.svdvals(products.conj().T @ products)
    gram_min = float(singular_values.min())

    span_basis = scipy.linalg.orth(products)
    if span_basis.shape[1] == ground.shape[1] and ground.shape[1] > 0:
        # ||P_span - P_ground|| = sin of the largest principal angle
        projector_distance = float(np.sin(np.max(scipy.linalg.subspace_angles(span_basis, ground))))
    else:
        projector_distance = 1.0

    product_residuals = _residuals_outside(ground, products) if ground.shape[1] else [1.0] * products.shape[1]
    ground_residuals = _residuals_outside(span_basis, ground)

    if ground.shape[1]:
        target = ground[:, min(witness_index, ground.shape[1] - 1)]
        coefficients, *_ = scipy.linalg.lstsq(products, target)
        witness_residual = float(np.linalg.norm(products @ coefficients - target))
    else:
        coefficients, witness_residual = np.zeros(products.shape[1], dtype=np.complex128), 0.0

    return SpanCertificate(list(rotations), coefficients, gram_min, projector_distance,
                           product_residuals, ground_residuals, witness_residual, seed, attempts)


def sample_rotations(count: int, seed: int) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [haar_su2(rng) for _ in range(count)]


def verify_clause_c(gs: GroundSpace, n: int, seed: int = 0,
                    tolerances: Optional[Tolerances] = None, max_attempts: int = 5) -> SpanCertificate:
    """N+1 seeded Haar rotations of |up...up> must span the ground space.

    A nearly dependent sample is redrawn with the next seed, at most
    ``max_attempts`` times.
    """
    tolerances = tolerances or Tolerances()
    for attempt in range(max_attempts):
        certificate = product_span_certificate(gs, sample_rotations(n + 1, seed + attempt),
                                               tolerances, seed=seed + attempt, attempts=attempt + 1)
        if certificate.gram_min_singular_value > tolerances.rank:
            return certificate
        logger.warning(f"Rotation sample with seed {seed + attempt} is nearly dependent "
                       f"(min singular value {certificate.gram_min_singular_value:.2e}), resampling")
    raise DegenerateRotationSample(f"No independent rotation sample in {max_attempts} attempts from seed {seed}")


@_timed
def clause_c_result(gs: GroundSpace, n: int, seed: int = 0, tolerances: Optional[Tolerances] = None,
                    max_attempts: int = 5) -> ClauseResult:
    tolerances = tolerances or Tolerances()
    certificate = verify_clause_c(gs, n, seed, tolerances, max_attempts)
    passed = (
        gs.dimension == n + 1
        and max(certificate.product_residuals) < tolerances.span
        and certificate.gram_min_singular_value > tolerances.rank
        and certificate.projector_distance < tolerances.projector
    )
    evidence = certificate.to_evidence()
    evidence["max_dev"] = max(certificate.projector_distance, max(certificate.product_residuals))
    return ClauseResult("product_state_span", passed, evidence,
                        {"span": tolerances.span, "rank": tolerances.rank, "projector": tolerances.projector})


@_timed
def verify_ground_energy(gs: GroundSpace, graph: CouplingGraph,
                         tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """Lowest eigenvalue over all sectors lies in [-psd, energy threshold)."""
    tolerances = tolerances or Tolerances()
    lower = -tolerances.psd
    minimum = gs.min_eigenvalue()
    per_sector = {str(k): spectrum.lowest for k, spectrum in sorted(gs.spectra.items())}
    return ClauseResult(
        "ground_energy_zero",
        lower <= minimum < gs.energy_threshold and max(gs.residuals, default=0.0) <= gs.energy_threshold,
        {
            "min_eigenvalue": minimum,
            "lowest_per_sector": per_sector,
            "max_kernel_residual": max(gs.residuals, default=0.0),
            "max_dev": abs(minimum),
        },
        {"psd_lower_bound": lower, "energy_threshold": gs.energy_threshold},
    )


@_timed
def verify_degeneracy(gs: GroundSpace, tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """Kernel dimension is N+1 with exactly one zero mode per S^z sector."""
    tolerances = tolerances or Tolerances()
    n = gs.n
    counts = {str(k): c for k, c in sorted(gs.per_sector_counts.items())}
    orthonormality = gs.orthonormality_error()
    gaps = {}
    for k, spectrum in sorted(gs.spectra.items()):
        above = spectrum.eigenvalues[spectrum.eigenvalues >= gs.energy_threshold]
        if len(above):
            gaps[str(k)] = float(above[0])
    return ClauseResult(
        "degeneracy_N_plus_1",
        gs.dimension == n + 1
        and all(c == 1 for c in gs.per_sector_counts.values())
        and orthonormality < tolerances.orthonormality,
        {
            "dimension": gs.dimension,
            "expected": n + 1,
            "per_sector_counts": counts,
            "sector_of_vector": list(gs.sector_labels),
            "lowest_excitation_per_sector": gaps,
            "orthonormality_error": orthonormality,
            "max_dev": float(abs(gs.dimension - (n + 1))),
        },
        {"energy_threshold": gs.energy_threshold, "gap_threshold": gs.gap_threshold,
         "orthonormality": tolerances.orthonormality},
    )


@_timed
def verify_rotation_closure(gs: GroundSpace, tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """S^x, S^y, S^z map the ground space into itself."""
    tolerances = tolerances or Tolerances()
    basis = gs.matrix()
    worst = {}
    for axis in ("x", "y", "z"):
        images = np.column_stack([total_spin_component(axis, v).amplitudes for v in gs.vectors]) \
            if gs.vectors else np.zeros((1 << gs.n, 0))
        worst[axis] = max(_residuals_outside(basis, images), default=0.0)
    max_dev = max(worst.values())
    return ClauseResult("rotation_closure", bool(gs.vectors) and max_dev < tolerances.rotation_closure,
                        {"max_residual_per_axis": worst, "max_dev": max_dev},
                        {"rotation_closure": tolerances.rotation_closure})


@_timed
def verify_edge_psd(graph: CouplingGraph, tolerances: Optional[Tolerances] = None) -> ClauseResult:
    """Each distinct coupling gives a two-spin term with spectrum {0, 0, 0, J/2}."""
    tolerances = tolerances or Tolerances()
    deviations = {repr(J): edge_term_spectrum_deviation(J) for J in graph.distinct_couplings()}
    checks = {key: dev < tolerances.edge_spectrum for key, dev in deviations.items()}
    return ClauseResult("edge_psd", all(checks.values()),
                        {"couplings_checked": checks, "deviations": deviations,
                         "max_dev": max(deviations.values(), default=0.0)},
                        {"edge_spectrum": tolerances.edge_spectrum})


@_timed
def verify_lemma(graph: CouplingGraph) -> ClauseResult:
    """Removable pair from the spanning-tree algorithm, revalidated by a full scan."""
    pair = find_removable_pair(graph)
    removable = removable_vertices(graph)
    induction_pair = removable_pair_by_induction(graph)
    valid = pair[0] != pair[1] and all(is_connected_without(graph, v) for v in pair)
    induction_valid = induction_pair[0] != induction_pair[1] and all(v in removable for v in induction_pair)
    return ClauseResult(
        "lemma_pair",
        valid and induction_valid and len(removable) >= 2,
        {
            "pair": list(pair),
            "induction_pair": list(induction_pair),
            "removable_vertices": removable,
            "removable_count": len(removable),
            "max_dev": 0.0,
        },
        {"min_removable": 2},
    )


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidN(f"N must be an integer, got {n!r}")
    if n < 2:
        raise InvalidN(f"N must be at least 2, got {n}")
    return int(n)


def admissible_doubled_spins(n: int) -> range:
    """2S for S = (N+1)/2, (N-1)/2, ... down to 1/2 or 0, for N+1 spins."""
    return range(n + 1, -1, -2)


def _solutions(target: int, n: int) -> List[int]:
    # 4 S (S+1) = t (t+2) with t = 2S, so (t+1)^2 = target + 1
    root = isqrt(target + 1) if target >= -1 else -1
    if root * root != target + 1 or root < 1:
        return []
    t = root - 1
    return [t] if t <= n + 1 and (n + 1 - t) % 2 == 0 else []


def exclusion_arithmetic(n: int, exhaustive: bool = False) -> bool:
    """Exact integer check that s_1 . s_(N+1) = -3/4 is impossible in the induction step.

    4 S (S+1) = N^2 + 4N - 5 has no admissible solution, while
    4 S (S+1) = N^2 + 4N + 3 is solved only by S = (N+1)/2. The even form
    (n-k)(n+k+2) = 2 and the odd form k(k+1) = n(n+3) are checked as well.
    """
    n = _check_n(n)
    excluded, allowed = n * n + 4 * n - 5, n * n + 4 * n + 3

    if exhaustive:
        excluded_hits = [t for t in admissible_doubled_spins(n) if t * (t + 2) == excluded]
        allowed_hits = [t for t in admissible_doubled_spins(n) if t * (t + 2) == allowed]
    else:
        excluded_hits = _solutions(excluded, n)
        allowed_hits = _solutions(allowed, n)

    if n % 2 == 0:
        half = n // 2
        # S = k + 1/2 with 0 <= k <= half; (half - k)(half + k + 2) = (half+1)^2 - (k+1)^2
        if exhaustive:
            form_hits = [k for k in range(half + 1) if (half - k) * (half + k + 2) == 2]
        else:
            square = (half + 1) ** 2 - 2
            root = isqrt(square)
            form_hits = [root - 1] if root * root == square and 0 <= root - 1 <= half else []
    else:
        half = (n - 1) // 2
        # S = k with 0 <= k <= half + 1; k(k+1) = half(half+3) iff (2k+1)^2 = 4 half(half+3) + 1
        if exhaustive:
            form_hits = [k for k in range(half + 2) if k * (k + 1) == half * (half + 3)]
        else:
            square = 4 * half * (half + 3) + 1
            root = isqrt(square)
            form_hits = [(root - 1) // 2] if root * root == square and 0 <= (root - 1) // 2 <= half + 1 else []

    return not excluded_hits and allowed_hits == [n + 1] and not form_hits


def exclusion_sweep(max_n: int, start: int = 2) -> Dict[str, Any]:
    """exclusion_arithmetic for every N in [start, max_n]."""
    _check_n(start)
    _check_n(max_n)
    began = time.perf_counter()
    failures = [n for n in range(start, max_n + 1) if not exclusion_arithmetic(n)]
    elapsed = (time.perf_counter() - began) * 1000.0
    logger.info(f"Exclusion sweep {start}..{max_n}: {len(failures)} failures in {elapsed:.0f} ms")
    return {
        "start": start,
        "max_n": max_n,
        "checked": max(0, max_n - start + 1),
        "failures": failures[:100],
        "failure_count": len(failures),
        "pass": not failures,
        "elapsed_ms": elapsed,
    }


@_timed
def verify_exclusion(n: int) -> ClauseResult:
    ok = exclusion_arithmetic(n) and exclusion_arithmetic(n, exhaustive=True)
    return ClauseResult("exclusion_arithmetic", ok,
                        {"n": n, "excluded_rhs": n * n + 4 * n - 5, "allowed_rhs": n * n + 4 * n + 3,
                         "max_dev": 0.0 if ok else 1.0},
                        {})


def sector_decomposition(gs: GroundSpace) -> List[Dict[str, Any]]:
    """S^z sector, S^z value, norm and S^2 expectation of each ground vector.

    ``total_spin`` solves S(S+1) = <S^2>, so a maximal-spin vector reports N/2.
    """
    n = gs.n
    s_squared = full_space(n, total_spin_squared, label="S^2", **gs.budget)
    rows = []
    for index, (k, v) in enumerate(zip(gs.sector_labels, gs.vectors)):
        expectation = float(np.real(np.vdot(v.amplitudes, s_squared.apply(v).amplitudes)))
        rows.append({
            "index": index,
            "k": k,
            "sz": (n - 2 * k) / 2,
            "norm": v.norm(),
            "total_spin_squared": expectation,
            "total_spin": float(np.sqrt(1.0 + 4.0 * max(expectation, 0.0)) - 1.0) / 2,
        })
    return rows
