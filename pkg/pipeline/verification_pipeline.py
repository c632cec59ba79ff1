"""
Full verification pipeline: ground space extraction followed by every clause check
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from config.config_manager import ConfigManager
from core.graph import CouplingGraph
from core.operators import hamiltonian
from pipeline.eigensolve import SolverPolicy, sector_spectrum
from pipeline.ground_space import extract_ground_space
from pipeline.verify import (
    ClauseResult, clause_c_result, sector_decomposition, verify_clause_a, verify_clause_b,
    verify_degeneracy, verify_edge_psd, verify_exclusion, verify_ground_energy, verify_lemma,
    verify_rotation_closure,
)

logger = logging.getLogger(__name__)

REPORT_VERSION = "1.0.0"

CLAUSE_ORDER = (
    "ground_energy_zero",
    "degeneracy_N_plus_1",
    "max_total_spin",
    "pairwise_alignment",
    "product_state_span",
    "rotation_closure",
    "lemma_pair",
    "edge_psd",
    "exclusion_arithmetic",
)


@dataclass
class VerificationReport:
    """Verdicts and evidence for every clause on one graph."""

    graph: Dict[str, Any]
    clauses: List[ClauseResult]
    thresholds: Dict[str, float]
    timings_ms: Dict[str, float] = field(default_factory=dict)
    sectors: List[Dict[str, Any]] = field(default_factory=list)
    seed: int = 0
    version: str = REPORT_VERSION

    @property
    def passed(self) -> bool:
        return all(clause.passed for clause in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        for clause in self.clauses:
            if clause.name == name:
                return clause
        raise KeyError(name)

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        return {
            "version": self.version,
            "pass": self.passed,
            "seed": self.seed,
            "graph": self.graph,
            "clauses": [clause.to_dict() for clause in self.clauses],
            "sectors": self.sectors,
            "thresholds": self.thresholds,
            "timings_ms": dict(self.timings_ms) if include_timings else {},
        }


class VerificationPipeline:
    """Runs the ground space extraction and all clause checks for a graph."""

    def __init__(self, policy: Optional[SolverPolicy] = None, max_rotation_attempts: int = 5):
        self.policy = policy or SolverPolicy()
        self.max_rotation_attempts = max_rotation_attempts

        logger.info("Verification pipeline initialized with:")
        logger.info(f"  - Dense cap: {self.policy.dense_cap}, Krylov count: {self.policy.krylov_count}")
        logger.info(f"  - Energy tolerance: {self.policy.tolerances.energy:g}, seed: {self.policy.seed}")

    @classmethod
    def from_config(cls, manager: ConfigManager, **overrides) -> "VerificationPipeline":
        return cls(SolverPolicy.from_config(manager, **overrides),
                   int(manager.get('verification.max_rotation_attempts', 5)))

    def verify(self, graph: CouplingGraph, seed: Optional[int] = None) -> VerificationReport:
        """Every ground state check on ``graph``."""
        seed = self.policy.seed if seed is None else seed
        tolerances = self.policy.tolerances
        n = graph.vertex_count
        timings: Dict[str, float] = {}

        logger.info(f"🔄 Verifying graph with N={n}, |E|={len(graph.edges)}")

        logger.info("Step 1: Extracting ground space...")
        start = time.perf_counter()
        gs = extract_ground_space(graph, self.policy)
        timings["ground_space"] = (time.perf_counter() - start) * 1000.0

        logger.info("Step 2: Checking clauses...")
        clauses = [
            verify_ground_energy(gs, graph, tolerances),
            verify_degeneracy(gs, tolerances),
            verify_clause_a(gs, n, tolerances),
            verify_clause_b(gs, n, tolerances),
            clause_c_result(gs, n, seed, tolerances, self.max_rotation_attempts),
            verify_rotation_closure(gs, tolerances),
            verify_lemma(graph),
            verify_edge_psd(graph, tolerances),
            verify_exclusion(n),
        ]
        for clause in clauses:
            timings[clause.name] = clause.elapsed_ms
        timings["total"] = sum(timings.values())

        thresholds = tolerances.to_dict()
        thresholds.update(energy_threshold=gs.energy_threshold, gap_threshold=gs.gap_threshold)

        report = VerificationReport(
            graph=graph.summary(),
            clauses=clauses,
            thresholds=thresholds,
            timings_ms=timings,
            sectors=sector_decomposition(gs),
            seed=seed,
        )
        if report.passed:
            logger.info(f"✅ All clauses pass; degeneracy {gs.dimension}")
        else:
            failed = [c.name for c in clauses if not c.passed]
            logger.warning(f"❌ Failed clauses: {', '.join(failed)}")
        return report

    def spectrum(self, graph: CouplingGraph, count: Optional[int] = None) -> Dict[str, Any]:
        """Lowest eigenvalues of every sector, and the k <-> N-k pairing."""
        n = graph.vertex_count
        count = count or self.policy.krylov_count
        sectors = []
        lowest = {}
        for k in range(n + 1):
            op = hamiltonian(graph, self.policy.sector(n, k))
            spectrum = sector_spectrum(op, self.policy, count)
            sectors.append(spectrum.summary(count))
            lowest[k] = spectrum.eigenvalues[:count]

        flip_dev = 0.0
        for k in range(n + 1):
            mirror = lowest[n - k]
            shared = min(len(lowest[k]), len(mirror))
            if shared:
                flip_dev = max(flip_dev, float(max(abs(a - b) for a, b in zip(lowest[k][:shared], mirror[:shared]))))

        return {
            "version": REPORT_VERSION,
            "graph": graph.summary(),
            "sectors": sectors,
            "spin_flip_max_dev": flip_dev,
            "spin_flip_consistent": flip_dev < self.policy.tolerances.krylov_agreement * max(1.0, graph.total_coupling),
            "min_eigenvalue": min(float(v[0]) for v in lowest.values()),
        }


def full_verify(graph: CouplingGraph, policy: Optional[SolverPolicy] = None, seed: Optional[int] = None,
                max_rotation_attempts: int = 5) -> VerificationReport:
    """Convenience wrapper around VerificationPipeline.verify."""
    return VerificationPipeline(policy, max_rotation_attempts).verify(graph, seed)
