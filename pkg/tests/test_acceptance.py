"""
End-to-end acceptance runs: graph families, exhaustive small graphs, the large arithmetic sweep
"""

import numpy as np
import pytest

from core.basis import enumerate_sector
from core.graph import CouplingRule, build, enumerate_connected_graphs, generate
from core.graph_io import parse_coupling_rule, parse_generator_spec
from core.operators import hamiltonian, materialize_dense
from pipeline.eigensolve import SolverPolicy, dense_spectrum, krylov_lowest
from pipeline.verification_pipeline import full_verify
from pipeline.verify import exclusion_sweep, verify_lemma

pytestmark = pytest.mark.slow


def suite():
    """Every family instance as (label, graph)."""
    graphs = [(f"chain:{n}", generate("chain", n)) for n in range(2, 13)]
    graphs += [(f"ring:{n}", generate("ring", n)) for n in range(3, 13)]
    graphs += [(f"grid:{r}x{c}", generate("grid", rows=r, cols=c)) for r, c in [(2, 3), (3, 3), (3, 4)]]
    graphs += [(f"complete:{n}", generate("complete", n)) for n in range(2, 9)]
    graphs.append(("star:7", generate("star", 7)))
    for seed in range(20):
        n = 4 + seed % 7
        graphs.append((f"random:{n}:seed{seed}",
                       generate("random_connected", n, CouplingRule.random(0.0, 2.0, seed=seed),
                                seed=seed, edge_prob=0.4)))
    return graphs


SUITE = suite()
WEIGHTED = [
    ("random:9:0.4:seed7", "random:0.5:2.0:seed3"),
    ("ring:10", "random:0.5:2.0:seed3"),
    ("grid:3x4", "random:0.5:2.0:seed11"),
]


def assert_ferromagnetic_ground_state(graph):
    n = graph.vertex_count
    report = full_verify(graph, SolverPolicy(), seed=0)
    failed = [c.name for c in report.clauses if not c.passed]
    assert not failed
    degeneracy = report.clause("degeneracy_N_plus_1").evidence
    assert degeneracy["dimension"] == n + 1
    assert set(degeneracy["per_sector_counts"].values()) == {1}
    energy = report.clause("ground_energy_zero").evidence["min_eigenvalue"]
    assert -1e-12 <= energy < 1e-9 * max(1.0, graph.total_coupling)
    assert report.clause("max_total_spin").evidence["max_residual"] < 1e-9 * (n / 2) * (n / 2 + 1)
    assert report.clause("pairwise_alignment").evidence["max_dev"] < 1e-9
    span = report.clause("product_state_span").evidence
    assert span["projector_distance"] < 1e-7
    assert span["gram_min_singular_value"] > 1e-6
    return report


def test_suite_size():
    assert len(SUITE) == 11 + 10 + 3 + 7 + 1 + 20


@pytest.mark.parametrize("label, graph", SUITE, ids=[label for label, _ in SUITE])
def test_graph_suite(label, graph):
    assert_ferromagnetic_ground_state(graph)


@pytest.mark.parametrize("spec, rule", WEIGHTED)
def test_weighted_instances(spec, rule):
    assert_ferromagnetic_ground_state(parse_generator_spec(spec, parse_coupling_rule(rule)))


def test_weak_bridge_still_passes():
    # two rings of four joined by a single weak edge
    edges = [(i, (i + 1) % 4, 1.0) for i in range(4)]
    edges += [(4 + i, 4 + (i + 1) % 4, 1.0) for i in range(4)]
    edges.append((3, 4, 0.01))
    assert_ferromagnetic_ground_state(build(8, edges))


def test_grid_with_pendant_vertex():
    grid = generate("grid", rows=3, cols=3)
    graph = build(10, list(grid.edges) + [(8, 9, 1.0)])
    report = assert_ferromagnetic_ground_state(graph)
    assert report.clause("degeneracy_N_plus_1").evidence["dimension"] == 11


@pytest.mark.parametrize("label, graph", SUITE, ids=[label for label, _ in SUITE])
def test_krylov_matches_dense_on_every_sector(label, graph):
    n = graph.vertex_count
    rng = np.random.default_rng(n)
    for k in range(n + 1):
        sector = enumerate_sector(n, k)
        if sector.size < 2 or sector.size > 4096:
            continue
        op = hamiltonian(graph, sector)
        x = rng.standard_normal(sector.size)
        x /= np.linalg.norm(x)
        np.testing.assert_allclose(op.matvec(x), materialize_dense(op) @ x, rtol=0, atol=1e-13)

        dense = dense_spectrum(op, compute_vectors=False)
        krylov = krylov_lowest(op, 3, seed=k)
        count = len(krylov.eigenvalues)
        np.testing.assert_allclose(krylov.eigenvalues, dense.eigenvalues[:count], rtol=0, atol=1e-9)


def test_krylov_path_on_twelve_sites():
    graph = generate("ring", 12, CouplingRule.random(0.5, 2.0, seed=2))
    report = full_verify(graph, SolverPolicy(dense_cap=300), seed=1)
    assert report.passed


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_lemma_on_every_connected_graph(n):
    for graph in enumerate_connected_graphs(n):
        assert verify_lemma(graph).passed


def test_connected_graph_count_on_six_vertices():
    assert sum(1 for _ in enumerate_connected_graphs(6)) == 26704


def test_arithmetic_sweep_to_one_million():
    summary = exclusion_sweep(1_000_000)
    assert summary["pass"]
    assert summary["checked"] == 999_999
