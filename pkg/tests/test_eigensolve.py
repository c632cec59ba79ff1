import numpy as np
import pytest

from core.basis import enumerate_sector
from core.errors import InvalidParameter, NoConvergence
from core.graph import CouplingRule, generate
from core.operators import hamiltonian, total_spin_squared
from pipeline.eigensolve import SolverPolicy, dense_spectrum, krylov_lowest, sector_spectrum
from pipeline.ground_space import extract_ground_space


def test_dense_spectrum_with_residuals():
    graph = generate("chain", 6, CouplingRule.random(0.5, 2.0, seed=1))
    spectrum = dense_spectrum(hamiltonian(graph, enumerate_sector(6, 3)))
    assert spectrum.mode == "dense"
    assert np.all(np.diff(spectrum.eigenvalues) >= 0)
    assert spectrum.lowest == pytest.approx(0.0, abs=1e-12)
    assert spectrum.residual_norms.max() < 1e-12


def test_krylov_agrees_with_dense():
    graph = generate("random_connected", 10, CouplingRule.random(0.5, 2.0, seed=3), seed=5, edge_prob=0.3)
    op = hamiltonian(graph, enumerate_sector(10, 4))
    dense = dense_spectrum(op, dense_cap=1000)
    krylov = krylov_lowest(op, 4, seed=11)
    assert krylov.mode == "krylov"
    scale = max(1.0, graph.total_coupling)
    np.testing.assert_allclose(krylov.eigenvalues, dense.eigenvalues[:4], atol=1e-9 * scale)
    assert krylov.residual_norms.max() < 1e-9 * scale


def test_krylov_resolves_degenerate_values():
    # S^2 on (N=6, k=3): eigenvalue 0 five times, 2 nine times
    op = total_spin_squared(enumerate_sector(6, 3))
    krylov = krylov_lowest(op, 7, seed=0)
    np.testing.assert_allclose(krylov.eigenvalues, [0, 0, 0, 0, 0, 2, 2], atol=1e-8)


def test_krylov_is_deterministic():
    graph = generate("ring", 10)
    op = hamiltonian(graph, enumerate_sector(10, 5))
    a = krylov_lowest(op, 3, seed=2)
    b = krylov_lowest(op, 3, seed=2)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)


def test_krylov_budget_exhaustion():
    graph = generate("ring", 12)
    with pytest.raises(NoConvergence):
        krylov_lowest(hamiltonian(graph, enumerate_sector(12, 6)), 3, max_basis=5, max_matvecs=8)


def test_krylov_rejects_bad_count():
    with pytest.raises(InvalidParameter):
        krylov_lowest(total_spin_squared(enumerate_sector(4, 2)), 1)


def test_policy_dispatch():
    policy = SolverPolicy(dense_cap=50, workers=1)
    small = sector_spectrum(hamiltonian(generate("chain", 8), enumerate_sector(8, 2)), policy)
    large = sector_spectrum(hamiltonian(generate("chain", 8), enumerate_sector(8, 4)), policy)
    assert (small.mode, large.mode) == ("dense", "krylov")
    with pytest.raises(InvalidParameter):
        SolverPolicy(dense_cap=0)


def test_three_site_chain_has_four_zero_modes(policy):
    gs = extract_ground_space(generate("chain", 3), policy)
    assert gs.dimension == 4
    assert gs.per_sector_counts == {0: 1, 1: 1, 2: 1, 3: 1}
    assert gs.orthonormality_error() < 1e-12


def test_parallel_extraction_matches_serial():
    graph = generate("random_connected", 8, CouplingRule.random(0.5, 2.0, seed=9), seed=9)
    serial = extract_ground_space(graph, SolverPolicy(workers=1))
    parallel = extract_ground_space(graph, SolverPolicy(workers=4))
    assert serial.sector_labels == parallel.sector_labels
    np.testing.assert_allclose(serial.matrix(), parallel.matrix(), atol=1e-12)


def test_mixed_dense_and_krylov_extraction():
    graph = generate("ring", 10, CouplingRule.random(0.5, 2.0, seed=4))
    gs = extract_ground_space(graph, SolverPolicy(dense_cap=100, workers=1))
    assert gs.dimension == 11
    assert {spectrum.mode for spectrum in gs.spectra.values()} == {"dense", "krylov"}
    assert max(gs.residuals) < 1e-8 * graph.total_coupling


@pytest.mark.slow
def test_complete_graph_sixteen_sites_by_krylov():
    graph = generate("complete", 16)
    gs = extract_ground_space(graph, SolverPolicy(dense_cap=4096))
    assert gs.dimension == 17
    assert max(gs.residuals) < 1e-8 * graph.total_coupling


@pytest.mark.slow
def test_complete_graph_half_filled_sector():
    op = hamiltonian(generate("complete", 16), enumerate_sector(16, 8))
    spectrum = krylov_lowest(op, 3, seed=0)
    assert op.size == 12870
    assert spectrum.eigenvalues[0] < 1e-9
    assert spectrum.eigenvalues[1] > 0.1
