import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.basis import StateVector, all_up_state, dicke_state, enumerate_sector
from core.errors import (
    IndexOutOfRange, InvalidParameter, NonPositiveCoupling, NotSpecialUnitary, NotUnitary,
    SectorMismatch, SectorTooLargeForDense,
)
from core.graph import CouplingRule, build, generate
from core.operators import (
    SIGMA_X, SIGMA_Y, SIGMA_Z, check_su2, edge_term_spectrum_check, edge_term_spectrum_deviation, full_space, hamiltonian,
    haar_su2, materialize_dense, pair_coupling, rotated_product_state, su2_rotation, swap,
    total_spin_component, total_spin_squared,
)


def site_operator(single, site, n):
    # Bit `site` of the mask is the site-th least significant Kronecker factor
    factors = [np.eye(2)] * n
    factors[n - 1 - site] = single
    return functools.reduce(np.kron, factors)


def kronecker_hamiltonian(graph):
    n = graph.vertex_count
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=np.complex128)
    for i, j, J in graph.edges:
        dot = sum(site_operator(s / 2, i, n) @ site_operator(s / 2, j, n) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
        h += (J / 2) * (np.eye(dim) / 4 - dot)
    return h


def sector_blocks(builder, n):
    full = np.zeros((1 << n, 1 << n))
    for k in range(n + 1):
        sector = enumerate_sector(n, k)
        full[np.ix_(sector.states, sector.states)] = materialize_dense(builder(sector))
    return full


def test_two_site_singlet():
    graph = build(2, [(0, 1, 2.0)])
    matrix = materialize_dense(hamiltonian(graph, enumerate_sector(2, 1)))
    np.testing.assert_allclose(np.linalg.eigvalsh(matrix), [0.0, 1.0], atol=1e-14)


def test_matches_kronecker_construction():
    graph = generate("ring", 4, CouplingRule.random(0.5, 2.0, seed=5))
    blocks = sector_blocks(lambda sector: hamiltonian(graph, sector), 4)
    np.testing.assert_allclose(blocks, kronecker_hamiltonian(graph), atol=1e-12)


def test_total_spin_squared_spectrum():
    values = np.linalg.eigvalsh(materialize_dense(total_spin_squared(enumerate_sector(4, 2))))
    np.testing.assert_allclose(values, [0, 0, 2, 2, 2, 6], atol=1e-12)


def test_all_up_has_maximal_spin():
    state = all_up_state(3)
    image = total_spin_squared(state.sector).apply(state)
    np.testing.assert_allclose(image.amplitudes, [3.75])
    assert pair_coupling(0, 2, state.sector).matvec(state.amplitudes)[0] == pytest.approx(0.25)


@pytest.mark.parametrize("kind, n", [("chain", 5), ("star", 5), ("complete", 4)])
def test_hamiltonian_is_symmetric_psd_and_commutes_with_total_spin(kind, n):
    graph = generate(kind, n, CouplingRule.random(0.5, 2.0, seed=1))
    for k in range(n + 1):
        sector = enumerate_sector(n, k)
        h = materialize_dense(hamiltonian(graph, sector))
        s2 = materialize_dense(total_spin_squared(sector))
        np.testing.assert_allclose(h, h.T)
        assert np.linalg.eigvalsh(h).min() >= -1e-12
        np.testing.assert_allclose(h @ s2, s2 @ h, atol=1e-12)


def test_spin_flip_symmetry():
    graph = generate("random_connected", 6, CouplingRule.random(0.5, 2.0, seed=2), seed=4)
    for k in range(7):
        low = np.linalg.eigvalsh(materialize_dense(hamiltonian(graph, enumerate_sector(6, k))))
        high = np.linalg.eigvalsh(materialize_dense(hamiltonian(graph, enumerate_sector(6, 6 - k))))
        np.testing.assert_allclose(low, high, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_matvec_matches_dense(seed):
    rng = np.random.default_rng(seed)
    graph = generate("random_connected", 7, CouplingRule.random(0.5, 2.0, seed=seed), seed=seed)
    sector = enumerate_sector(7, 3)
    op = hamiltonian(graph, sector)
    x = rng.standard_normal(sector.size)
    np.testing.assert_allclose(op.matvec(x), materialize_dense(op) @ x, atol=1e-12)


def test_swap_exchanges_sites():
    sector = enumerate_sector(3, 1)
    state = StateVector(3, [1.0, 0.0, 0.0], sector)  # mask 0b001: site 0 down
    image = swap(0, 2, sector).apply(state)
    np.testing.assert_allclose(image.amplitudes, [0.0, 0.0, 1.0])


def test_operator_errors():
    sector = enumerate_sector(3, 1)
    with pytest.raises(InvalidParameter):
        pair_coupling(1, 1, sector)
    with pytest.raises(IndexOutOfRange):
        pair_coupling(0, 5, sector)
    with pytest.raises(SectorMismatch):
        total_spin_squared(sector).matvec(np.ones(4))
    with pytest.raises(SectorMismatch):
        total_spin_squared(sector).apply(dicke_state(3, 2))
    with pytest.raises(SectorMismatch):
        hamiltonian(generate("chain", 4), sector)
    with pytest.raises(SectorTooLargeForDense):
        materialize_dense(total_spin_squared(enumerate_sector(10, 5)), dense_cap=100)


def test_edge_term_spectrum():
    assert edge_term_spectrum_check(1.0)
    assert edge_term_spectrum_check(2.5)
    assert edge_term_spectrum_deviation(2.5) < 1e-12
    with pytest.raises(NonPositiveCoupling):
        edge_term_spectrum_check(-1.0)


def test_su2_checks():
    check_su2(su2_rotation([1, 1, 0], 0.7))
    check_su2(haar_su2(np.random.default_rng(0)))
    with pytest.raises(NotSpecialUnitary):
        check_su2(np.diag([1.0, -1.0]))
    with pytest.raises(NotUnitary):
        check_su2(np.diag([2.0, 0.5]))


def test_pi_rotation_about_y_flips_every_spin():
    state = rotated_product_state(su2_rotation([0, 1, 0], np.pi), 4)
    expected = np.zeros(16)
    expected[15] = 1.0
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_rotated_product_states_are_ground_states(seed):
    graph = generate("random_connected", 5, CouplingRule.random(0.5, 2.0, seed=seed), seed=seed)
    state = rotated_product_state(haar_su2(np.random.default_rng(seed)), 5)
    assert state.norm() == pytest.approx(1.0)
    image = full_space(5, hamiltonian, graph).apply(state)
    assert np.linalg.norm(image.amplitudes) < 1e-12
    s2 = full_space(5, total_spin_squared).apply(state)
    np.testing.assert_allclose(s2.amplitudes, 8.75 * state.amplitudes, atol=1e-12)


def test_total_spin_components():
    n = 3
    up = all_up_state(n)
    np.testing.assert_allclose(total_spin_component("z", up).amplitudes, 1.5 * up.to_full().amplitudes)
    sx = np.column_stack([total_spin_component("x", StateVector(n, e)).amplitudes for e in np.eye(8)])
    sy = np.column_stack([total_spin_component("y", StateVector(n, e)).amplitudes for e in np.eye(8)])
    sz = np.column_stack([total_spin_component("z", StateVector(n, e)).amplitudes for e in np.eye(8)])
    expected_x = sum(site_operator(SIGMA_X / 2, i, n) for i in range(n))
    expected_y = sum(site_operator(SIGMA_Y / 2, i, n) for i in range(n))
    np.testing.assert_allclose(sx, expected_x, atol=1e-14)
    np.testing.assert_allclose(sy, expected_y, atol=1e-14)
    np.testing.assert_allclose(sx @ sx + sy @ sy + sz @ sz, sector_blocks(total_spin_squared, n), atol=1e-12)
    with pytest.raises(InvalidParameter):
        total_spin_component("w", up)


def complex_vector(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(0, 6))
def test_operators_are_hermitian_on_random_vectors(seed, k):
    rng = np.random.default_rng(seed)
    sector = enumerate_sector(6, k)
    graph = generate("random_connected", 6, CouplingRule.random(0.5, 2.0, seed=seed), seed=seed)
    x, y = complex_vector(rng, sector.size), complex_vector(rng, sector.size)
    for op in (hamiltonian(graph, sector), total_spin_squared(sector), pair_coupling(1, 4, sector),
               swap(0, 5, sector)):
        lhs = np.vdot(y, op.matvec(x))
        rhs = np.vdot(op.matvec(y), x)
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs)), op


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(0, 7))
def test_hamiltonian_psd_on_complex_vectors(seed, k):
    rng = np.random.default_rng(seed)
    graph = generate("random_connected", 7, CouplingRule.random(0.5, 2.0, seed=seed), seed=seed)
    op = hamiltonian(graph, enumerate_sector(7, k))
    x = complex_vector(rng, op.size)
    energy = np.vdot(x, op.matvec(x))
    assert abs(energy.imag) < 1e-10 * np.vdot(x, x).real
    assert energy.real >= -1e-12 * max(1.0, graph.total_coupling) * np.vdot(x, x).real


@pytest.mark.parametrize("n, k", [(4, 2), (6, 1), (6, 3), (7, 5)])
def test_dicke_state_is_symmetric_under_transpositions(n, k):
    state = dicke_state(n, k)
    for i in range(n):
        for j in range(i + 1, n):
            image = swap(i, j, state.sector).apply(state)
            np.testing.assert_allclose(image.amplitudes, state.amplitudes, atol=1e-14)
