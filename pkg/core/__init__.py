"""
Core module for the Ferromagnet Ground State Verifier
Contains graphs, the S^z sector basis, implicit spin operators and errors
"""

from .graph import CouplingGraph, build, generate, is_connected_without, find_removable_pair
from .basis import SectorBasis, StateVector, enumerate_sector, all_up_state, dicke_state
from .operators import ImplicitOperator, hamiltonian, total_spin_squared, pair_coupling, materialize_dense

__all__ = [
    'CouplingGraph',
    'build',
    'generate',
    'is_connected_without',
    'find_removable_pair',
    'SectorBasis',
    'StateVector',
    'enumerate_sector',
    'all_up_state',
    'dicke_state',
    'ImplicitOperator',
    'hamiltonian',
    'total_spin_squared',
    'pair_coupling',
    'materialize_dense'
]
