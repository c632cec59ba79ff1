"""
Ferromagnet Ground State Verifier
Numerical certification of the Heisenberg ferromagnet ground state on connected graphs
Version: 1.0.0
"""

__version__ = "1.0.0"
__description__ = "Ferromagnet Ground State Verifier - ground space, clause checks and the removable-pair lemma"

# Package imports for easy access
from .core.graph import CouplingGraph, build, generate, find_removable_pair
from .pipeline.verification_pipeline import VerificationPipeline, full_verify
from .pipeline.report import emit_report

__all__ = [
    'CouplingGraph',
    'build',
    'generate',
    'find_removable_pair',
    'VerificationPipeline',
    'full_verify',
    'emit_report'
]
