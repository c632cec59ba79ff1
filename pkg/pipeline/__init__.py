"""
Pipeline module for the Ferromagnet Ground State Verifier
Contains the sector eigensolvers, ground space extraction, clause checks and reports
"""

from .eigensolve import SolverPolicy, SectorSpectrum, dense_spectrum, krylov_lowest
from .ground_space import GroundSpace, extract_ground_space
from .verification_pipeline import VerificationPipeline, VerificationReport, full_verify
from .report import emit_report

__all__ = [
    'SolverPolicy',
    'SectorSpectrum',
    'dense_spectrum',
    'krylov_lowest',
    'GroundSpace',
    'extract_ground_space',
    'VerificationPipeline',
    'VerificationReport',
    'full_verify',
    'emit_report'
]
