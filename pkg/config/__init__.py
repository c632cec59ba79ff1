"""
Configuration module for the Ferromagnet Ground State Verifier
Contains configuration management, tolerances and logging setup
"""

from .config_manager import ConfigManager, Tolerances

__all__ = [
    'ConfigManager',
    'Tolerances'
]
