"""
Configuration Manager
Handles solver settings, numerical tolerances and logging setup
Version: 1.0.0
"""

import copy
import json
import logging
import os
from dataclasses import dataclass, fields, asdict
from pathlib import Path
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "FERRO_THREADS"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ConfigManager:
    """Configuration management for the verifier."""

    DEFAULT_CONFIG = {
        "application": {
            "name": "Ferromagnet Ground State Verifier",
            "version": "1.0.0",
            "auto_save": True
        },
        "basis": {
            "max_sites": 30,
            "max_sector_size": 40_000_000
        },
        "solver": {
            "dense_cap": 4096,
            "krylov_count": 3,
            "krylov_max_basis": 120,
            "krylov_max_matvecs": 20000,
            "workers": 0
        },
        "tolerances": {
            "energy": 1e-9,
            "gap": 1e-6,
            "psd": 1e-12,
            "residual": 1e-9,
            "total_spin": 1e-9,
            "pair": 1e-9,
            "span": 1e-8,
            "rank": 1e-6,
            "projector": 1e-7,
            "rotation_closure": 1e-9,
            "orthonormality": 1e-10,
            "unitary": 1e-10,
            "edge_spectrum": 1e-12,
            "krylov_agreement": 1e-9,
            "krylov_convergence": 1e-13
        },
        "verification": {
            "seed": 0,
            "max_rotation_attempts": 5
        },
        "logging": {
            "level": "INFO",
            "file_logging": True,
            "max_log_size_mb": 10,
            "backup_count": 3
        }
    }

    def __init__(self, config_dir: Optional[str] = None, configure_logging: bool = True):
        """Initialize configuration manager."""
        self.config_dir = Path(config_dir) if config_dir else Path.home() / ".ferro_verifier"
        self.config_file = self.config_dir / "config.json"
        self.log_dir = self.config_dir / "logs"

        self.config_dir.mkdir(parents=True, exist_ok=True)
        self.log_dir.mkdir(exist_ok=True)

        self.config = self.load_config()
        if configure_logging:
            self.setup_logging()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file or create default."""
        if self.config_file.exists():
            try:
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    config = json.load(f)
                return self._merge_configs(self.DEFAULT_CONFIG, config)

            except (json.JSONDecodeError, IOError) as e:
                logger.warning(f"Failed to load config file: {e}. Using defaults.")
                return copy.deepcopy(self.DEFAULT_CONFIG)
        else:
            self.save_config(self.DEFAULT_CONFIG)
            return copy.deepcopy(self.DEFAULT_CONFIG)

    def save_config(self, config: Optional[Dict[str, Any]] = None) -> bool:
        """Save configuration to file."""
        try:
            config_to_save = config if config is not None else self.config

            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(config_to_save, f, indent=2, ensure_ascii=False)

            logger.debug("Configuration saved to %s", self.config_file)
            return True

        except IOError as e:
            logger.error(f"Failed to save configuration: {e}")
            return False

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get configuration value using dot notation (e.g., 'solver.dense_cap')."""
        value = self.config
        try:
            for key in key_path.split('.'):
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any) -> bool:
        """Set configuration value using dot notation."""
        keys = key_path.split('.')
        config_ref = self.config

        try:
            for key in keys[:-1]:
                config_ref = config_ref.setdefault(key, {})
            config_ref[keys[-1]] = value

            if self.get('application.auto_save', True):
                self.save_config()
            return True

        except Exception as e:
            logger.error(f"Failed to set config value {key_path}: {e}")
            return False

    def get_worker_count(self) -> int:
        """Worker count for sector-parallel solves; FERRO_THREADS wins over the file."""
        raw = os.environ.get(THREADS_ENV_VAR, "").strip()
        if raw:
            try:
                value = int(raw)
                if value >= 0:
                    return value
            except ValueError:
                pass
            logger.warning(f"Ignoring invalid {THREADS_ENV_VAR}={raw!r}")
        return int(self.get('solver.workers', 0))

    def reset_to_defaults(self) -> bool:
        """Reset configuration to defaults."""
        self.config = copy.deepcopy(self.DEFAULT_CONFIG)
        logger.info("Configuration reset to defaults")
        return self.save_config()

    def setup_logging(self, level: Optional[str] = None):
        """Setup logging based on configuration."""
        level_name = (level or self.get('logging.level', 'INFO')).upper()
        log_level = getattr(logging, level_name, logging.INFO)

        root = logging.getLogger()
        root.setLevel(log_level)

        # Replace our own handlers on repeated setup, keep foreign ones (pytest's capture)
        for handler in list(root.handlers):
            if getattr(handler, "_ferro_handler", False):
                root.removeHandler(handler)
                handler.close()

        console_handler = logging.StreamHandler()
        console_handler.setLevel(log_level)
        console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        console_handler._ferro_handler = True
        root.addHandler(console_handler)

        if self.get('logging.file_logging', True):
            try:
                from logging.handlers import RotatingFileHandler

                file_handler = RotatingFileHandler(
                    self.log_dir / "ferro_verifier.log",
                    maxBytes=self.get('logging.max_log_size_mb', 10) * 1024 * 1024,
                    backupCount=self.get('logging.backup_count', 3),
                    encoding='utf-8'
                )
                file_handler.setLevel(log_level)
                file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
                file_handler._ferro_handler = True
                root.addHandler(file_handler)

            except Exception as e:
                logger.warning(f"Failed to setup file logging: {e}")

    def _merge_configs(self, default: Dict, user: Dict) -> Dict:
        """Recursively merge user config with defaults."""
        merged = copy.deepcopy(default)

        for key, value in user.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge_configs(merged[key], value)
            else:
                merged[key] = value

        return merged

    def export_config(self, file_path: str) -> bool:
        """Export configuration to specified file."""
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=2, ensure_ascii=False)
            logger.info(f"Configuration exported to {file_path}")
            return True

        except IOError as e:
            logger.error(f"Failed to export configuration: {e}")
            return False

    def import_config(self, file_path: str) -> bool:
        """Import configuration from specified file."""
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                imported_config = json.load(f)

            self.config = self._merge_configs(self.DEFAULT_CONFIG, imported_config)
            self.save_config()
            logger.info(f"Configuration imported from {file_path}")
            return True

        except (json.JSONDecodeError, IOError) as e:
            logger.error(f"Failed to import configuration: {e}")
            return False

    def get_config_info(self) -> Dict[str, Any]:
        """Get information about configuration."""
        return {
            "config_dir": str(self.config_dir),
            "config_file": str(self.config_file),
            "log_dir": str(self.log_dir),
            "config_exists": self.config_file.exists(),
            "workers": self.get_worker_count()
        }


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold used by the solvers and the verifier.

    ``energy``, ``residual`` and ``krylov_convergence`` are scaled by max(1, sum of couplings) and ``gap``
    by the smallest coupling; ``total_spin`` is relative to N/2 (N/2 + 1).
    """

    energy: float = 1e-9
    gap: float = 1e-6
    psd: float = 1e-12
    residual: float = 1e-9
    total_spin: float = 1e-9
    pair: float = 1e-9
    span: float = 1e-8
    rank: float = 1e-6
    projector: float = 1e-7
    rotation_closure: float = 1e-9
    orthonormality: float = 1e-10
    unitary: float = 1e-10
    edge_spectrum: float = 1e-12
    krylov_agreement: float = 1e-9
    krylov_convergence: float = 1e-13

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not value > 0:
                raise ValueError(f"Tolerance '{item.name}' must be positive, got {value!r}")

    @classmethod
    def from_config(cls, manager: ConfigManager) -> "Tolerances":
        section = manager.get('tolerances', {}) or {}
        known = {item.name for item in fields(cls)}
        return cls(**{key: float(value) for key, value in section.items() if key in known})

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

