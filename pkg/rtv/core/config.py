"""
RTV Configuration Module

Handles experiment configuration: defaults, JSON config files and environment overrides.
"""
import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from rtv.core.errors import ConfigInvalid

logger = logging.getLogger(__name__)

THREADS_ENV = "RTV_THREADS"


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """
    Manages RTV configuration settings.
    """
    DEFAULT_CONFIG = {
        "robust": {
            "sigma_mm": 10.0,
            "wss_threshold_mm": 20.0,
            "fallback_weight": 1e-3,
            "wss_compare": "rms",
            "target": "wdlt"
        },
        "scene": {
            "n_cameras": 6,
            "ring_radius_m": 5.0,
            "camera_height_m": 1.6,
            "focal_px": 1000.0,
            "image_size": [1920, 1080],
            "n_points": 100,
            "point_volume": [[-1.0, -1.0, 0.0], [1.0, 1.0, 2.0]],
            "bbox_margin_px": 20.0
        },
        "robustness": {
            "noise_levels": [0.0, 2.0, 5.0, 10.0, 15.0, 20.0],
            "noisy_view_counts": [0, 1, 2, 3, 4, 5],
            "methods": ["standard", "weights_no_wss", "weights_wss"],
            "trials": 50
        },
        "stability": {
            "n_cameras": 3,
            "n_points": 17,
            "alphas": [0.0, 0.1, 0.5, 1.0],
            "step_size": 0.05,
            "n_steps": 500,
            "trials": 20,
            "base_noise_px": 1.0,
            "outlier_noise_px": 10.0,
            "outlier_view": 0
        },
        "runtime": {
            "threads": None
        }
    }

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        """
        Initialize configuration manager.

        Args:
            config_file: Optional JSON file whose values override the defaults.
        """
        self.config_file = Path(config_file) if config_file else None
        self.config = self.load_config()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file merged over the defaults."""
        if self.config_file is None:
            return copy.deepcopy(self.DEFAULT_CONFIG)

        try:
            with open(self.config_file, 'r', encoding="utf-8") as f:
                overrides = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigInvalid(f"{self.config_file}: invalid JSON ({e})") from e
        except OSError as e:
            raise ConfigInvalid(f"{self.config_file}: {e}") from e
        if not isinstance(overrides, dict):
            raise ConfigInvalid(f"{self.config_file}: top level must be an object")

        logger.info(f"Loaded configuration from {self.config_file}")
        return _deep_merge(self.DEFAULT_CONFIG, overrides)

    def save_config(self, path: Union[str, Path]) -> None:
        """Save current configuration to file."""
        with open(path, 'w', encoding="utf-8") as f:
            json.dump(self.config, f, indent=2)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key path.

        Args:
            key: Dot-separated key path (e.g., "robust.sigma_mm")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        parts = key.split('.')
        current = self.config

        for part in parts:
            if not isinstance(current, dict) or part not in current:
                return default
            current = current[part]

        return current

    def set(self, key: str, value: Any) -> None:
        """
        Set configuration value by key path.

        Args:
            key: Dot-separated key path (e.g., "stability.n_steps")
            value: Value to set
        """
        parts = key.split('.')
        current = self.config

        for part in parts[:-1]:
            if part not in current:
                current[part] = {}
            current = current[part]

        current[parts[-1]] = value

    def section(self, name: str) -> Dict[str, Any]:
        """Copy of one top-level section."""
        return copy.deepcopy(self.config.get(name, {}))

    def threads(self) -> int:
        """Worker count: config value, else RTV_THREADS, else all cores."""
        value = self.get("runtime.threads")
        if value is None:
            value = os.environ.get(THREADS_ENV)
        if value is None:
            return os.cpu_count() or 1
        try:
            threads = int(value)
        except (TypeError, ValueError):
            raise ConfigInvalid(f"{THREADS_ENV} must be an integer, got {value!r}")
        if threads < 1:
            raise ConfigInvalid(f"{THREADS_ENV} must be at least 1, got {threads}")
        return threads
