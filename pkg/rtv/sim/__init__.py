"""
RTV Simulation - synthetic scenes, noise models and the seeded experiment runners
"""

from .experiments import (
    METHODS,
    RobustnessRow,
    RobustnessSweepConfig,
    StabilityConfig,
    StabilityRow,
    cell_rng,
    run_robustness_sweep,
    run_stability_study,
    summarize_rows,
)
from .noise import NoiseSpec, apply_noise
from .scene import Scene, SceneConfig, generate_scene, ring_rig

__all__ = [
    "METHODS",
    "NoiseSpec",
    "RobustnessRow",
    "RobustnessSweepConfig",
    "Scene",
    "SceneConfig",
    "StabilityConfig",
    "StabilityRow",
    "apply_noise",
    "cell_rng",
    "generate_scene",
    "ring_rig",
    "run_robustness_sweep",
    "run_stability_study",
    "summarize_rows",
]
