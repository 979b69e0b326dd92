"""
RTV Experiments

Seeded Monte-Carlo runners: triangulation robustness under growing 2D noise, and the
stability of detection descent for several balances of the two loss gradient paths.

Every experiment cell draws from its own generator seeded by (master seed, cell key),
so results do not depend on the number of workers or the execution order.
"""
import logging
from functools import cached_property
from typing import Callable, ClassVar, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator

from rtv.core.errors import ConfigInvalid, GeometryError
from rtv.core.registry import get_method, method_names, triangulation_method
from rtv.core.types import CameraRig, Pose3D, RobustConfig
from rtv.geometry.triangulation import solve_dlt, triangulate_dlt
from rtv.losses.descent import descend_detections
from rtv.metrics import mpjpe
from rtv.robust.triangulate import RobustTriangulation, robust_triangulate
from rtv.sim.noise import NoiseSpec, apply_noise
from rtv.sim.scene import Scene, SceneConfig, generate_scene

logger = logging.getLogger(__name__)

METHODS = ("standard", "weights_no_wss", "weights_wss")


class RobustnessRow(BaseModel):
    """One (noise, noisy-view count, method, trial) cell of the robustness sweep."""
    model_config = ConfigDict(frozen=True)
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        "experiment", "seed", "method", "noise_px", "n_noisy_views", "mpjpe_mm", "skipped_points")

    experiment: Literal["robustness"] = "robustness"
    seed: int
    method: Literal["standard", "weights_no_wss", "weights_wss"]
    noise_px: float
    n_noisy_views: int
    mpjpe_mm: float = Field(ge=0)
    skipped_points: int = 0
    trial: int = 0


class StabilityRow(BaseModel):
    """One descent step of one (trial, alpha) run of the stability study."""
    model_config = ConfigDict(frozen=True)
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        "experiment", "seed", "alpha", "step", "loss", "mpjpe_mm", "center_drift_px")

    experiment: Literal["stability"] = "stability"
    seed: int
    alpha: float
    step: int
    loss: float
    mpjpe_mm: float
    center_drift_px: float
    trial: int = 0


class RobustnessSweepConfig(BaseModel):
    """Grid of the robustness sweep."""
    model_config = ConfigDict(frozen=True)

    noise_levels: Tuple[float, ...] = (0.0, 2.0, 5.0, 10.0, 15.0, 20.0)
    noisy_view_counts: Tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    methods: Tuple[str, ...] = METHODS
    trials: int = Field(50, ge=1)
    noise_kind: Literal["circle", "gaussian"] = "circle"

    @field_validator("methods")
    @classmethod
    def _methods(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        unknown = [m for m in value if m not in METHODS]
        if unknown or not value:
            raise ValueError(f"methods must be a non-empty subset of {list(METHODS)}, got {list(value)}")
        return value


class StabilityConfig(BaseModel):
    """Parameters of the descent stability study."""
    model_config = ConfigDict(frozen=True)

    alphas: Tuple[float, ...] = (0.0, 0.1, 0.5, 1.0)
    step_size: float = Field(0.05, gt=0)
    n_steps: int = Field(500, ge=1)
    trials: int = Field(20, ge=1)
    base_noise_px: float = Field(1.0, ge=0)
    outlier_noise_px: float = Field(10.0, ge=0)
    outlier_view: int = Field(0, ge=0)

    @field_validator("alphas")
    @classmethod
    def _alphas(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value or any(not 0.0 <= a <= 1.0 for a in value):
            raise ValueError("alphas must be a non-empty list of values in [0, 1]")
        return value


def cell_rng(seed: int, *key: int) -> Tuple[np.random.Generator, int]:
    """Generator for one experiment cell, plus the derived seed reported in results."""
    sequence = np.random.SeedSequence([seed, *key])
    cell_seed = int(sequence.generate_state(1, dtype=np.uint32)[0])
    return np.random.default_rng(sequence), cell_seed


class PointContext:
    """Noisy observations of one target point, with the robust analysis computed once."""

    def __init__(self, rig: CameraRig, pixels: np.ndarray, config: RobustConfig):
        self.rig = rig
        self.pixels = pixels
        self.config = config

    @cached_property
    def robust(self) -> RobustTriangulation:
        return robust_triangulate(self.rig, self.pixels, config=self.config.model_copy(update={"use_wss": False}))


@triangulation_method("standard")
def _standard(context: PointContext) -> np.ndarray:
    return triangulate_dlt(context.rig, list(enumerate(context.pixels)))


@triangulation_method("weights_no_wss")
def _weights_no_wss(context: PointContext) -> np.ndarray:
    return context.robust.point


@triangulation_method("weights_wss")
def _weights_wss(context: PointContext) -> np.ndarray:
    if context.robust.rejected:
        weights = [context.config.fallback_weight] * len(context.pixels)
        return solve_dlt(list(context.rig.cameras), list(context.pixels), weights).point
    return context.robust.point


def _robustness_cell(scene: Scene,
                     seed: int,
                     level_index: int,
                     count_index: int,
                     trial: int,
                     sweep: RobustnessSweepConfig,
                     robust_config: RobustConfig) -> List[Tuple[Tuple[int, int, int, int], RobustnessRow]]:
    level = sweep.noise_levels[level_index]
    count = sweep.noisy_view_counts[count_index]
    rng, cell_seed = cell_rng(seed, level_index, count_index, trial)
    spec = NoiseSpec(kind=sweep.noise_kind, magnitude_px=level, n_affected=count)
    noisy, _ = apply_noise(scene.projections, spec, rng)

    contexts = [PointContext(scene.rig, noisy[:, i], robust_config) for i in range(scene.points.shape[0])]
    rows = []
    for method_index, method in enumerate(sweep.methods):
        triangulate: Callable[[PointContext], np.ndarray] = get_method(method)
        estimates, truths, skipped = [], [], 0
        for i, context in enumerate(contexts):
            try:
                estimates.append(triangulate(context))
                truths.append(scene.points[i])
            except GeometryError as e:
                logger.debug(f"Point {i} skipped by {method}: {e}")
                skipped += 1
        error = mpjpe(Pose3D(joints=estimates), Pose3D(joints=truths), root_align=False) if estimates else 0.0
        row = RobustnessRow(seed=cell_seed, method=method, noise_px=level, n_noisy_views=count,
                            mpjpe_mm=error, skipped_points=skipped, trial=trial)
        rows.append(((level_index, count_index, method_index, trial), row))
    return rows


def run_robustness_sweep(scene_config: SceneConfig,
                         sweep: Optional[RobustnessSweepConfig] = None,
                         robust_config: Optional[RobustConfig] = None,
                         seed: int = 0,
                         n_jobs: int = 1) -> List[RobustnessRow]:
    """Triangulation error of every method over the noise grid.

    Rows come back sorted by (noise level, noisy-view count, method, trial).

    Raises:
        ConfigInvalid: If a noisy-view count exceeds the number of cameras
    """
    sweep = sweep or RobustnessSweepConfig()
    robust_config = robust_config or RobustConfig()
    if max(sweep.noisy_view_counts) > scene_config.n_cameras:
        raise ConfigInvalid(f"noisy view count exceeds the {scene_config.n_cameras} cameras")
    assert set(sweep.methods) <= set(method_names())
    scene = generate_scene(scene_config)

    cells = [(li, ci, t)
             for li in range(len(sweep.noise_levels))
             for ci in range(len(sweep.noisy_view_counts))
             for t in range(sweep.trials)]
    logger.info(f"Robustness sweep: {len(cells)} cells x {len(sweep.methods)} methods on {n_jobs} worker(s)")
    results = Parallel(n_jobs=n_jobs)(
        delayed(_robustness_cell)(scene, seed, li, ci, t, sweep, robust_config) for li, ci, t in cells)
    keyed = sorted((item for cell in results for item in cell), key=lambda item: item[0])
    return [row for _, row in keyed]


def stability_detections(scene: Scene, config: StabilityConfig, rng: np.random.Generator) -> np.ndarray:
    """1 px Gaussian noise on every view, plus stronger noise on the outlier view."""
    if config.outlier_view >= scene.n_views:
        raise ConfigInvalid(f"outlier view {config.outlier_view} out of range")
    noisy, _ = apply_noise(scene.projections, NoiseSpec(kind="gaussian", magnitude_px=config.base_noise_px), rng)
    outlier = NoiseSpec(kind="gaussian", magnitude_px=config.outlier_noise_px, affected_views=(config.outlier_view,))
    noisy, _ = apply_noise(noisy, outlier, rng)
    return noisy


def _stability_cell(scene: Scene, seed: int, trial: int, alpha_index: int,
                    config: StabilityConfig) -> List[Tuple[Tuple[int, int, int], StabilityRow]]:
    # noise depends on the trial only, so every alpha descends from the same start
    rng, cell_seed = cell_rng(seed, trial)
    noisy = stability_detections(scene, config, rng)
    alpha = config.alphas[alpha_index]
    trajectory = descend_detections(scene.rig, scene.detections(noisy), alpha, config.step_size,
                                    config.n_steps, Pose3D(joints=scene.points))
    return [((trial, alpha_index, s.step),
             StabilityRow(seed=cell_seed, alpha=alpha, step=s.step, loss=s.loss, mpjpe_mm=s.mpjpe_mm,
                          center_drift_px=s.center_drift_px, trial=trial))
            for s in trajectory]


def run_stability_study(scene_config: SceneConfig,
                        config: Optional[StabilityConfig] = None,
                        seed: int = 0,
                        n_jobs: int = 1) -> List[StabilityRow]:
    """Descent trajectories for every alpha over `trials` noise draws.

    Rows come back sorted by (trial, alpha, step).

    Raises:
        ConfigInvalid: If the scene does not have exactly three cameras
    """
    config = config or StabilityConfig()
    if scene_config.n_cameras != 3:
        raise ConfigInvalid(f"the stability study uses 3 cameras, got {scene_config.n_cameras}")
    scene = generate_scene(scene_config)
    cells = [(t, a) for t in range(config.trials) for a in range(len(config.alphas))]
    logger.info(f"Stability study: {len(cells)} runs of {config.n_steps} steps on {n_jobs} worker(s)")
    results = Parallel(n_jobs=n_jobs)(
        delayed(_stability_cell)(scene, seed, t, a, config) for t, a in cells)
    keyed = sorted((item for cell in results for item in cell), key=lambda item: item[0])
    return [row for _, row in keyed]


def summarize_rows(rows: Sequence[RobustnessRow]) -> Dict[Tuple[str, float, int], float]:
    """Mean MPJPE per (method, noise_px, n_noisy_views)."""
    groups: Dict[Tuple[str, float, int], List[float]] = {}
    for row in rows:
        groups.setdefault((row.method, row.noise_px, row.n_noisy_views), []).append(row.mpjpe_mm)
    return {key: float(np.mean(values)) for key, values in groups.items()}
