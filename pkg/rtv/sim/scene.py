"""
RTV Synthetic Scenes

Ring camera rigs looking at a box of target points, with exact projections.
"""
import logging
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from rtv.core.errors import ConfigInvalid, NonPositiveDepth
from rtv.core.types import Camera, CameraRig, FrozenModel, MultiViewDetections
from rtv.geometry.bbox import bbox_of
from rtv.geometry.camera import in_image, project_points

logger = logging.getLogger(__name__)


class SceneConfig(BaseModel):
    """Synthetic rig and target-volume parameters."""
    model_config = ConfigDict(frozen=True)

    n_cameras: int = Field(6, ge=2)
    ring_radius_m: float = Field(5.0, gt=0)
    camera_height_m: float = 1.6
    focal_px: float = Field(1000.0, gt=0)
    image_size: Tuple[int, int] = (1920, 1080)
    n_points: int = Field(100, ge=1)
    point_volume: Tuple[Tuple[float, float, float], Tuple[float, float, float]] = (
        (-1.0, -1.0, 0.0), (1.0, 1.0, 2.0))
    bbox_margin_px: float = Field(20.0, ge=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)

    @field_validator("point_volume")
    @classmethod
    def _volume(cls, value: Any) -> Any:
        lo, hi = np.asarray(value[0]), np.asarray(value[1])
        if np.any(hi <= lo):
            raise ValueError("point_volume max corner must exceed min corner on every axis")
        return value

    @property
    def volume_center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.point_volume[0]) + np.asarray(self.point_volume[1]))


class Scene(FrozenModel):
    """Generated rig, ground-truth points and their exact projections."""
    rig: CameraRig
    points: np.ndarray
    projections: np.ndarray
    bboxes: np.ndarray

    @property
    def n_views(self) -> int:
        return len(self.rig)

    def detections(self, pixels: Optional[np.ndarray] = None) -> MultiViewDetections:
        """Detections in bbox-normalized coordinates, exact unless `pixels` is given."""
        pixels = self.projections if pixels is None else pixels
        lo, hi = self.bboxes[:, 0:1], self.bboxes[:, 1:2]
        normalized = (pixels - 0.5 * (hi + lo)) / (0.5 * (hi - lo))
        return MultiViewDetections.all_valid(normalized, bboxes=self.bboxes)


def ring_rig(config: SceneConfig) -> CameraRig:
    """Cameras evenly spaced on a horizontal ring, all aimed at the volume centre."""
    target = config.volume_center
    cameras: List[Camera] = []
    for k in range(config.n_cameras):
        angle = 2.0 * np.pi * k / config.n_cameras
        eye = (target[0] + config.ring_radius_m * np.cos(angle),
               target[1] + config.ring_radius_m * np.sin(angle),
               config.camera_height_m)
        cameras.append(Camera.look_at(eye, target, config.focal_px, config.image_size))
    return CameraRig(cameras=cameras)


def generate_scene(config: SceneConfig) -> Scene:
    """Sample target points in the volume and project them into every camera.

    Deterministic given `config.seed`.

    Raises:
        ConfigInvalid: If a point falls behind a camera or outside an image
    """
    rig = ring_rig(config)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed]))
    lo, hi = np.asarray(config.point_volume[0]), np.asarray(config.point_volume[1])
    points = rng.uniform(lo, hi, size=(config.n_points, 3))

    projections = np.empty((config.n_cameras, config.n_points, 2))
    bboxes = np.empty((config.n_cameras, 2, 2))
    for c, camera in enumerate(rig.cameras):
        try:
            projections[c] = project_points(camera, points)
        except NonPositiveDepth as e:
            raise ConfigInvalid(f"camera {c}: {e}") from e
        outside = [i for i, x in enumerate(projections[c]) if not in_image(camera, x)]
        if outside:
            raise ConfigInvalid(f"camera {c}: {len(outside)} point(s) project outside the image")
        bboxes[c] = bbox_of(projections[c], config.bbox_margin_px)

    logger.debug(f"Generated scene with {config.n_cameras} cameras and {config.n_points} points")
    return Scene(rig=rig, points=points, projections=projections, bboxes=bboxes)
