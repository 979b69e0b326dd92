"""
RTV Types

Core value types: cameras, rigs, multi-view detections, poses and the robust
triangulation configuration. All models are frozen and hold read-only float64 arrays.
"""
from typing import Any, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ORTHONORMAL_TOL = 1e-9
MIN_BASELINE_M = 1e-6


def as_array(value: Any, shape: Optional[Tuple[int, ...]] = None, dtype=np.float64) -> np.ndarray:
    """Coerce a value to a read-only array, checking shape and finiteness.

    Args:
        value: Array-like input
        shape: Expected shape, -1 matches any length along that axis

    Returns:
        A read-only numpy array
    """
    arr = np.array(value, dtype=dtype)
    if shape is not None:
        if arr.ndim != len(shape) or any(s != -1 and s != a for s, a in zip(shape, arr.shape)):
            raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
        raise ValueError("array contains NaN or Inf")
    arr.setflags(write=False)
    return arr


class FrozenModel(BaseModel):
    """Base for immutable models carrying numpy arrays."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Camera(FrozenModel):
    """Calibrated pinhole view: intrinsics K, world-to-camera rotation R and translation t."""
    intrinsics: np.ndarray
    rotation: np.ndarray
    translation: np.ndarray
    image_size: Tuple[int, int] = (1920, 1080)

    @field_validator("intrinsics", "rotation", mode="before")
    @classmethod
    def _matrix(cls, value: Any) -> np.ndarray:
        return as_array(value, (3, 3))

    @field_validator("translation", mode="before")
    @classmethod
    def _vector(cls, value: Any) -> np.ndarray:
        return as_array(value, (3,))

    @model_validator(mode="after")
    def _check(self) -> "Camera":
        R = self.rotation
        if np.max(np.abs(R.T @ R - np.eye(3))) >= ORTHONORMAL_TOL:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOL:
            raise ValueError("rotation determinant is not 1")
        K = self.intrinsics
        if K[1, 0] != 0 or K[2, 0] != 0 or K[2, 1] != 0:
            raise ValueError("intrinsics must be upper-triangular")
        if K[2, 2] != 1.0:
            raise ValueError("intrinsics K[2][2] must be 1")
        if K[0, 0] <= 0 or K[1, 1] <= 0:
            raise ValueError("focal entries must be positive")
        if self.image_size[0] <= 0 or self.image_size[1] <= 0:
            raise ValueError("image size must be positive")
        return self

    @property
    def projection_matrix(self) -> np.ndarray:
        """3x4 matrix K[R|t]."""
        return self.intrinsics @ np.hstack([self.rotation, self.translation[:, None]])

    @property
    def center(self) -> np.ndarray:
        """Camera centre in world coordinates."""
        return -self.rotation.T @ self.translation

    @classmethod
    def look_at(cls,
                eye: Sequence[float],
                target: Sequence[float],
                focal_px: float,
                image_size: Tuple[int, int] = (1920, 1080),
                up: Sequence[float] = (0.0, 0.0, 1.0)) -> "Camera":
        """Build a camera at `eye` whose optical axis passes through `target`.

        The principal point sits at the image centre; image v grows downwards.
        """
        eye = np.asarray(eye, dtype=float)
        forward = np.asarray(target, dtype=float) - eye
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(up, dtype=float))
        norm = np.linalg.norm(right)
        if norm < 1e-12:
            raise ValueError("up vector is parallel to the viewing direction")
        right /= norm
        down = np.cross(forward, right)
        R = np.vstack([right, down, forward])
        width, height = image_size
        K = np.array([[focal_px, 0.0, width / 2.0],
                      [0.0, focal_px, height / 2.0],
                      [0.0, 0.0, 1.0]])
        return cls(intrinsics=K, rotation=R, translation=-R @ eye, image_size=image_size)


class CameraRig(FrozenModel):
    """Ordered list of at least two cameras with distinct centres."""
    cameras: List[Camera]

    @model_validator(mode="after")
    def _check(self) -> "CameraRig":
        if len(self.cameras) < 2:
            raise ValueError("a rig needs at least two cameras")
        centers = np.array([c.center for c in self.cameras])
        for a in range(len(centers)):
            for b in range(a + 1, len(centers)):
                if np.linalg.norm(centers[a] - centers[b]) <= MIN_BASELINE_M:
                    raise ValueError(f"cameras {a} and {b} share the same centre")
        return self

    def __len__(self) -> int:
        return len(self.cameras)

    def __getitem__(self, index: int) -> Camera:
        return self.cameras[index]


class MultiViewDetections(FrozenModel):
    """Per-view, per-joint 2D points with validity flags.

    `points` has shape (n_views, n_joints, 2). `bboxes`, when present, has shape
    (n_views, 2, 2) holding the (min, max) corners of each view's subject box.
    """
    points: np.ndarray
    valid: np.ndarray
    bboxes: Optional[np.ndarray] = None

    @field_validator("points", mode="before")
    @classmethod
    def _points(cls, value: Any) -> np.ndarray:
        return as_array(value, (-1, -1, 2))

    @field_validator("valid", mode="before")
    @classmethod
    def _valid(cls, value: Any) -> np.ndarray:
        return as_array(value, (-1, -1), dtype=bool)

    @field_validator("bboxes", mode="before")
    @classmethod
    def _bboxes(cls, value: Any) -> Optional[np.ndarray]:
        if value is None:
            return None
        return as_array(value, (-1, 2, 2))

    @model_validator(mode="after")
    def _check(self) -> "MultiViewDetections":
        if self.valid.shape != self.points.shape[:2]:
            raise ValueError("valid mask shape does not match points")
        if self.bboxes is not None and self.bboxes.shape[0] != self.points.shape[0]:
            raise ValueError("one bbox per view is required")
        return self

    @classmethod
    def all_valid(cls, points: Any, bboxes: Any = None) -> "MultiViewDetections":
        points = np.asarray(points, dtype=float)
        return cls(points=points, valid=np.ones(points.shape[:2], dtype=bool), bboxes=bboxes)

    @property
    def n_views(self) -> int:
        return self.points.shape[0]

    @property
    def n_joints(self) -> int:
        return self.points.shape[1]

    def valid_views(self, joint: int) -> List[int]:
        """Indices of the views where `joint` is valid."""
        return [int(c) for c in np.flatnonzero(self.valid[:, joint])]

    def joint_observations(self, joint: int) -> List[Tuple[int, np.ndarray]]:
        """(view_index, point) pairs of the valid observations of one joint."""
        return [(c, self.points[c, joint]) for c in self.valid_views(joint)]

    def with_points(self, points: np.ndarray) -> "MultiViewDetections":
        return MultiViewDetections(points=points, valid=self.valid, bboxes=self.bboxes)


class Pose25D(FrozenModel):
    """Per-joint image location plus root depth and root-relative depth."""
    uv: np.ndarray
    depth_root: float
    depth_rel: np.ndarray

    @field_validator("uv", mode="before")
    @classmethod
    def _uv(cls, value: Any) -> np.ndarray:
        return as_array(value, (-1, 2))

    @field_validator("depth_rel", mode="before")
    @classmethod
    def _rel(cls, value: Any) -> np.ndarray:
        return as_array(value, (-1,))

    @model_validator(mode="after")
    def _check(self) -> "Pose25D":
        if self.uv.shape[0] != self.depth_rel.shape[0]:
            raise ValueError("uv and depth_rel disagree on joint count")
        if not np.isfinite(self.depth_root):
            raise ValueError("depth_root must be finite")
        return self

    @property
    def joint_count(self) -> int:
        return self.uv.shape[0]

    @property
    def depths(self) -> np.ndarray:
        return self.depth_root + self.depth_rel


class Pose3D(FrozenModel):
    """3D joints tagged with the frame they are expressed in."""
    joints: np.ndarray
    frame: Literal["world", "camera"] = "world"
    root_index: int = 0

    @field_validator("joints", mode="before")
    @classmethod
    def _joints(cls, value: Any) -> np.ndarray:
        return as_array(value, (-1, 3))

    @model_validator(mode="after")
    def _check(self) -> "Pose3D":
        if not 0 <= self.root_index < max(self.joints.shape[0], 1):
            raise ValueError("root_index out of range")
        return self

    @property
    def joint_count(self) -> int:
        return self.joints.shape[0]


class RobustConfig(BaseModel):
    """Parameters of the robust localization pipeline, distances in millimetres."""
    model_config = ConfigDict(frozen=True)

    sigma_mm: float = Field(10.0, gt=0, allow_inf_nan=False)
    wss_threshold_mm: float = Field(20.0, gt=0, allow_inf_nan=False)
    fallback_weight: float = Field(1e-3, gt=0, allow_inf_nan=False)
    wss_compare: Literal["rms", "squared"] = "rms"
    use_wss: bool = True
    target: Literal["wdlt", "geomed"] = "wdlt"
