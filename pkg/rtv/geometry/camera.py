"""
RTV Camera Geometry

Pinhole projection, camera-frame transforms and reprojection errors.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np

from rtv.core.errors import NonPositiveDepth
from rtv.core.types import Camera, CameraRig

logger = logging.getLogger(__name__)

MIN_DEPTH_M = 1e-9


def to_camera_frame(camera: Camera, point: np.ndarray) -> np.ndarray:
    """Express a world point (or an (N, 3) array of points) in the camera frame."""
    point = np.asarray(point, dtype=float)
    return point @ camera.rotation.T + camera.translation


def project(camera: Camera, point: np.ndarray) -> np.ndarray:
    """Project a world point to pixel coordinates.

    Args:
        camera: The camera
        point: World point (X, Y, Z) in metres

    Returns:
        Pixel coordinates (u, v)

    Raises:
        NonPositiveDepth: If the point is on or behind the camera plane
    """
    X_cam = to_camera_frame(camera, point)
    if X_cam[2] <= MIN_DEPTH_M:
        raise NonPositiveDepth(f"point has camera depth {X_cam[2]:.3g} m")
    x = camera.intrinsics @ X_cam
    return x[:2] / x[2]


def project_points(camera: Camera, points: np.ndarray) -> np.ndarray:
    """Batched `project` over an (N, 3) array; returns (N, 2)."""
    X_cam = to_camera_frame(camera, np.atleast_2d(points))
    bad = X_cam[:, 2] <= MIN_DEPTH_M
    if np.any(bad):
        raise NonPositiveDepth(f"{int(bad.sum())} point(s) have non-positive camera depth",
                               joint=int(np.flatnonzero(bad)[0]))
    x = X_cam @ camera.intrinsics.T
    return x[:, :2] / x[:, 2:3]


def project_jacobian(camera: Camera, point: np.ndarray) -> np.ndarray:
    """2x3 derivative of `project` with respect to the world point."""
    X_cam = to_camera_frame(camera, point)
    x = camera.intrinsics @ X_cam
    w = x[2]
    # d(u, v)/d(x_h) for the homogeneous image point, then chain through K R.
    d_dehom = np.array([[1.0 / w, 0.0, -x[0] / w ** 2],
                        [0.0, 1.0 / w, -x[1] / w ** 2]])
    return d_dehom @ camera.intrinsics @ camera.rotation


def in_image(camera: Camera, pixel: np.ndarray) -> bool:
    width, height = camera.image_size
    return bool(0.0 <= pixel[0] <= width and 0.0 <= pixel[1] <= height)


def reprojection_errors(rig: CameraRig,
                        point: np.ndarray,
                        observations: Sequence[Tuple[int, np.ndarray]]) -> List[float]:
    """Pixel distance between each observation and the projection of `point`."""
    return [float(np.linalg.norm(project(rig[c], point) - np.asarray(x, dtype=float)))
            for c, x in observations]
