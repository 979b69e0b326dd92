"""
RTV Lifting

Deterministic recovery of 3D joints from 2.5D poses by inverting the projection equations.
"""
import logging

import numpy as np

from rtv.core.errors import NonPositiveDepth
from rtv.core.types import Camera, Pose25D, Pose3D
from rtv.geometry.camera import MIN_DEPTH_M, to_camera_frame

logger = logging.getLogger(__name__)


def lift_to_camera(camera: Camera, pose: Pose25D, root_index: int = 0) -> Pose3D:
    """X_cam = (d_root + d_rel) * K^-1 (u, v, 1) for every joint."""
    depths = pose.depths
    bad = np.flatnonzero(depths <= MIN_DEPTH_M)
    if bad.size:
        raise NonPositiveDepth(f"joint depth {depths[bad[0]]:.3g} m is not positive", joint=int(bad[0]))
    uv1 = np.hstack([pose.uv, np.ones((pose.joint_count, 1))])
    rays = np.linalg.solve(camera.intrinsics, uv1.T).T
    return Pose3D(joints=rays * depths[:, None], frame="camera", root_index=root_index)


def lift_to_world(camera: Camera, pose: Pose25D, root_index: int = 0) -> Pose3D:
    """Lift to the camera frame, then X_world = R^T (X_cam - t)."""
    X_cam = lift_to_camera(camera, pose, root_index).joints
    X_world = (X_cam - camera.translation) @ camera.rotation
    return Pose3D(joints=X_world, frame="world", root_index=root_index)


def pose_to_camera_frame(camera: Camera, pose: Pose3D) -> Pose3D:
    """Re-express a world-frame pose in the camera frame."""
    if pose.frame == "camera":
        return pose
    return Pose3D(joints=to_camera_frame(camera, pose.joints), frame="camera", root_index=pose.root_index)
