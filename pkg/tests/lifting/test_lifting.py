"""
Tests for 2.5D to 3D lifting.
"""
import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from rtv.core.errors import NonPositiveDepth
from rtv.core.types import Camera, Pose25D, Pose3D
from rtv.geometry.camera import project_points, to_camera_frame
from rtv.lifting import lift_to_camera, lift_to_world, pose_to_camera_frame


def _as_25d(camera, joints, root_index=0):
    depths = to_camera_frame(camera, joints)[:, 2]
    return Pose25D(uv=project_points(camera, joints), depth_root=depths[root_index],
                   depth_rel=depths - depths[root_index])


def test_identity_camera_lift():
    camera = Camera(intrinsics=np.eye(3), rotation=np.eye(3), translation=np.zeros(3))
    pose = Pose25D(uv=[[0.0, 0.0]], depth_root=2.0, depth_rel=[0.0])
    lifted = lift_to_camera(camera, pose)
    assert lifted.frame == "camera"
    np.testing.assert_allclose(lifted.joints, [[0.0, 0.0, 2.0]], atol=1e-15)


def test_project_then_lift_is_identity(rng, make_camera):
    worst = 0.0
    for _ in range(100):
        camera = make_camera(rng)
        joints = rng.uniform(-0.5, 0.5, size=(17, 3))
        lifted = lift_to_world(camera, _as_25d(camera, joints))
        assert lifted.frame == "world"
        worst = max(worst, float(np.max(np.abs(lifted.joints - joints))))
    assert worst < 1e-8


def test_lift_camera_frame_matches_transform(rng, make_camera):
    camera = make_camera(rng)
    joints = rng.uniform(-0.5, 0.5, size=(5, 3))
    pose = _as_25d(camera, joints, root_index=2)
    lifted = lift_to_camera(camera, pose, root_index=2)
    expected = pose_to_camera_frame(camera, Pose3D(joints=joints, root_index=2))
    np.testing.assert_allclose(lifted.joints, expected.joints, atol=1e-9)
    assert lifted.root_index == 2


def test_non_positive_depth_names_joint():
    camera = Camera(intrinsics=np.eye(3), rotation=np.eye(3), translation=np.zeros(3))
    pose = Pose25D(uv=np.zeros((3, 2)), depth_root=1.0, depth_rel=[0.0, 0.5, -1.5])
    with pytest.raises(NonPositiveDepth) as info:
        lift_to_world(camera, pose)
    assert info.value.joint == 2


def test_camera_frame_pose_passes_through():
    camera = Camera(intrinsics=np.eye(3), rotation=np.eye(3), translation=[0.0, 0.0, 1.0])
    pose = Pose3D(joints=np.ones((2, 3)), frame="camera")
    assert pose_to_camera_frame(camera, pose) is pose
