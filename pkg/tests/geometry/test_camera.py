"""
Tests for projection and bounding-box normalization.
"""
import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from rtv.core.errors import EmptyBBox, NonPositiveDepth
from rtv.core.types import Camera
from rtv.geometry.bbox import bbox_of, denormalize_from_bbox, normalize_to_bbox
from rtv.geometry.camera import (
    in_image,
    project,
    project_jacobian,
    project_points,
    reprojection_errors,
    to_camera_frame,
)


def test_project_known_point(stereo_rig):
    # left camera centre is (-1, 0, 0): the point sits 1 m right of it at 5 m depth
    pixel = project(stereo_rig[0], np.array([0.0, 0.0, 5.0]))
    np.testing.assert_allclose(pixel, [960.0 + 200.0, 540.0], atol=1e-9)


def test_project_behind_camera(stereo_rig):
    with pytest.raises(NonPositiveDepth):
        project(stereo_rig[0], np.array([0.0, 0.0, -1.0]))


def test_project_points_matches_project(rng, make_camera):
    camera = make_camera(rng)
    points = rng.uniform(-0.5, 0.5, size=(25, 3))
    batched = project_points(camera, points)
    for point, pixel in zip(points, batched):
        np.testing.assert_allclose(project(camera, point), pixel, atol=1e-9)


def test_project_points_reports_first_bad_joint(stereo_rig):
    points = np.array([[0.0, 0.0, 5.0], [0.0, 0.0, 4.0], [0.0, 0.0, -2.0]])
    with pytest.raises(NonPositiveDepth) as info:
        project_points(stereo_rig[0], points)
    assert info.value.joint == 2


def test_to_camera_frame_of_centre(rng, make_camera):
    camera = make_camera(rng)
    np.testing.assert_allclose(to_camera_frame(camera, camera.center), 0.0, atol=1e-9)


def test_project_jacobian_matches_finite_differences(rng, make_camera):
    camera = make_camera(rng)
    point = rng.uniform(-0.3, 0.3, size=3)
    J = project_jacobian(camera, point)
    h = 1e-6
    numeric = np.zeros((2, 3))
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        numeric[:, k] = (project(camera, point + step) - project(camera, point - step)) / (2 * h)
    np.testing.assert_allclose(J, numeric, rtol=1e-5, atol=1e-4)


def test_in_image(stereo_rig):
    assert in_image(stereo_rig[0], np.array([10.0, 10.0]))
    assert not in_image(stereo_rig[0], np.array([-1.0, 10.0]))
    assert not in_image(stereo_rig[0], np.array([10.0, 2000.0]))


def test_reprojection_errors_zero_for_exact(stereo_rig):
    X = np.array([0.2, -0.1, 6.0])
    observations = [(c, project(stereo_rig[c], X)) for c in range(2)]
    assert max(reprojection_errors(stereo_rig, X, observations)) < 1e-9
    shifted = [(0, observations[0][1] + np.array([3.0, 4.0])), observations[1]]
    np.testing.assert_allclose(reprojection_errors(stereo_rig, X, shifted), [5.0, 0.0], atol=1e-9)


def test_bbox_normalization_round_trip(rng):
    bbox = np.array([[100.0, 200.0], [500.0, 400.0]])
    pixels = rng.uniform(0, 1000, size=(10, 2))
    normalized = normalize_to_bbox(pixels, bbox)
    np.testing.assert_allclose(denormalize_from_bbox(normalized, bbox), pixels, atol=1e-9)
    np.testing.assert_allclose(normalize_to_bbox(np.array([[300.0, 300.0]]), bbox), [[0.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(normalize_to_bbox(np.array([[500.0, 400.0]]), bbox), [[1.0, 1.0]], atol=1e-12)


def test_empty_bbox():
    with pytest.raises(EmptyBBox):
        normalize_to_bbox(np.zeros((1, 2)), np.array([[100.0, 100.0], [100.0, 300.0]]))


def test_bbox_of_with_margin():
    points = np.array([[10.0, 20.0], [30.0, 60.0], [20.0, 40.0]])
    np.testing.assert_allclose(bbox_of(points, margin=5.0), [[5.0, 15.0], [35.0, 65.0]])


def test_identity_camera_optical_axis():
    camera = Camera(intrinsics=np.eye(3), rotation=np.eye(3), translation=np.zeros(3))
    np.testing.assert_allclose(project(camera, np.array([0.0, 0.0, 1.0])), [0.0, 0.0], atol=1e-15)


def test_focal_scaling():
    camera = Camera(intrinsics=np.diag([1000.0, 1000.0, 1.0]), rotation=np.eye(3), translation=np.zeros(3))
    np.testing.assert_allclose(project(camera, np.array([0.1, 0.0, 2.0])), [50.0, 0.0], atol=1e-12)
