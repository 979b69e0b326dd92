"""
Tests for DLT triangulation and its oracles.
"""
import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from rtv.core.errors import DegenerateGeometry, InsufficientViews
from rtv.core.types import CameraRig
from rtv.geometry.camera import project
from rtv.geometry.triangulation import (
    solve_dlt,
    triangulate_dlt,
    triangulate_midpoint,
    triangulate_nonlinear,
    triangulate_pair,
)


def _random_instance(rng, make_camera, n_views):
    cameras = []
    while len(cameras) < n_views:
        cameras.append(make_camera(rng))
    rig = CameraRig(cameras=cameras)
    X = rng.uniform(-0.5, 0.5, size=3)
    observations = [(c, project(rig[c], X)) for c in range(n_views)]
    return rig, X, observations


def test_exact_projections_recovered(rng, make_camera):
    for _ in range(1000):
        rig, X, observations = _random_instance(rng, make_camera, int(rng.integers(2, 6)))
        np.testing.assert_allclose(triangulate_dlt(rig, observations), X, atol=1e-8)


def test_stereo_example(stereo_rig):
    X = np.array([0.0, 0.0, 5.0])
    observations = [(0, project(stereo_rig[0], X)), (1, project(stereo_rig[1], X))]
    np.testing.assert_allclose(observations[0][1], [1160.0, 540.0], atol=1e-9)
    np.testing.assert_allclose(triangulate_dlt(stereo_rig, observations), X, atol=1e-9)


def test_pair_matches_ray_midpoint(rng, make_camera):
    for _ in range(200):
        rig, X, observations = _random_instance(rng, make_camera, 2)
        x_a, x_b = observations[0][1], observations[1][1]
        dlt = triangulate_pair(rig[0], rig[1], x_a, x_b)
        midpoint = triangulate_midpoint(rig[0], rig[1], x_a, x_b)
        np.testing.assert_allclose(dlt, midpoint, atol=1e-6)


def test_noisy_dlt_close_to_nonlinear_refinement(rng, make_camera):
    dlt_errors, refined_errors = [], []
    for _ in range(200):
        rig = CameraRig(cameras=[make_camera(rng, radius=(5.0, 5.0)) for _ in range(4)])
        X = rng.uniform(-0.2, 0.2, size=3)
        observations = [(c, project(rig[c], X)) for c in range(4)]
        noisy = [(c, x + rng.normal(0.0, 1.0, size=2)) for c, x in observations]
        dlt = triangulate_dlt(rig, noisy)
        refined = triangulate_nonlinear(rig, noisy, initial=dlt)
        dlt_errors.append(np.linalg.norm(dlt - X))
        refined_errors.append(np.linalg.norm(refined - X))
    assert abs(np.mean(dlt_errors) - np.mean(refined_errors)) < 0.05 * np.mean(refined_errors)


def test_uniform_weight_scale_invariance(rng, make_camera):
    rig, X, observations = _random_instance(rng, make_camera, 3)
    noisy = [(c, x + rng.normal(0.0, 2.0, size=2)) for c, x in observations]
    unweighted = triangulate_dlt(rig, noisy)
    np.testing.assert_allclose(triangulate_dlt(rig, noisy, [3.0, 3.0, 3.0]), unweighted, atol=1e-10)


def test_zero_weight_view_is_ignored(rng, make_camera):
    rig, X, observations = _random_instance(rng, make_camera, 3)
    corrupted = list(observations)
    corrupted[2] = (2, observations[2][1] + np.array([80.0, -50.0]))
    point = triangulate_dlt(rig, corrupted, [1.0, 1.0, 0.0])
    np.testing.assert_allclose(point, X, atol=1e-8)


def test_one_view_is_insufficient(stereo_rig):
    with pytest.raises(InsufficientViews):
        triangulate_dlt(stereo_rig, [(0, np.array([1000.0, 500.0]))])
    with pytest.raises(InsufficientViews):
        triangulate_dlt(stereo_rig, [(0, np.array([1000.0, 500.0])), (0, np.array([1001.0, 500.0]))])


def test_single_effective_weight_is_insufficient(stereo_rig):
    X = np.array([0.0, 0.0, 5.0])
    pixels = [project(stereo_rig[c], X) for c in range(2)]
    with pytest.raises(InsufficientViews):
        solve_dlt(list(stereo_rig.cameras), pixels, [1.0, 1e-13])


def test_zero_baseline(stereo_rig):
    camera = stereo_rig[0]
    with pytest.raises(DegenerateGeometry):
        solve_dlt([camera, camera], [np.array([1000.0, 500.0]), np.array([1010.0, 500.0])])


def test_parallel_rays_midpoint(stereo_rig):
    # same pixel in both cameras: parallel rays
    pixel = np.array([960.0, 540.0])
    with pytest.raises(DegenerateGeometry):
        triangulate_midpoint(stereo_rig[0], stereo_rig[1], pixel, pixel)


def test_parallel_rays_dlt(stereo_rig):
    pixel = np.array([960.0, 540.0])
    with pytest.raises(DegenerateGeometry):
        triangulate_pair(stereo_rig[0], stereo_rig[1], pixel, pixel)


def test_invalid_weights(stereo_rig):
    pixels = [np.array([1000.0, 500.0]), np.array([900.0, 500.0])]
    with pytest.raises(ValueError):
        solve_dlt(list(stereo_rig.cameras), pixels, [1.0, -1.0])
    with pytest.raises(ValueError):
        solve_dlt(list(stereo_rig.cameras), pixels, [1.0])
