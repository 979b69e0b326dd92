"""
Tests for gradient descent of the detections on the triangulation loss.
"""
import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from rtv.core.types import Pose3D
from rtv.losses.descent import center_drift_px, descend_detections
from rtv.sim.noise import NoiseSpec, apply_noise
from rtv.sim.scene import SceneConfig, generate_scene


@pytest.fixture
def three_view_scene():
    return generate_scene(SceneConfig(n_cameras=3, n_points=8, seed=21))


def _noisy(scene, seed):
    rng = np.random.default_rng(seed)
    noisy, _ = apply_noise(scene.projections, NoiseSpec(kind="gaussian", magnitude_px=1.0), rng)
    noisy, _ = apply_noise(noisy, NoiseSpec(kind="gaussian", magnitude_px=10.0, affected_views=(0,)), rng)
    return scene.detections(noisy)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_consistent_detections_stay_put(three_view_scene, alpha):
    truth = Pose3D(joints=three_view_scene.points)
    trajectory = descend_detections(three_view_scene.rig, three_view_scene.detections(), alpha, 0.05, 5, truth)
    assert [s.step for s in trajectory] == list(range(5))
    for step in trajectory:
        assert step.loss < 1e-12
        assert step.mpjpe_mm < 1e-6
    assert trajectory[0].center_drift_px == pytest.approx(trajectory[-1].center_drift_px, abs=1e-9)


def test_first_step_is_initial_state(three_view_scene):
    detections = _noisy(three_view_scene, 0)
    truth = Pose3D(joints=three_view_scene.points)
    trajectory = descend_detections(three_view_scene.rig, detections, 0.5, 0.05, 3, truth)
    assert trajectory[0].center_drift_px == pytest.approx(center_drift_px(three_view_scene.rig, detections))


def test_balanced_descent_lowers_loss(three_view_scene):
    truth = Pose3D(joints=three_view_scene.points)
    for seed in range(3):
        trajectory = descend_detections(three_view_scene.rig, _noisy(three_view_scene, seed), 0.5, 0.05, 60, truth)
        losses = [s.loss for s in trajectory]
        assert all(b <= a + 1e-15 for a, b in zip(losses, losses[1:]))
        assert losses[-1] < 0.5 * losses[0]


def test_balanced_descent_stays_finite(three_view_scene):
    truth = Pose3D(joints=three_view_scene.points)
    for seed in range(5):
        trajectory = descend_detections(three_view_scene.rig, _noisy(three_view_scene, seed), 0.5, 0.05, 100, truth)
        assert len(trajectory) == 100
        assert all(np.isfinite(s.mpjpe_mm) and np.isfinite(s.loss) for s in trajectory)


def test_invalid_arguments(three_view_scene):
    truth = Pose3D(joints=three_view_scene.points)
    with pytest.raises(ValueError):
        descend_detections(three_view_scene.rig, three_view_scene.detections(), 0.5, 0.0, 5, truth)
    with pytest.raises(ValueError):
        descend_detections(three_view_scene.rig, three_view_scene.detections(), 0.5, 0.05, 0, truth)
