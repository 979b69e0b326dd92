"""
Shared fixtures for the RTV test suite.
"""
import pytest
import numpy as np
from scipy.spatial.transform import Rotation

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from rtv.core.types import Camera, CameraRig
from rtv.sim.scene import SceneConfig, generate_scene


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical or long-running simulation test")


def random_camera(rng: np.random.Generator, radius=(3.0, 6.0), focal=(800.0, 1500.0)) -> Camera:
    """Camera at a random position around the origin, aimed near it."""
    direction = Rotation.random(random_state=rng.integers(2 ** 31)).apply([1.0, 0.0, 0.0])
    direction[2] = np.clip(direction[2], -0.6, 0.6)
    direction /= np.linalg.norm(direction)
    eye = rng.uniform(*radius) * direction
    target = rng.uniform(-0.2, 0.2, size=3)
    return Camera.look_at(eye, target, rng.uniform(*focal))


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def make_camera():
    """Factory of random cameras looking at the origin."""
    return random_camera


@pytest.fixture
def ring_config():
    """Small six-camera ring scene."""
    return SceneConfig(n_cameras=6, n_points=20, seed=7)


@pytest.fixture
def ring_scene(ring_config):
    return generate_scene(ring_config)


@pytest.fixture
def ring_rig(ring_scene) -> CameraRig:
    return ring_scene.rig


@pytest.fixture
def stereo_rig():
    """Two cameras 2 m apart, both looking down +z of the world."""
    K = np.array([[1000.0, 0.0, 960.0], [0.0, 1000.0, 540.0], [0.0, 0.0, 1.0]])
    left = Camera(intrinsics=K, rotation=np.eye(3), translation=[1.0, 0.0, 0.0])
    right = Camera(intrinsics=K, rotation=np.eye(3), translation=[-1.0, 0.0, 0.0])
    return CameraRig(cameras=[left, right])
