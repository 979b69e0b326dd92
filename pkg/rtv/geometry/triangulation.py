"""
RTV Triangulation

Standard and weighted Direct Linear Transform triangulation, plus the ray-midpoint
and nonlinear least-squares variants used to cross-check it.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from rtv.core.errors import DegenerateGeometry, InsufficientViews
from rtv.core.types import MIN_BASELINE_M, Camera, CameraRig
from rtv.geometry.camera import project

logger = logging.getLogger(__name__)

MIN_WEIGHT = 1e-12
MIN_HOMOGENEOUS = 1e-12

Observation = Tuple[int, np.ndarray]


def conditioning_transform(camera: Camera) -> np.ndarray:
    """Image-plane similarity moving the image centre to the origin, corners to radius sqrt(2)."""
    width, height = camera.image_size
    scale = np.sqrt(2.0) / (0.5 * np.hypot(width, height))
    return np.array([[scale, 0.0, -scale * width / 2.0],
                     [0.0, scale, -scale * height / 2.0],
                     [0.0, 0.0, 1.0]])


class DLTSolution:
    """Solved homogeneous system of one triangulated point."""

    def __init__(self,
                 A: np.ndarray,
                 singular_values: np.ndarray,
                 Vt: np.ndarray,
                 P: List[np.ndarray],
                 scales: np.ndarray,
                 weights: np.ndarray):
        """
        Initialize the solution.

        Args:
            A: (2N, 4) system matrix, weighted and conditioned
            singular_values: Singular values of A, descending
            Vt: Right singular vectors of A as rows
            P: Conditioned projection matrices, one per observation
            scales: Image-plane conditioning scale of each observation
            weights: Weight of each observation
        """
        self.A = A
        self.singular_values = singular_values
        self.Vt = Vt
        self.P = P
        self.scales = scales
        self.weights = weights

    @property
    def homogeneous(self) -> np.ndarray:
        return self.Vt[-1]

    @property
    def point(self) -> np.ndarray:
        v = self.homogeneous
        return v[:3] / v[3]


def _dlt_rows(camera: Camera, pixel: np.ndarray, weight: float) -> Tuple[np.ndarray, np.ndarray, float]:
    T = conditioning_transform(camera)
    P = T @ camera.projection_matrix
    u, v, _ = T @ np.array([pixel[0], pixel[1], 1.0])
    rows = weight * np.vstack([u * P[2] - P[0], v * P[2] - P[1]])
    return rows, P, T[0, 0]


def solve_dlt(cameras: Sequence[Camera],
              pixels: Sequence[np.ndarray],
              weights: Optional[Sequence[float]] = None) -> DLTSolution:
    """Assemble and solve the (weighted) DLT system for one point.

    Observations with weight exactly zero contribute no rows.

    Raises:
        InsufficientViews: Fewer than two observations with weight above 1e-12
        DegenerateGeometry: Zero baseline or a solution at infinity
    """
    if weights is None:
        weights = [1.0] * len(cameras)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(cameras),):
        raise ValueError("weights must match observations")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and non-negative")

    effective = [i for i, w in enumerate(weights) if w > MIN_WEIGHT]
    if len(effective) < 2:
        raise InsufficientViews(f"{len(effective)} effective observation(s), need 2")
    centers = [cameras[i].center for i in effective]
    baseline = max(np.linalg.norm(a - b) for k, a in enumerate(centers) for b in centers[k + 1:])
    if baseline <= MIN_BASELINE_M:
        raise DegenerateGeometry(f"zero baseline ({baseline:.3g} m) between observing cameras")

    kept = [i for i, w in enumerate(weights) if w > 0]
    blocks, Ps, scales = [], [], []
    for i in kept:
        rows, P, scale = _dlt_rows(cameras[i], np.asarray(pixels[i], dtype=float), weights[i])
        blocks.append(rows)
        Ps.append(P)
        scales.append(scale)
    A = np.vstack(blocks)
    _, S, Vt = np.linalg.svd(A)
    solution = DLTSolution(A, S, Vt, Ps, np.asarray(scales), weights[kept])

    if abs(solution.homogeneous[3]) < MIN_HOMOGENEOUS:
        raise DegenerateGeometry("triangulated point lies at infinity (near-parallel rays)")
    if S[-2] <= S[0] * 1e-14:
        raise DegenerateGeometry("DLT system has a multi-dimensional null space")
    return solution


def triangulate_dlt(rig: CameraRig,
                    observations: Sequence[Observation],
                    weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """Triangulate one point from (view_index, pixel) observations.

    Args:
        rig: Camera rig
        observations: (view_index, (u, v)) pairs from at least two distinct views
        weights: Optional per-observation reliability weights

    Returns:
        World point (X, Y, Z)
    """
    views = {c for c, _ in observations}
    if len(views) < 2:
        raise InsufficientViews(f"observations from {len(views)} distinct view(s), need 2")
    cameras = [rig[c] for c, _ in observations]
    pixels = [x for _, x in observations]
    return solve_dlt(cameras, pixels, weights).point


def triangulate_pair(cam_a: Camera, cam_b: Camera, x_a: np.ndarray, x_b: np.ndarray) -> np.ndarray:
    """Unweighted two-view DLT."""
    return solve_dlt([cam_a, cam_b], [x_a, x_b]).point


def _ray(camera: Camera, pixel: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    direction = camera.rotation.T @ np.linalg.solve(camera.intrinsics, np.array([pixel[0], pixel[1], 1.0]))
    return camera.center, direction / np.linalg.norm(direction)


def triangulate_midpoint(cam_a: Camera, cam_b: Camera, x_a: np.ndarray, x_b: np.ndarray) -> np.ndarray:
    """Midpoint of the shortest segment between the two back-projected rays."""
    c1, d1 = _ray(cam_a, x_a)
    c2, d2 = _ray(cam_b, x_b)
    w0 = c1 - c2
    b = d1 @ d2
    denom = 1.0 - b * b
    if denom < 1e-15:
        raise DegenerateGeometry("rays are parallel")
    d = d1 @ w0
    e = d2 @ w0
    s = (b * e - d) / denom
    t = (e - b * d) / denom
    return 0.5 * ((c1 + s * d1) + (c2 + t * d2))


def triangulate_nonlinear(rig: CameraRig,
                          observations: Sequence[Observation],
                          initial: Optional[np.ndarray] = None) -> np.ndarray:
    """Minimise the summed squared pixel reprojection error, starting from DLT."""
    x0 = triangulate_dlt(rig, observations) if initial is None else np.asarray(initial, dtype=float)

    def residuals(X: np.ndarray) -> np.ndarray:
        return np.concatenate([project(rig[c], X) - np.asarray(x, dtype=float) for c, x in observations])

    result = least_squares(residuals, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    logger.debug(f"Nonlinear refinement finished after {result.nfev} evaluations")
    return result.x
