"""
RTV Triangulation Loss

Weighted self-supervised reprojection loss and its two gradient paths: the direct
path through the detections and the path through the triangulation.

Detections are expressed in coordinates normalized to each view's subject bounding box;
triangulation happens in pixels. Views without a bbox are treated as already in pixels.
The weights are constants for differentiation.
"""
import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import Field

from rtv.core.errors import GeometryError
from rtv.core.types import CameraRig, FrozenModel, MultiViewDetections
from rtv.geometry.camera import project, project_jacobian, project_points
from rtv.geometry.triangulation import solve_dlt
from rtv.losses.svd_grad import dlt_point_jacobian

logger = logging.getLogger(__name__)

FD_STEP = 1e-6


class TriLossResult(FrozenModel):
    """Loss value and per-observation gradients, shaped (n_views, n_joints, 2)."""
    loss: float
    grad_direct: np.ndarray
    grad_through_triangulation: np.ndarray
    points: np.ndarray
    skipped: Dict[int, str] = Field(default_factory=dict)

    def grad_total(self, alpha: float) -> np.ndarray:
        """alpha * direct + (1 - alpha) * through-triangulation."""
        return alpha * self.grad_direct + (1.0 - alpha) * self.grad_through_triangulation


def view_frames(detections: MultiViewDetections) -> Tuple[np.ndarray, np.ndarray]:
    """(centers, half_extents) of every view's normalization, each (n_views, 2)."""
    n = detections.n_views
    if detections.bboxes is None:
        return np.zeros((n, 2)), np.ones((n, 2))
    lo, hi = detections.bboxes[:, 0], detections.bboxes[:, 1]
    half = 0.5 * (hi - lo)
    if np.any(half <= 0):
        raise ValueError("detection bboxes must have positive extent")
    return 0.5 * (hi + lo), half


def _weights(detections: MultiViewDetections, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return detections.valid.astype(float)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != detections.valid.shape:
        raise ValueError(f"weights must have shape {detections.valid.shape}")
    return np.where(detections.valid, weights, 0.0)


class _JointTerms:
    """Triangulation and reprojection of one joint."""

    def __init__(self, rig: CameraRig, detections: MultiViewDetections, weights: np.ndarray,
                 joint: int, centers: np.ndarray, halves: np.ndarray):
        self.views = detections.valid_views(joint)
        self.x_hat = detections.points[self.views, joint]
        self.w = weights[self.views, joint]
        self.centers = centers[self.views]
        self.halves = halves[self.views]
        self.cameras = [rig[c] for c in self.views]
        pixels = self.x_hat * self.halves + self.centers
        self.solution = solve_dlt(self.cameras, list(pixels), self.w)
        self.X = self.solution.point
        reprojected = np.array([project(cam, self.X) for cam in self.cameras])
        self.x_bar = (reprojected - self.centers) / self.halves
        self.residual = self.x_hat - self.x_bar

    @property
    def loss(self) -> float:
        return float(np.sum(self.w * np.sum(self.residual ** 2, axis=1)))

    def grad_direct(self) -> np.ndarray:
        return 2.0 * self.w[:, None] * self.residual

    def grad_through(self) -> np.ndarray:
        # dL/dX, accumulated over every view's reprojection
        g_X = np.zeros(3)
        for cam, w, e, half in zip(self.cameras, self.w, self.residual, self.halves):
            d_xbar_dX = project_jacobian(cam, self.X) / half[:, None]
            g_X += d_xbar_dX.T @ (-2.0 * w * e)
        J = dlt_point_jacobian(self.solution)
        grad = np.zeros_like(self.x_hat)
        kept = np.flatnonzero(self.w > 0)
        for col, i in enumerate(kept):
            grad[i] = (J[:, 2 * col:2 * col + 2].T @ g_X) * self.halves[i]
        return grad


def joint_tri_loss(rig: CameraRig, detections: MultiViewDetections,
                   weights: Optional[np.ndarray], joint: int) -> float:
    """Loss of a single joint; raises on geometric failure."""
    centers, halves = view_frames(detections)
    return _JointTerms(rig, detections, _weights(detections, weights), joint, centers, halves).loss


def tri_loss(rig: CameraRig,
             detections: MultiViewDetections,
             weights: Optional[np.ndarray] = None,
             skipped: Optional[List[int]] = None) -> float:
    """Weighted sum of squared normalized residuals between detections and the
    reprojections of their own triangulation.

    Joints that cannot be triangulated are left out and appended to `skipped`.
    """
    w = _weights(detections, weights)
    centers, halves = view_frames(detections)
    X = np.full((detections.n_joints, 3), np.nan)
    for j in range(detections.n_joints):
        views = detections.valid_views(j)
        pixels = detections.points[views, j] * halves[views] + centers[views]
        try:
            point = solve_dlt([rig[c] for c in views], list(pixels), w[views, j]).point
            for c in views:
                project(rig[c], point)
            X[j] = point
        except GeometryError as e:
            logger.warning(f"Joint {j} left out of the loss: {e}")
            if skipped is not None:
                skipped.append(j)
    ok = ~np.isnan(X[:, 0])

    total = 0.0
    for c in range(detections.n_views):
        mask = ok & detections.valid[c]
        if not np.any(mask):
            continue
        x_bar = (project_points(rig[c], X[mask]) - centers[c]) / halves[c]
        r = detections.points[c, mask] - x_bar
        total += float(np.sum(w[c, mask] * np.sum(r ** 2, axis=1)))
    return total


def _finite_difference_joint(rig: CameraRig, detections: MultiViewDetections, w: np.ndarray,
                             joint: int, alpha: float, h: float,
                             centers: np.ndarray, halves: np.ndarray) -> np.ndarray:
    """Central differences of alpha * L(y, x_bar fixed) + (1 - alpha) * L(x_hat fixed, x_bar(y))."""
    base = _JointTerms(rig, detections, w, joint, centers, halves)
    grad = np.zeros_like(base.x_hat)

    def objective(points: np.ndarray) -> float:
        terms = _JointTerms(rig, detections.with_points(points), w, joint, centers, halves)
        direct = np.sum(base.w * np.sum((terms.x_hat - base.x_bar) ** 2, axis=1))
        through = np.sum(base.w * np.sum((base.x_hat - terms.x_bar) ** 2, axis=1))
        return float(alpha * direct + (1.0 - alpha) * through)

    for i, c in enumerate(base.views):
        for axis in range(2):
            plus = np.array(detections.points)
            minus = np.array(detections.points)
            plus[c, joint, axis] += h
            minus[c, joint, axis] -= h
            grad[i, axis] = (objective(plus) - objective(minus)) / (2.0 * h)
    return grad


def tri_loss_grad(rig: CameraRig,
                  detections: MultiViewDetections,
                  weights: Optional[np.ndarray] = None,
                  alpha: float = 0.5,
                  method: Literal["analytic", "finite_difference"] = "analytic",
                  h: float = FD_STEP) -> TriLossResult:
    """Loss and both gradient paths for every joint.

    Joints whose triangulation or gradient is degenerate contribute nothing and are
    listed in `skipped` with the reason.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    w = _weights(detections, weights)
    centers, halves = view_frames(detections)
    shape = detections.points.shape
    grad_direct = np.zeros(shape)
    grad_through = np.zeros(shape)
    points = np.full((detections.n_joints, 3), np.nan)
    skipped: Dict[int, str] = {}
    loss = 0.0

    for j in range(detections.n_joints):
        try:
            terms = _JointTerms(rig, detections, w, j, centers, halves)
            if method == "analytic":
                direct = terms.grad_direct()
                through = terms.grad_through()
            elif method == "finite_difference":
                direct = _finite_difference_joint(rig, detections, w, j, 1.0, h, centers, halves)
                through = _finite_difference_joint(rig, detections, w, j, 0.0, h, centers, halves)
            else:
                raise ValueError(f"Unknown gradient method: {method}")
        except GeometryError as e:
            logger.debug(f"Joint {j} skipped this step: {e}")
            skipped[j] = type(e).__name__
            continue
        grad_direct[terms.views, j] = direct
        grad_through[terms.views, j] = through
        points[j] = terms.X
        loss += terms.loss

    return TriLossResult(loss=loss,
                         grad_direct=grad_direct,
                         grad_through_triangulation=grad_through,
                         points=points,
                         skipped=skipped)


def finite_difference_grad(rig: CameraRig,
                           detections: MultiViewDetections,
                           weights: Optional[np.ndarray] = None,
                           alpha: float = 0.5,
                           h: float = FD_STEP) -> np.ndarray:
    """grad_total(alpha) by central differences, shaped like the detections."""
    return tri_loss_grad(rig, detections, weights, alpha, method="finite_difference", h=h).grad_total(alpha)
