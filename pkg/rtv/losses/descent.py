"""
RTV Detection Descent

Fixed-step gradient descent of the detections on the triangulation loss, tracking how
far the re-triangulated points drift from the ground truth.
"""
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from rtv.core.types import CameraRig, MultiViewDetections, Pose3D
from rtv.losses.tri_loss import tri_loss_grad, view_frames
from rtv.metrics import mpjpe

logger = logging.getLogger(__name__)


class DescentStep(BaseModel):
    """State of the detections before the update of one step."""
    model_config = ConfigDict(frozen=True)

    step: int
    loss: float
    mpjpe_mm: float
    center_drift_px: float
    n_skipped: int = 0


def center_drift_px(rig: CameraRig, detections: MultiViewDetections) -> float:
    """Mean pixel distance of the valid detections to their image centres."""
    centers, halves = view_frames(detections)
    distances = []
    for c in range(detections.n_views):
        pixels = detections.points[c, detections.valid[c]] * halves[c] + centers[c]
        image_center = 0.5 * np.array(rig[c].image_size, dtype=float)
        distances.extend(np.linalg.norm(pixels - image_center, axis=1))
    return float(np.mean(distances)) if distances else 0.0


def descend_detections(rig: CameraRig,
                       detections: MultiViewDetections,
                       alpha: float,
                       step_size: float,
                       n_steps: int,
                       ground_truth: Pose3D,
                       weights: Optional[np.ndarray] = None) -> List[DescentStep]:
    """Run `n_steps` of x_hat <- x_hat - step_size * grad_total(alpha).

    Every step records the loss and the absolute MPJPE of the re-triangulated points
    against `ground_truth` (joints skipped that step are left out of the MPJPE).

    Returns:
        One DescentStep per step, step 0 being the initial detections
    """
    if step_size <= 0:
        raise ValueError("step_size must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")

    trajectory = []
    current = detections
    for step in range(n_steps):
        result = tri_loss_grad(rig, current, weights, alpha)
        ok = ~np.isnan(result.points[:, 0])
        if np.any(ok):
            error = mpjpe(Pose3D(joints=result.points[ok], frame=ground_truth.frame),
                          Pose3D(joints=ground_truth.joints[ok], frame=ground_truth.frame),
                          root_align=False)
        else:
            error = float("nan")
        if result.skipped:
            logger.debug(f"Step {step}: {len(result.skipped)} joint(s) skipped")
        trajectory.append(DescentStep(step=step,
                                      loss=result.loss,
                                      mpjpe_mm=error,
                                      center_drift_px=center_drift_px(rig, current),
                                      n_skipped=len(result.skipped)))
        current = current.with_points(current.points - step_size * result.grad_total(alpha))
    return trajectory
