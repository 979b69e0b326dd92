"""
RTV Metrics

Pose errors in millimetres: MPJPE, scale-normalized NMPJPE and Procrustes-aligned PMPJPE.
Poses are stored in metres.
"""
import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from rtv.core.errors import DegeneratePose, JointCountMismatch
from rtv.core.types import Pose3D

logger = logging.getLogger(__name__)

M_TO_MM = 1000.0


class MetricReport(BaseModel):
    """All three pose errors plus the per-joint MPJPE breakdown."""
    model_config = ConfigDict(frozen=True)

    mpjpe_mm: float
    nmpjpe_mm: float
    pmpjpe_mm: float
    per_joint_mm: List[float]


def _pair(pred: Pose3D, gt: Pose3D) -> Tuple[np.ndarray, np.ndarray]:
    if pred.joint_count != gt.joint_count:
        raise JointCountMismatch(f"prediction has {pred.joint_count} joints, ground truth {gt.joint_count}")
    if pred.frame != gt.frame:
        raise JointCountMismatch(f"prediction is in the {pred.frame} frame, ground truth in the {gt.frame} frame")
    if pred.joint_count == 0:
        raise JointCountMismatch("poses have no joints")
    return np.array(pred.joints), np.array(gt.joints)


def _root_relative(joints: np.ndarray, root: int) -> np.ndarray:
    return joints - joints[root]


def per_joint_errors(pred: Pose3D, gt: Pose3D, root_align: bool = True) -> np.ndarray:
    """Euclidean error of every joint, millimetres."""
    p, g = _pair(pred, gt)
    if root_align:
        p, g = _root_relative(p, gt.root_index), _root_relative(g, gt.root_index)
    return M_TO_MM * np.linalg.norm(p - g, axis=1)


def mpjpe(pred: Pose3D, gt: Pose3D, root_align: bool = True) -> float:
    """Mean per-joint position error.

    With `root_align` both poses are made root-relative first; without it the error is
    absolute, which is what unstructured point sets need.
    """
    return float(np.mean(per_joint_errors(pred, gt, root_align)))


def nmpjpe(pred: Pose3D, gt: Pose3D) -> float:
    """MPJPE after the least-squares optimal scaling of the root-relative prediction."""
    p, g = _pair(pred, gt)
    p = _root_relative(p, gt.root_index)
    g = _root_relative(g, gt.root_index)
    pp = float(np.sum(p * p))
    if pp < 1e-12:
        raise DegeneratePose("prediction collapses onto its root")
    scale = float(np.sum(p * g)) / pp
    return float(M_TO_MM * np.mean(np.linalg.norm(scale * p - g, axis=1)))


def procrustes_align(pred: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """Similarity transform of `pred` (rotation, translation, scale) best matching `gt`."""
    mu_p = pred.mean(axis=0)
    mu_g = gt.mean(axis=0)
    P = pred - mu_p
    G = gt - mu_g
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[0] < 1e-12 or sv[1] < 1e-9 * sv[0]:
        raise DegeneratePose("prediction joints are collinear or coincident")

    H = P.T @ G
    U, s, Vt = np.linalg.svd(H)
    # reflection guard
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    D = np.diag([1.0, 1.0, d])
    R = Vt.T @ D @ U.T
    scale = float(np.sum(s * np.diag(D))) / float(np.sum(P * P))
    return scale * P @ R.T + mu_g


def pmpjpe(pred: Pose3D, gt: Pose3D) -> float:
    """MPJPE after similarity Procrustes alignment."""
    p, g = _pair(pred, gt)
    if p.shape[0] < 3:
        raise DegeneratePose("Procrustes alignment needs at least three joints")
    aligned = procrustes_align(p, g)
    return float(M_TO_MM * np.mean(np.linalg.norm(aligned - g, axis=1)))


def evaluate(pred: Pose3D, gt: Pose3D) -> MetricReport:
    return MetricReport(mpjpe_mm=mpjpe(pred, gt),
                        nmpjpe_mm=nmpjpe(pred, gt),
                        pmpjpe_mm=pmpjpe(pred, gt),
                        per_joint_mm=per_joint_errors(pred, gt).tolist())
