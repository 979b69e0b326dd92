"""
RTV Robust Triangulation

Weighted DLT driven by cross-view agreement, with WSS-based joint rejection.
"""
import logging
from typing import Dict, List, Optional

import numpy as np
from pydantic import Field

from rtv.core.errors import GeometryError, InsufficientViews
from rtv.core.types import CameraRig, FrozenModel, MultiViewDetections, RobustConfig
from rtv.geometry.triangulation import solve_dlt
from rtv.robust.cluster import DetectionCluster, ViewPair, build_cluster
from rtv.robust.weights import pairwise_weights, per_view_weights, wss, wss_statistic

logger = logging.getLogger(__name__)

# lower bound on DLT weights after rescaling to a maximum of 1
DLT_WEIGHT_FLOOR = 1e-9


class RobustTriangulation(FrozenModel):
    """Outcome of robust triangulation for one joint."""
    point: Optional[np.ndarray] = None
    per_view_weights: Dict[int, float] = Field(default_factory=dict)
    pairwise_weights: Dict[ViewPair, float] = Field(default_factory=dict)
    wss_mm2: float = 0.0
    wss_mm: float = 0.0
    rejected: bool = False
    fallback_used: bool = False
    cluster: Optional[DetectionCluster] = None
    reason: Optional[str] = None

    @classmethod
    def skipped(cls, reason: str) -> "RobustTriangulation":
        return cls(reason=reason)


def dlt_weights(per_view: Dict[int, float], n_views: int) -> np.ndarray:
    """Per-view weights rescaled so the largest is 1, floored, zero for absent views."""
    weights = np.zeros(n_views)
    top = max(per_view.values())
    for c, w in per_view.items():
        weights[c] = max(w / top, DLT_WEIGHT_FLOOR)
    return weights


def robust_triangulate(rig: CameraRig,
                       points: np.ndarray,
                       valid: Optional[np.ndarray] = None,
                       config: Optional[RobustConfig] = None) -> RobustTriangulation:
    """Triangulate one joint with agreement weights and WSS rejection.

    Args:
        rig: Camera rig
        points: (n_views, 2) detections in pixels
        valid: (n_views,) validity flags
        config: Robust pipeline parameters

    Returns:
        The robust triangulation of the joint

    Raises:
        InsufficientViews: Fewer than two valid views
    """
    config = config or RobustConfig()
    points = np.asarray(points, dtype=float)
    n_views = points.shape[0]
    if valid is None:
        valid = np.ones(n_views, dtype=bool)

    cluster = build_cluster(rig, points, valid)
    pairwise = pairwise_weights(cluster, config.sigma_mm)
    per_view = per_view_weights(pairwise, cluster.contributing_views)
    spread = wss(cluster)
    statistic = wss_statistic(spread, config.wss_compare)
    rejected = statistic > config.wss_threshold_mm
    fallback = rejected and config.use_wss

    if fallback:
        logger.debug(f"Joint rejected: WSS statistic {statistic:.3f} > {config.wss_threshold_mm}")
        weights = np.where(valid, config.fallback_weight, 0.0)
        point = solve_dlt(list(rig.cameras), list(points), weights).point
    elif config.target == "geomed":
        point = cluster.center.copy()
    else:
        point = solve_dlt(list(rig.cameras), list(points), dlt_weights(per_view, n_views)).point

    return RobustTriangulation(point=point,
                               per_view_weights=per_view,
                               pairwise_weights=pairwise,
                               wss_mm2=spread,
                               wss_mm=statistic,
                               rejected=rejected,
                               fallback_used=fallback,
                               cluster=cluster)


def robust_triangulate_pose(rig: CameraRig,
                            detections: MultiViewDetections,
                            config: Optional[RobustConfig] = None,
                            frame: Optional[int] = None) -> List[RobustTriangulation]:
    """Robustly triangulate every joint of one frame.

    Joints without two valid views are reported as skipped with reason
    `insufficient_views`; other geometric failures propagate, located by frame and joint.
    """
    results = []
    for j in range(detections.n_joints):
        try:
            results.append(robust_triangulate(rig, detections.points[:, j], detections.valid[:, j], config))
        except InsufficientViews:
            logger.warning(f"Joint {j} skipped: insufficient views")
            results.append(RobustTriangulation.skipped("insufficient_views"))
        except GeometryError as e:
            raise e.located(frame=frame, joint=j)
    return results
