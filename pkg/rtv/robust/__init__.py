"""
RTV Robust - detection clusters, agreement weights and WSS joint selection
"""

from .cluster import DetectionCluster, build_cluster
from .median import geometric_median
from .triangulate import RobustTriangulation, robust_triangulate, robust_triangulate_pose
from .weights import pairwise_weights, per_view_weights, wss, wss_statistic

__all__ = [
    "DetectionCluster",
    "build_cluster",
    "geometric_median",
    "RobustTriangulation",
    "robust_triangulate",
    "robust_triangulate_pose",
    "pairwise_weights",
    "per_view_weights",
    "wss",
    "wss_statistic",
]
