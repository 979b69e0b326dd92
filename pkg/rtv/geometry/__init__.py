"""
RTV Geometry - pinhole cameras, projection and DLT triangulation
"""

from .bbox import bbox_of, denormalize_from_bbox, normalize_to_bbox
from .camera import project, project_points, reprojection_errors, to_camera_frame
from .triangulation import (
    solve_dlt,
    triangulate_dlt,
    triangulate_midpoint,
    triangulate_nonlinear,
    triangulate_pair,
)

__all__ = [
    "bbox_of",
    "denormalize_from_bbox",
    "normalize_to_bbox",
    "project",
    "project_points",
    "reprojection_errors",
    "to_camera_frame",
    "solve_dlt",
    "triangulate_dlt",
    "triangulate_midpoint",
    "triangulate_nonlinear",
    "triangulate_pair",
]
