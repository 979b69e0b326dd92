"""
RTV Losses - triangulation loss, its gradient decomposition and detection descent
"""

from .descent import DescentStep, descend_detections
from .svd_grad import dlt_point_jacobian
from .tri_loss import TriLossResult, finite_difference_grad, joint_tri_loss, tri_loss, tri_loss_grad

__all__ = [
    "DescentStep",
    "descend_detections",
    "dlt_point_jacobian",
    "TriLossResult",
    "finite_difference_grad",
    "joint_tri_loss",
    "tri_loss",
    "tri_loss_grad",
]
