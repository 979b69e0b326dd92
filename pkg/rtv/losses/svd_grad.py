"""
RTV SVD Gradient

Derivative of the DLT point with respect to the pixel observations, through the
smallest right singular vector of the system matrix.
"""
import numpy as np

from rtv.core.errors import GradientDegenerate
from rtv.geometry.triangulation import DLTSolution

MIN_SINGULAR_GAP = 1e-9


def dlt_point_jacobian(solution: DLTSolution, min_gap: float = MIN_SINGULAR_GAP) -> np.ndarray:
    """Jacobian of the triangulated point with respect to the observations.

    Uses first-order eigenvector perturbation of M = A^T A:
    dv = -sum_k v_k (v_k^T dM v) / (s_k^2 - s_min^2) over the other singular directions.

    Args:
        solution: Solved DLT system
        min_gap: Smallest admissible gap between the two smallest singular values

    Returns:
        (3, 2N) matrix, columns ordered (u_0, v_0, u_1, v_1, ...) over the observations
        that contributed rows

    Raises:
        GradientDegenerate: If the two smallest singular values are closer than `min_gap`
    """
    S = solution.singular_values
    if S[-2] - S[-1] < min_gap:
        raise GradientDegenerate(f"singular gap {S[-2] - S[-1]:.3g} below {min_gap:g}")

    A = solution.A
    Vt = solution.Vt
    v = Vt[-1]
    residual = A @ v

    # derivative of each row of A with respect to its own image coordinate
    G = np.repeat([w * s * P[2] for w, s, P in zip(solution.weights, solution.scales, solution.P)], 2, axis=0)
    dMv = G * residual[:, None] + A * (G @ v)[:, None]

    others = Vt[:-1]
    gaps = S[:-1] ** 2 - S[-1] ** 2
    dv = -((dMv @ others.T) / gaps) @ others

    X = v[:3] / v[3]
    dX = (dv[:, :3] - np.outer(dv[:, 3], X)) / v[3]
    return dX.T
