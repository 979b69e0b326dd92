"""
RTV Geometric Median

Weiszfeld iteration with the Vardi-Zhang correction at input points.
"""
import logging
from typing import Optional

import numpy as np
from scipy.spatial import distance

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
STEP_TOL_M = 1e-9
COINCIDENT_TOL = 1e-12


def median_objective(y: np.ndarray, points: np.ndarray) -> float:
    """Sum of Euclidean distances from `y` to every point."""
    return float(distance.cdist(points, y[None, :]).sum())


def optimal_input_point(points: np.ndarray) -> Optional[np.ndarray]:
    """Input point satisfying the median optimality condition, if any.

    A point carrying mass m is the median when the summed unit vectors towards
    the other points have norm at most m.
    """
    D = distance.cdist(points, points)
    for k in range(points.shape[0]):
        same = D[k] < COINCIDENT_TOL
        if same.all():
            return points[k].copy()
        pull = ((points[~same] - points[k]) / D[k, ~same][:, None]).sum(axis=0)
        if np.linalg.norm(pull) <= same.sum():
            return points[k].copy()
    return None


def geometric_median(points: np.ndarray,
                     max_iterations: int = MAX_ITERATIONS,
                     tol: float = STEP_TOL_M) -> np.ndarray:
    """Point minimising the summed Euclidean distance to `points`.

    Args:
        points: (N, D) array, N >= 1
        max_iterations: Iteration cap
        tol: Stop once an update moves less than this

    Returns:
        The geometric median, shape (D,)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("geometric median of an empty set")
    if points.shape[0] == 1:
        return points[0].copy()
    vertex = optimal_input_point(points)
    if vertex is not None:
        logger.debug("Geometric median is an input point")
        return vertex

    y = np.median(points, axis=0)
    objective = median_objective(y, points)
    for iteration in range(max_iterations):
        D = distance.cdist(points, y[None, :])[:, 0]
        coincident = D < COINCIDENT_TOL
        n_coincident = int(coincident.sum())
        inv = 1.0 / D[~coincident]

        if n_coincident == 0:
            y_next = (points * inv[:, None]).sum(axis=0) / inv.sum()
        else:
            # subgradient test: y is optimal when the pull of the other points
            # does not exceed the mass sitting on y
            R = ((points[~coincident] - y) * inv[:, None]).sum(axis=0)
            r = np.linalg.norm(R)
            if r <= n_coincident:
                logger.debug(f"Geometric median settled on an input point after {iteration} iterations")
                return y
            T = (points[~coincident] * inv[:, None]).sum(axis=0) / inv.sum()
            gamma = n_coincident / r
            y_next = (1.0 - gamma) * T + gamma * y

        next_objective = median_objective(y_next, points)
        assert next_objective <= objective + 1e-9 * (1.0 + objective), "Weiszfeld objective increased"
        step = np.linalg.norm(y_next - y)
        y, objective = y_next, next_objective
        if step < tol:
            logger.debug(f"Geometric median converged after {iteration + 1} iterations")
            break
    return y
