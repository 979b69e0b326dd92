"""
RTV Agreement Weights

Gaussian pairwise weights, per-view median weights and the within-cluster spread.
"""
from typing import Dict, Iterable

import numpy as np

from rtv.core.errors import InsufficientViews
from rtv.robust.cluster import DetectionCluster, ViewPair

# keeps weights strictly positive when exp(-d^2/sigma^2) underflows
WEIGHT_FLOOR = np.finfo(float).tiny


def pairwise_weights(cluster: DetectionCluster, sigma_mm: float) -> Dict[ViewPair, float]:
    """w = exp(-d^2 / sigma^2) with d the candidate-to-centre distance in millimetres."""
    if sigma_mm <= 0:
        raise ValueError("sigma_mm must be positive")
    if not cluster.candidates:
        raise ValueError("empty cluster")
    return {pair: max(float(np.exp(-(d / sigma_mm) ** 2)), WEIGHT_FLOOR)
            for pair, d in cluster.distances_mm().items()}


def per_view_weights(pairwise: Dict[ViewPair, float], views: Iterable[int]) -> Dict[int, float]:
    """Median of the pairwise weights linking each view to the others.

    Even-sized sets take the mean of the two central values.
    """
    result = {}
    for c in views:
        linked = [w for pair, w in pairwise.items() if c in pair]
        if not linked:
            raise InsufficientViews(f"view {c} takes part in no candidate pair")
        result[c] = float(np.median(linked))
    return result


def wss(cluster: DetectionCluster) -> float:
    """Mean squared candidate-to-centre distance, in square millimetres."""
    d = np.array(list(cluster.distances_mm().values()))
    return float(np.mean(d ** 2))


def wss_statistic(wss_mm2: float, compare: str = "rms") -> float:
    """Quantity compared against the rejection threshold.

    `rms` takes the square root so the threshold stays a length in millimetres;
    `squared` compares the mean squared distance directly.
    """
    if compare == "rms":
        return float(np.sqrt(wss_mm2))
    if compare == "squared":
        return float(wss_mm2)
    raise ValueError(f"Unknown wss comparison: {compare}")
