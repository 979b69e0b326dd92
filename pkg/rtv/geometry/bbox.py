"""
RTV Bounding Boxes

Affine normalization of image points to [-1, 1] with respect to a subject bounding box.
"""
from typing import Tuple

import numpy as np

from rtv.core.errors import EmptyBBox

BBox = Tuple[np.ndarray, np.ndarray]


def _center_half_extent(bbox: BBox) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(bbox[0], dtype=float)
    hi = np.asarray(bbox[1], dtype=float)
    half = 0.5 * (hi - lo)
    if np.any(half <= 0):
        raise EmptyBBox(f"bounding box {lo.tolist()} -> {hi.tolist()} has no positive extent")
    return 0.5 * (hi + lo), half


def normalize_to_bbox(points: np.ndarray, bbox: BBox) -> np.ndarray:
    """Map pixels so that the bbox corners land on (-1, -1) and (1, 1)."""
    center, half = _center_half_extent(bbox)
    return (np.asarray(points, dtype=float) - center) / half


def denormalize_from_bbox(points: np.ndarray, bbox: BBox) -> np.ndarray:
    """Inverse of `normalize_to_bbox`."""
    center, half = _center_half_extent(bbox)
    return np.asarray(points, dtype=float) * half + center


def bbox_of(points: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Axis-aligned (2, 2) box [min; max] around (N, 2) points, padded by `margin` pixels."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.vstack([points.min(axis=0) - margin, points.max(axis=0) + margin])
