"""
RTV Detection Cluster

Pairwise-triangulated 3D candidates of one joint and their geometric median.
"""
import itertools
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import Field

from rtv.core.errors import DegenerateGeometry, InsufficientViews
from rtv.core.types import CameraRig, FrozenModel
from rtv.geometry.triangulation import triangulate_pair
from rtv.robust.median import geometric_median

logger = logging.getLogger(__name__)

ViewPair = Tuple[int, int]


class DetectionCluster(FrozenModel):
    """Candidates keyed by view pair (c, c') with c < c', and their centre."""
    candidates: Dict[ViewPair, np.ndarray]
    center: np.ndarray
    contributing_views: Tuple[int, ...]
    degenerate_pairs: List[ViewPair] = Field(default_factory=list)

    @property
    def pairs(self) -> List[ViewPair]:
        return sorted(self.candidates)

    def candidate_array(self) -> np.ndarray:
        """(|T|, 3) candidates in `pairs` order."""
        return np.array([self.candidates[p] for p in self.pairs])

    def distances_mm(self) -> Dict[ViewPair, float]:
        """Distance of each candidate to the centre, in millimetres."""
        return {p: 1000.0 * float(np.linalg.norm(y - self.center)) for p, y in self.candidates.items()}


def build_cluster(rig: CameraRig,
                  points: np.ndarray,
                  valid: Optional[np.ndarray] = None) -> DetectionCluster:
    """Triangulate every pair of valid views of one joint.

    Args:
        rig: Camera rig
        points: (n_views, 2) detections of the joint, pixels
        valid: (n_views,) validity flags, all valid when omitted

    Returns:
        The detection cluster; degenerate pairs are recorded and skipped

    Raises:
        InsufficientViews: Fewer than two valid views, or every pair degenerate
    """
    points = np.asarray(points, dtype=float)
    if valid is None:
        valid = np.ones(points.shape[0], dtype=bool)
    views = [int(c) for c in np.flatnonzero(valid)]
    if len(views) < 2:
        raise InsufficientViews(f"{len(views)} valid view(s), need 2")

    candidates: Dict[ViewPair, np.ndarray] = {}
    degenerate: List[ViewPair] = []
    for a, b in itertools.combinations(views, 2):
        try:
            candidates[(a, b)] = triangulate_pair(rig[a], rig[b], points[a], points[b])
        except DegenerateGeometry as e:
            logger.debug(f"Skipping degenerate view pair ({a}, {b}): {e}")
            degenerate.append((a, b))
    if not candidates:
        raise InsufficientViews("every view pair is degenerate")

    contributing = tuple(sorted({c for pair in candidates for c in pair}))
    center = geometric_median(np.array([candidates[p] for p in sorted(candidates)]))
    return DetectionCluster(candidates=candidates,
                            center=center,
                            contributing_views=contributing,
                            degenerate_pairs=degenerate)
