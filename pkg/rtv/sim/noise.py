"""
RTV Noise Models

On-circle and isotropic Gaussian 2D noise applied to a subset of views.
"""
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class NoiseSpec(BaseModel):
    """Noise kind, magnitude (circle radius or Gaussian sigma) and affected views.

    Either list the affected views explicitly or give a count to draw at random.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["circle", "gaussian"] = "circle"
    magnitude_px: float = Field(0.0, ge=0, allow_inf_nan=False)
    affected_views: Optional[Tuple[int, ...]] = None
    n_affected: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "NoiseSpec":
        if self.affected_views is not None and self.n_affected is not None:
            raise ValueError("give affected_views or n_affected, not both")
        if self.affected_views is not None and any(c < 0 for c in self.affected_views):
            raise ValueError("view indices must be non-negative")
        return self

    def choose_views(self, n_views: int, rng: np.random.Generator) -> List[int]:
        if self.affected_views is not None:
            if any(c >= n_views for c in self.affected_views):
                raise ValueError(f"affected view index out of range for {n_views} cameras")
            return sorted(self.affected_views)
        count = n_views if self.n_affected is None else self.n_affected
        if count > n_views:
            raise ValueError(f"cannot corrupt {count} of {n_views} views")
        return sorted(int(c) for c in rng.choice(n_views, size=count, replace=False))


def apply_noise(points2d: np.ndarray,
                spec: NoiseSpec,
                rng: np.random.Generator) -> Tuple[np.ndarray, List[int]]:
    """Perturb the observations of the affected views.

    Args:
        points2d: (n_views, n_points, 2) pixel observations
        spec: Noise specification
        rng: Random generator

    Returns:
        (noisy copy, affected view indices)
    """
    noisy = np.array(points2d, dtype=float)
    views = spec.choose_views(noisy.shape[0], rng)
    shape = (len(views), noisy.shape[1])
    if spec.kind == "circle":
        angle = rng.uniform(0.0, 2.0 * np.pi, size=shape)
        offset = spec.magnitude_px * np.stack([np.cos(angle), np.sin(angle)], axis=-1)
    else:
        offset = rng.normal(0.0, spec.magnitude_px, size=shape + (2,))
    noisy[views] += offset
    return noisy, views
