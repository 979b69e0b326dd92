"""
RTV Errors

Exception hierarchy shared by every RTV module.
"""
from typing import Optional


class RTVError(Exception):
    """Base exception for RTV errors."""
    pass


class GeometryError(RTVError):
    """Numeric or geometric failure while projecting or triangulating."""

    def __init__(self, message: str, frame: Optional[int] = None, joint: Optional[int] = None):
        self.frame = frame
        self.joint = joint
        super().__init__(message)

    def located(self, frame: Optional[int] = None, joint: Optional[int] = None) -> "GeometryError":
        """Attach frame/joint coordinates and return self."""
        if frame is not None:
            self.frame = frame
        if joint is not None:
            self.joint = joint
        return self

    def __str__(self) -> str:
        message = super().__str__()
        where = []
        if self.frame is not None:
            where.append(f"frame={self.frame}")
        if self.joint is not None:
            where.append(f"joint={self.joint}")
        if where:
            return f"{message} ({', '.join(where)})"
        return message


class NonPositiveDepth(GeometryError):
    """Point lies behind or on the camera plane."""
    pass


class InsufficientViews(GeometryError):
    """Fewer than two usable observations."""
    pass


class DegenerateGeometry(GeometryError):
    """Rays are near-parallel or camera centres coincide."""
    pass


class EmptyBBox(GeometryError):
    """Bounding box with zero or negative extent."""
    pass


class GradientDegenerate(GeometryError):
    """Two smallest singular values of the DLT system are too close."""
    pass


class MetricError(RTVError):
    """Invalid input to a pose metric."""
    pass


class JointCountMismatch(MetricError):
    """Prediction and ground truth disagree on joint count or frame."""
    pass


class DegeneratePose(MetricError):
    """Pose too degenerate for the requested alignment."""
    pass


class ConfigInvalid(RTVError):
    """Invalid configuration value."""
    pass


class SceneFileError(RTVError):
    """Scene file could not be parsed."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
