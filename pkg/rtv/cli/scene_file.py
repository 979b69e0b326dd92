"""
RTV Scene Files

Versioned JSON scene format: cameras, an optional skeleton and per-frame detections.
Files are validated against a JSON schema before they are parsed, and are written in a
canonical form so that write -> read -> write is byte-identical.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match
from pydantic import BaseModel, ConfigDict, ValidationError

from rtv.core.errors import SceneFileError
from rtv.core.types import Camera, CameraRig, MultiViewDetections

logger = logging.getLogger(__name__)

SCENE_FILE_VERSION = "1"

_NUMBER_LIST = {"type": "array", "items": {"type": "number"}}

SCENE_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["version", "cameras"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string", "enum": [SCENE_FILE_VERSION]},
        "cameras": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["K", "R", "t", "width", "height"],
                "additionalProperties": False,
                "properties": {
                    "K": {**_NUMBER_LIST, "minItems": 9, "maxItems": 9},
                    "R": {**_NUMBER_LIST, "minItems": 9, "maxItems": 9},
                    "t": {**_NUMBER_LIST, "minItems": 3, "maxItems": 3},
                    "width": {"type": "integer", "minimum": 1},
                    "height": {"type": "integer", "minimum": 1},
                },
            },
        },
        "joints": {
            "type": "object",
            "required": ["names"],
            "additionalProperties": False,
            "properties": {
                "names": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                "root_index": {"type": "integer", "minimum": 0},
            },
        },
        "detections": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "patternProperties": {
                    "^(0|[1-9][0-9]*)$": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["joint", "u", "v", "valid"],
                            "additionalProperties": False,
                            "properties": {
                                "joint": {"type": "integer", "minimum": 0},
                                "u": {"type": "number"},
                                "v": {"type": "number"},
                                "valid": {"type": "boolean"},
                            },
                        },
                    },
                },
            },
        },
    },
}

_VALIDATOR = Draft7Validator(SCENE_SCHEMA)


class CameraEntry(BaseModel):
    """One camera: K and R row-major, translation t, image size."""
    model_config = ConfigDict(frozen=True)

    K: List[float]
    R: List[float]
    t: List[float]
    width: int
    height: int

    def to_camera(self) -> Camera:
        return Camera(intrinsics=np.reshape(self.K, (3, 3)),
                      rotation=np.reshape(self.R, (3, 3)),
                      translation=self.t,
                      image_size=(self.width, self.height))

    @classmethod
    def from_camera(cls, camera: Camera) -> "CameraEntry":
        return cls(K=[float(x) for x in camera.intrinsics.ravel()],
                   R=[float(x) for x in camera.rotation.ravel()],
                   t=[float(x) for x in camera.translation],
                   width=int(camera.image_size[0]),
                   height=int(camera.image_size[1]))


class JointsEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    names: List[str]
    root_index: int = 0


class DetectionEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    joint: int
    u: float
    v: float
    valid: bool


class SceneFile(BaseModel):
    """Parsed scene file."""
    model_config = ConfigDict(frozen=True)

    version: Literal["1"] = SCENE_FILE_VERSION
    cameras: List[CameraEntry]
    joints: Optional[JointsEntry] = None
    detections: List[Dict[int, List[DetectionEntry]]] = []

    @property
    def n_frames(self) -> int:
        return len(self.detections)

    @property
    def n_joints(self) -> int:
        if self.joints is not None:
            return len(self.joints.names)
        indices = [d.joint for frame in self.detections for entries in frame.values() for d in entries]
        return max(indices) + 1 if indices else 0

    def joint_name(self, joint: int) -> Optional[str]:
        return self.joints.names[joint] if self.joints is not None else None

    def rig(self) -> CameraRig:
        """Build the camera rig.

        Raises:
            SceneFileError: If a camera or the rig fails validation
        """
        cameras = []
        for i, entry in enumerate(self.cameras):
            try:
                cameras.append(entry.to_camera())
            except ValidationError as e:
                raise SceneFileError(f"cameras.{i}", _first_message(e)) from e
        try:
            return CameraRig(cameras=cameras)
        except ValidationError as e:
            raise SceneFileError("cameras", _first_message(e)) from e

    def frame_detections(self, frame: int) -> MultiViewDetections:
        """Pixel detections of one frame; joints missing from a view are invalid there."""
        n_views, n_joints = len(self.cameras), self.n_joints
        points = np.zeros((n_views, n_joints, 2))
        valid = np.zeros((n_views, n_joints), dtype=bool)
        for view, entries in self.detections[frame].items():
            for d in entries:
                points[view, d.joint] = (d.u, d.v)
                valid[view, d.joint] = d.valid
        return MultiViewDetections(points=points, valid=valid)

    def check(self) -> "SceneFile":
        """Cross-field checks the schema cannot express.

        Raises:
            SceneFileError: Naming the offending field
        """
        n_views, n_joints = len(self.cameras), self.n_joints
        if self.joints is not None and not 0 <= self.joints.root_index < n_joints:
            raise SceneFileError("joints.root_index", f"{self.joints.root_index} out of range for {n_joints} joints")
        for f, frame in enumerate(self.detections):
            for view, entries in frame.items():
                if view >= n_views:
                    raise SceneFileError(f"detections.{f}.{view}", f"view index must be < {n_views}")
                seen = set()
                for k, d in enumerate(entries):
                    if d.joint >= n_joints:
                        raise SceneFileError(f"detections.{f}.{view}.{k}.joint",
                                             f"joint index must be < {n_joints}")
                    if not (np.isfinite(d.u) and np.isfinite(d.v)):
                        raise SceneFileError(f"detections.{f}.{view}.{k}", "u and v must be finite")
                    if d.joint in seen:
                        raise SceneFileError(f"detections.{f}.{view}.{k}.joint", f"duplicate joint {d.joint}")
                    seen.add(d.joint)
        return self

    def to_json(self) -> Dict[str, Any]:
        """Canonical JSON document."""
        document: Dict[str, Any] = {
            "version": self.version,
            "cameras": [c.model_dump() for c in self.cameras],
            "detections": [
                {str(view): [d.model_dump() for d in sorted(entries, key=lambda d: d.joint)]
                 for view, entries in sorted(frame.items())}
                for frame in self.detections
            ],
        }
        if self.joints is not None:
            document["joints"] = self.joints.model_dump()
        return document

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_arrays(cls,
                    rig: CameraRig,
                    frames: Sequence[MultiViewDetections],
                    joint_names: Optional[Sequence[str]] = None,
                    root_index: int = 0) -> "SceneFile":
        """Scene file from a rig and pixel detections (invalid entries are written with valid=false)."""
        detections = []
        for frame in frames:
            detections.append({
                c: [DetectionEntry(joint=j, u=float(frame.points[c, j, 0]), v=float(frame.points[c, j, 1]),
                                   valid=bool(frame.valid[c, j]))
                    for j in range(frame.n_joints)]
                for c in range(frame.n_views)
            })
        joints = JointsEntry(names=list(joint_names), root_index=root_index) if joint_names is not None else None
        return cls(cameras=[CameraEntry.from_camera(c) for c in rig.cameras], joints=joints, detections=detections)


def _first_message(error: ValidationError) -> str:
    first = error.errors()[0]
    return first.get("msg", str(error))


def _error_field(error) -> str:
    path = [str(p) for p in error.absolute_path]
    if error.validator == "required":
        missing = [k for k in error.validator_value if k not in error.instance]
        path.extend(missing[:1])
    return ".".join(path) or "<root>"


def parse_scene(data: Any) -> SceneFile:
    """Validate and parse a decoded scene document.

    Raises:
        SceneFileError: Naming the offending field
    """
    error = best_match(_VALIDATOR.iter_errors(data))
    if error is not None:
        raise SceneFileError(_error_field(error), error.message)
    try:
        scene = SceneFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SceneFileError(".".join(str(p) for p in first["loc"]), first["msg"]) from e
    return scene.check()


def read_scene_file(path: Union[str, Path]) -> SceneFile:
    """Read and validate a scene file.

    Raises:
        SceneFileError: If the file cannot be read, is not JSON or fails validation
    """
    try:
        with open(path, 'r', encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SceneFileError("<root>", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise SceneFileError("<file>", str(e)) from e
    scene = parse_scene(data)
    logger.debug(f"Read scene file {path}: {len(scene.cameras)} cameras, {scene.n_frames} frames")
    return scene


def write_scene_file(scene: SceneFile, path: Union[str, Path]) -> None:
    with open(path, 'w', encoding="utf-8", newline="\n") as f:
        f.write(scene.dumps())
