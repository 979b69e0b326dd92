"""
RTV Commands

Implementations of the `triangulate`, `sim-robustness` and `sim-stability` subcommands.
Each command returns a process exit code.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from rtv.cli.results import STDOUT, write_rows
from rtv.cli.scene_file import SCENE_FILE_VERSION, SceneFile, read_scene_file
from rtv.core.config import Config
from rtv.core.errors import ConfigInvalid, GeometryError, InsufficientViews
from rtv.core.types import CameraRig, MultiViewDetections, RobustConfig
from rtv.geometry.triangulation import triangulate_dlt
from rtv.robust.triangulate import robust_triangulate_pose
from rtv.sim.experiments import (
    RobustnessRow,
    RobustnessSweepConfig,
    StabilityConfig,
    StabilityRow,
    run_robustness_sweep,
    run_stability_study,
    summarize_rows,
)
from rtv.sim.scene import SceneConfig

logger = logging.getLogger(__name__)

M = TypeVar('M', bound=BaseModel)


def build_model(model_type: Type[M], values: Dict[str, Any], section: str) -> M:
    """Typed config from a config section.

    Raises:
        ConfigInvalid: Naming the section and field that failed validation
    """
    try:
        return model_type(**values)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        raise ConfigInvalid(f"{section}.{field}: {first['msg']}") from e


def _load_config(args: argparse.Namespace) -> Config:
    config = Config(getattr(args, "config", None))
    if getattr(args, "threads", None) is not None:
        config.set("runtime.threads", args.threads)
    return config


def _overlay(values: Dict[str, Any], args: argparse.Namespace, mapping: Dict[str, str]) -> Dict[str, Any]:
    for arg_name, key in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            values[key] = value
    return values


def _write_text(text: str, out: Optional[str]) -> None:
    if out in (None, STDOUT):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, 'w', encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info(f"Wrote {out}")


# triangulate

def _robust_frame(rig: CameraRig, detections: MultiViewDetections, config: RobustConfig,
                  frame: int) -> List[Dict[str, Any]]:
    joints = []
    for j, result in enumerate(robust_triangulate_pose(rig, detections, config, frame=frame)):
        joints.append({
            "joint": j,
            "point": None if result.point is None else [float(x) for x in result.point],
            "weights": {str(c): float(w) for c, w in sorted(result.per_view_weights.items())} or None,
            "rejected": bool(result.rejected),
            "wss_mm": None if result.reason else float(result.wss_mm),
            "reason": result.reason,
        })
    return joints


def _standard_frame(rig: CameraRig, detections: MultiViewDetections, frame: int) -> List[Dict[str, Any]]:
    joints = []
    for j in range(detections.n_joints):
        entry: Dict[str, Any] = {"joint": j, "point": None, "weights": None, "rejected": False,
                                 "wss_mm": None, "reason": None}
        observations = detections.joint_observations(j)
        try:
            point = triangulate_dlt(rig, observations)
        except InsufficientViews:
            logger.warning(f"Frame {frame} joint {j} skipped: insufficient views")
            entry["reason"] = "insufficient_views"
        except GeometryError as e:
            raise e.located(frame=frame, joint=j)
        else:
            entry["point"] = [float(x) for x in point]
            entry["weights"] = {str(c): 1.0 for c, _ in observations}
        joints.append(entry)
    return joints


def triangulate_scene(scene: SceneFile, robust: bool = True,
                      config: Optional[RobustConfig] = None) -> Dict[str, Any]:
    """Triangulate every frame of a scene file into the JSON result document.

    Raises:
        GeometryError: Located by frame and joint
    """
    rig = scene.rig()
    frames = []
    for f in range(scene.n_frames):
        detections = scene.frame_detections(f)
        if robust:
            joints = _robust_frame(rig, detections, config or RobustConfig(), f)
        else:
            joints = _standard_frame(rig, detections, f)
        if scene.joints is not None:
            for entry in joints:
                entry["name"] = scene.joint_name(entry["joint"])
        frames.append({"frame": f, "joints": joints})
    return {"version": SCENE_FILE_VERSION, "method": "robust" if robust else "standard", "frames": frames}


def cmd_triangulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scene = read_scene_file(args.scene_file)
    values = _overlay(config.section("robust"), args, {
        "sigma_mm": "sigma_mm",
        "wss_mm": "wss_threshold_mm",
        "wss_compare": "wss_compare",
        "target": "target",
    })
    robust_config = build_model(RobustConfig, values, "robust")
    logger.info(f"Triangulating {scene.n_frames} frame(s) of {scene.n_joints} joint(s) "
                f"with the {'robust' if args.robust else 'standard'} method")
    document = triangulate_scene(scene, robust=args.robust, config=robust_config)
    _write_text(json.dumps(document, indent=2) + "\n", args.out)
    return 0


# sim-robustness

def cmd_sim_robustness(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scene_values = _overlay(config.section("scene"), args, {"n_points": "n_points", "n_cameras": "n_cameras"})
    scene_values["seed"] = args.seed
    scene_config = build_model(SceneConfig, scene_values, "scene")
    sweep_values = _overlay(config.section("robustness"), args, {
        "noise_levels": "noise_levels",
        "noisy_views": "noisy_view_counts",
        "methods": "methods",
        "trials": "trials",
    })
    sweep = build_model(RobustnessSweepConfig, sweep_values, "robustness")
    robust_config = build_model(RobustConfig, config.section("robust"), "robust")

    rows = run_robustness_sweep(scene_config, sweep, robust_config, seed=args.seed, n_jobs=config.threads())
    write_rows(rows, RobustnessRow, args.out)
    for (method, noise, count), value in sorted(summarize_rows(rows).items()):
        logger.info(f"{method:>15s}  noise={noise:5.1f}px  noisy_views={count}  mean MPJPE={value:9.3f} mm")
    return 0


# sim-stability

def cmd_sim_stability(args: argparse.Namespace) -> int:
    config = _load_config(args)
    stability_values = _overlay(config.section("stability"), args, {
        "alphas": "alphas",
        "steps": "n_steps",
        "step_size": "step_size",
        "trials": "trials",
    })
    scene_values = config.section("scene")
    scene_values["n_cameras"] = stability_values.pop("n_cameras", 3)
    scene_values["n_points"] = stability_values.pop("n_points", scene_values.get("n_points"))
    scene_values["seed"] = args.seed
    scene_config = build_model(SceneConfig, scene_values, "scene")
    stability = build_model(StabilityConfig, stability_values, "stability")

    rows = run_stability_study(scene_config, stability, seed=args.seed, n_jobs=config.threads())
    write_rows(rows, StabilityRow, args.out)
    last = stability.n_steps - 1
    for alpha in stability.alphas:
        final = [r.mpjpe_mm for r in rows if r.alpha == alpha and r.step == last]
        logger.info(f"alpha={alpha:4.2f}  final mean MPJPE={float(np.nanmean(final)):9.3f} mm")
    return 0
