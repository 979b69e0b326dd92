"""
RTV CLI - scene files, result files and subcommands
"""

from .results import write_rows
from .scene_file import SceneFile, parse_scene, read_scene_file, write_scene_file

__all__ = [
    "SceneFile",
    "parse_scene",
    "read_scene_file",
    "write_rows",
    "write_scene_file",
]
