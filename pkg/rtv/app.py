"""
RTV Application

Main command-line entry point.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from rtv import __version__
from rtv.cli.commands import cmd_sim_robustness, cmd_sim_stability, cmd_triangulate
from rtv.core.errors import ConfigInvalid, GeometryError, MetricError, SceneFileError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GEOMETRY = 3


def setup_logging(level: int = logging.INFO):
    """Set up logging configuration; stdout stays free for results."""
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True
    )


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _names(text: str) -> List[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtv", description="Robust multi-view triangulation and its simulations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file merged over the defaults")
    common.add_argument("--threads", type=int, help="Worker count (default: RTV_THREADS or all cores)")
    common.add_argument("--out", default="-", help="Output path, '-' for standard output")

    sub = parser.add_subparsers(dest="command", required=True)

    tri = sub.add_parser("triangulate", parents=[common], help="Triangulate the detections of a scene file")
    tri.add_argument("scene_file", help="Scene JSON file")
    method = tri.add_mutually_exclusive_group()
    method.add_argument("--robust", dest="robust", action="store_true", default=True,
                        help="Agreement-weighted DLT with WSS rejection (default)")
    method.add_argument("--standard", dest="robust", action="store_false", help="Plain DLT over the valid views")
    tri.add_argument("--sigma-mm", dest="sigma_mm", type=float, help="Gaussian agreement scale")
    tri.add_argument("--wss-mm", dest="wss_mm", type=float, help="WSS rejection threshold")
    tri.add_argument("--wss-compare", dest="wss_compare", choices=["rms", "squared"])
    tri.add_argument("--target", choices=["wdlt", "geomed"], help="Output weighted DLT or the cluster median")
    tri.set_defaults(func=cmd_triangulate)

    rob = sub.add_parser("sim-robustness", parents=[common], help="Triangulation error under growing 2D noise")
    rob.add_argument("--seed", type=int, default=0)
    rob.add_argument("--methods", type=_names, help="Comma-separated subset of standard,weights_no_wss,weights_wss")
    rob.add_argument("--noise-levels", dest="noise_levels", type=_floats, help="Comma-separated noise radii in px")
    rob.add_argument("--noisy-views", dest="noisy_views", type=_ints, help="Comma-separated noisy-view counts")
    rob.add_argument("--trials", type=int)
    rob.add_argument("--n-points", dest="n_points", type=int)
    rob.add_argument("--n-cameras", dest="n_cameras", type=int)
    rob.set_defaults(func=cmd_sim_robustness)

    stab = sub.add_parser("sim-stability", parents=[common], help="Detection descent for several gradient balances")
    stab.add_argument("--seed", type=int, default=0)
    stab.add_argument("--alphas", type=_floats, help="Comma-separated alphas in [0, 1]")
    stab.add_argument("--steps", type=int)
    stab.add_argument("--step-size", dest="step_size", type=float)
    stab.add_argument("--trials", type=int)
    stab.set_defaults(func=cmd_sim_stability)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)

    try:
        return args.func(args)
    except (SceneFileError, ConfigInvalid) as e:
        logger.error(str(e))
        return EXIT_INPUT
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except (GeometryError, MetricError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
