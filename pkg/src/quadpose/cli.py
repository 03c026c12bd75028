"""Command-line interface: JSON in, JSON out.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 geometric
degeneracy (parallel rays, collinear corners, points on the horizon).
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import camera as cam
from .errors import GeometryError, InfeasibleConfigError, InputValidationError
from .focal import estimate_focal, estimate_focal_from_quad, intersect_lines, self_calibrated_focal, vanishing_point
from .linalg import CORNER_NAMES, Quad2, Quad3
from .oracle import CSV_HEADER, RoundTripReport, SceneConfig, run_batch
from .pose import pose_from_incidents
from .reconstruct import MarkerSpec, SCALE_MODES, reconstruct
from .rectify import (
    DIRECTIONS,
    aspect_correction_factor,
    normalize_to_unit,
    rectification_matrix,
    rectify_point,
)

log = logging.getLogger("quadpose")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_GEOMETRY = 0, 1, 2, 3


@dataclass(frozen=True)
class ImageFrame:
    width_px: int
    height_px: int

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise InputValidationError("image frame dimensions must be at least 1 pixel")

    @classmethod
    def parse(cls, text: str) -> ImageFrame:
        try:
            w, h = text.lower().split("x")
            return cls(int(w), int(h))
        except ValueError:
            raise InputValidationError(f"--pixels expects WxH, got {text!r}") from None


def center_coords(p_px, frame: ImageFrame) -> np.ndarray:
    """Pixel position (y down) to centered, y-up coordinates.

    The vertical extent maps to ``[-1, 1]`` and the horizontal to
    ``[-w/h, w/h]``, with the principal point at the image center.
    """
    w, h = frame.width_px, frame.height_px
    x = (2.0 * float(p_px[0]) / w - 1.0) * (w / h)
    y = -(2.0 * float(p_px[1]) / h - 1.0)
    return np.array((x, y))


def pixel_coords(p, frame: ImageFrame) -> np.ndarray:
    w, h = frame.width_px, frame.height_px
    return np.array(((float(p[0]) * h / w + 1.0) * w / 2.0, (1.0 - float(p[1])) * h / 2.0))


# --- input parsing -----------------------------------------------------------


def _read_json(source: str):
    try:
        text = sys.stdin.read() if source == "-" else Path(source).read_text()
    except OSError as exc:
        raise InputValidationError(f"cannot read {source}: {exc}") from exc
    return _loads(text, source)


def _loads(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputValidationError(f"invalid JSON in {what}: {exc}") from exc


def _point(value, what: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputValidationError(f"{what} must be a pair of numbers") from None
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise InputValidationError(f"{what} must be a pair of finite numbers")
    return arr


def _to_centered(p: np.ndarray, frame: ImageFrame | None) -> np.ndarray:
    return center_coords(p, frame) if frame is not None else p


def _quad(doc, frame: ImageFrame | None) -> Quad2:
    if not isinstance(doc, dict) or not isinstance(doc.get("quad"), dict):
        raise InputValidationError('input must be an object with a "quad" member')
    q = doc["quad"]
    missing = [k for k in CORNER_NAMES if k not in q]
    if missing:
        raise InputValidationError(f"quad is missing corners {missing}")
    return Quad2(np.array([_to_centered(_point(q[k], f"quad.{k}"), frame) for k in CORNER_NAMES]))


def parse_camera(doc) -> cam.CameraModel:
    if not isinstance(doc, dict):
        raise InputValidationError('"camera" must be an object')
    kind = doc.get("model")
    try:
        if kind == "rectilinear":
            return cam.Rectilinear(float(doc["aov_deg"]), doc.get("axis", "horizontal"), float(doc.get("aspect", 1.0)))
        if kind == "fisheye":
            return cam.EquidistantFisheye(float(doc["aov_deg"]), float(doc.get("aspect", 1.0)))
        if kind == "vmap":
            grid = cam.load_vector_map(doc["path"])
            aspect = doc.get("aspect")
            return cam.VectorMap(grid, None if aspect is None else float(aspect))
    except InputValidationError:
        raise
    except KeyError as exc:
        raise InputValidationError(f"camera is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise InputValidationError(f"bad camera parameter: {exc}") from None
    except OSError as exc:
        raise InputValidationError(f"cannot read vector map: {exc}") from None
    raise InputValidationError(f"unknown camera model {kind!r}")


def incidents_from_quad(q: Quad2, model: cam.CameraModel) -> Quad3:
    """Incident vectors of centered picture points under ``model``."""
    return Quad3(np.array([cam.incident(model, cam.texcoord_from_centered(p, model.aspect)) for p in q]))


def parse_marker(text: str) -> MarkerSpec:
    doc = _loads(text, "--marker")
    try:
        sides = [float(v) for v in doc["sides"]]
        if len(sides) != 4:
            raise InputValidationError("marker sides must list four lengths")
        aspect = float(doc.get("aspect", sides[0] / sides[1]))
    except InputValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputValidationError(f"bad marker: {exc}") from None
    return MarkerSpec(*sides, aspect)


def _pair_arg(text: str) -> np.ndarray:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise InputValidationError(f"expected x,y, got {text!r}") from None
    return _point((x, y), text)


def _floats(v) -> list[float]:
    # + 0.0 folds -0.0 into 0.0
    return [float(x) + 0.0 for x in v]


def _basis(m) -> dict:
    return {"x": _floats(m.x_axis), "y": _floats(m.y_axis), "z": _floats(m.z_axis)}


# --- subcommands -------------------------------------------------------------


def cmd_pose(args, frame):
    doc = _read_json(args.input)
    q = _quad(doc, frame)
    model = parse_camera(doc.get("camera"))
    pose = pose_from_incidents(incidents_from_quad(q, model))
    return {"pose": _basis(pose)}


def cmd_reconstruct(args, frame):
    doc = _read_json(args.input)
    q = _quad(doc, frame)
    model = parse_camera(doc.get("camera"))
    marker = parse_marker(args.marker)
    rec = reconstruct(incidents_from_quad(q, model), marker, args.reference, args.scale_by)
    return {
        "pose": _basis(rec.pose),
        "points": rec.points.as_dict(),
        "camera_position": _floats(rec.camera_in_marker),
        "scale": float(rec.scale_u),
    }


def cmd_rectify(args, frame):
    doc = _read_json(args.input)
    q = _quad(doc, frame)
    if args.focal == "auto":
        lift = self_calibrated_focal(q)
    else:
        try:
            lift = float(args.focal)
        except ValueError:
            raise InputValidationError(f"--focal expects a number or 'auto', got {args.focal!r}") from None
    m = rectification_matrix(q, lift)
    out = {}
    if args.marker_aspect is not None:
        k = aspect_correction_factor(m, q, args.marker_aspect, lift)
        m = m.with_aspect(k)
        out["aspect_factor"] = float(k)
    corners = np.array([rectify_point(p, m, focal=lift) for p in q])
    extra = []
    if args.points is not None:
        pts = _loads(args.points, "--points")
        if not isinstance(pts, list):
            raise InputValidationError("--points must be a JSON list of [x, y] pairs")
        for i, p in enumerate(pts):
            c = _to_centered(_point(p, f"points[{i}]"), frame)
            extra.append(rectify_point(c, m, args.direction, lift))
    if args.normalize:
        extra = [normalize_to_unit(p, corners) for p in extra]
        corners = np.array([normalize_to_unit(p, corners) for p in corners])
    fe = estimate_focal_from_quad(q)
    out.update(
        {
            "matrix": _basis(m),
            "corners": {k: _floats(p) for k, p in zip(CORNER_NAMES, corners)},
            "focal": {"focal": float(fe.focal), "consistent": bool(fe.consistent)},
            "lift": float(lift),
        }
    )
    if args.points is not None:
        out["points"] = [_floats(p) for p in extra]
    return out


def cmd_focal(args, frame):
    doc = _read_json(args.input)
    q = _quad(doc, frame)
    m = rectification_matrix(q)
    fe = estimate_focal(m)
    vx, vy = vanishing_point(m.x_axis), vanishing_point(m.y_axis)
    return {
        "focal": float(fe.focal),
        "consistent": bool(fe.consistent),
        "vanishing_x": list(vx.point) if vx.finite else None,
        "vanishing_y": list(vy.point) if vy.finite else None,
    }


def cmd_intersect(args, frame):
    a, b, c, d = (_to_centered(_pair_arg(v), frame) for v in (args.a, args.b, args.c, args.d))
    hit = intersect_lines(a, b, c, d)
    return {"parallel": True} if hit.parallel else {"point": list(hit.point)}


_CONFIG_KEYS = {
    "aov_deg": "aov_deg",
    "axis": "axis",
    "aspect": "camera_aspect",
    "tilt_deg": "tilt_deg",
    "roll_deg": "roll_deg",
    "yaw_deg": "yaw_deg",
    "pitch_deg": "pitch_deg",
    "distance": "distance",
    "marker_aspect": "marker_aspect",
    "corner_angle_deg": "corner_angle_deg",
    "center_range": "center_range",
}


def parse_scene_config(text: str) -> SceneConfig:
    doc = _loads(text, "--model")
    if not isinstance(doc, dict):
        raise InputValidationError("--model must be a JSON object")
    kwargs = {"model_kind": doc.get("model", "rectilinear")}
    unknown = set(doc) - set(_CONFIG_KEYS) - {"model"}
    if unknown:
        raise InputValidationError(f"unknown --model keys {sorted(unknown)}")
    for key, field_name in _CONFIG_KEYS.items():
        if key in doc:
            kwargs[field_name] = doc[key]
    try:
        return SceneConfig(**kwargs)
    except InputValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputValidationError(f"bad --model: {exc}") from None


def cmd_simulate(args, frame):
    if args.scenes < 0:
        raise InputValidationError("--scenes must be non-negative")
    if not args.sigma >= 0:
        raise InputValidationError("--sigma must be non-negative")
    config = parse_scene_config(args.model)
    rows = run_batch(args.seed, args.scenes, config, args.sigma)
    lines = [CSV_HEADER] + [r.csv() for r in rows]
    try:
        Path(args.out).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise InputValidationError(f"cannot write {args.out}: {exc}") from exc
    median = {}
    for name in RoundTripReport.FIELDS:
        vals = [getattr(r.report, name) for r in rows if getattr(r.report, name) is not None]
        median[name] = float(statistics.median(vals)) if vals else None
    return {
        "scenes": len(rows),
        "failures": sum(r.report.failure is not None for r in rows),
        "out": str(args.out),
        "median": median,
    }


COMMANDS = {
    "pose": cmd_pose,
    "reconstruct": cmd_reconstruct,
    "rectify": cmd_rectify,
    "focal": cmd_focal,
    "intersect": cmd_intersect,
    "simulate": cmd_simulate,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pixels", metavar="WxH", default=argparse.SUPPRESS,
                        help="treat 2D inputs as pixel positions in a WxH image (y down)")
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help="indent JSON output")

    parser = _Parser(prog="quadpose", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pose", parents=[common], help="pose matrix of a quad")
    p.add_argument("--input", required=True, help="JSON file, or - for stdin")

    p = sub.add_parser("reconstruct", parents=[common], help="metric corners and camera position")
    p.add_argument("--input", required=True)
    p.add_argument("--marker", required=True, help='JSON, e.g. {"sides":[1,1,1,1],"aspect":1}')
    p.add_argument("--scale-by", choices=SCALE_MODES, default="by_width")
    p.add_argument("--reference", choices=CORNER_NAMES, default="c")

    p = sub.add_parser("rectify", parents=[common], help="2D rectification without lens parameters")
    p.add_argument("--input", required=True)
    p.add_argument("--marker-aspect", type=float, default=None)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--direction", choices=DIRECTIONS, default="forward")
    p.add_argument("--points", default=None, help="JSON list of extra [x, y] points")
    p.add_argument("--focal", default="1",
                   help="lift depth in centered units, or 'auto' to use the focal length "
                        "estimated from the quad (default 1)")

    p = sub.add_parser("focal", parents=[common], help="focal length from a quad")
    p.add_argument("--input", required=True)

    p = sub.add_parser("intersect", parents=[common], help="intersection of lines AB and CD")
    for name in ("a", "b", "c", "d"):
        p.add_argument(f"--{name}", required=True, metavar="X,Y")

    p = sub.add_parser("simulate", parents=[common], help="batch synthetic round trips to CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scenes", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--model", default='{"model":"rectilinear"}', help="scene config JSON")
    p.add_argument("--out", required=True)
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        frame = ImageFrame.parse(args.pixels) if getattr(args, "pixels", None) else None
        result = COMMANDS[args.command](args, frame)
    except (InputValidationError, InfeasibleConfigError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT
    except GeometryError as exc:
        log.error("degenerate geometry: %s", exc)
        return EXIT_GEOMETRY
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL
    indent = 2 if getattr(args, "pretty", False) else None
    stdout.write(json.dumps(result, indent=indent, allow_nan=False) + "\n")
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
