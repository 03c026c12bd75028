"""Metric reconstruction: marker plane intersection, scaling, camera position."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSideError,
    GrazingPlaneError,
    InputValidationError,
    ParallelRayError,
)
from .linalg import CORNER_NAMES, EPS_DEGENERATE, Quad3, dot, norm
from .pose import PoseMatrix, pose_from_incidents

SCALE_MODES = ("by_side_a", "by_side_b", "by_side_c", "by_side_d", "by_width", "by_height")


@dataclass(frozen=True)
class MarkerSpec:
    """Physical marker size.

    ``side_a`` .. ``side_d`` are the lengths of AB, BC, CD and DA; ``aspect`` is
    width over height.
    """

    side_a: float
    side_b: float
    side_c: float
    side_d: float
    aspect: float

    def __post_init__(self):
        for name in ("side_a", "side_b", "side_c", "side_d", "aspect"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputValidationError(f"{name} must be positive, got {v!r}")

    @classmethod
    def rectangle(cls, width: float, height: float) -> MarkerSpec:
        return cls(width, height, width, height, width / height)

    @classmethod
    def square(cls, side: float) -> MarkerSpec:
        return cls.rectangle(side, side)

    @property
    def sides(self) -> tuple[float, float, float, float]:
        return (self.side_a, self.side_b, self.side_c, self.side_d)


@dataclass(frozen=True, eq=False)
class ReconstructedScene:
    pose: PoseMatrix
    points: Quad3
    scale_u: float
    camera_in_marker: np.ndarray


def intersect_ray_plane(v, normal, plane_pt) -> np.ndarray:
    """Extend ray ``v`` from the origin to the plane through ``plane_pt``.

    The length and sign of ``normal`` cancel out of the ratio.
    """
    v = np.asarray(v, dtype=float)
    denom = dot(v, normal)
    if not abs(denom) > EPS_DEGENERATE * norm(v) * norm(normal):
        raise ParallelRayError("ray is parallel to the plane")
    return (dot(plane_pt, normal) / denom) * v


def rectify3d(quad: Quad3, pose: PoseMatrix, reference_corner: str = "c") -> Quad3:
    """Push every incident vector onto the plane through the reference corner.

    The output is the marker shape up to one unknown global scale.  The
    reference corner comes back unchanged.
    """
    ref = reference_corner.lower()
    if ref not in CORNER_NAMES:
        raise InputValidationError(f"reference corner must be one of {CORNER_NAMES}, got {reference_corner!r}")
    n = pose.z_axis
    plane_pt = quad[ref]
    numerator = dot(plane_pt, n)
    n_norm = norm(n)
    out = np.empty((4, 3))
    for i, (name, v) in enumerate(zip(CORNER_NAMES, quad)):
        if name == ref:
            out[i] = v
            continue
        denom = dot(v, n)
        if not abs(denom) > EPS_DEGENERATE * norm(v) * n_norm:
            raise GrazingPlaneError(name)
        out[i] = (numerator / denom) * v
    return Quad3(out)


_SIDE_CORNERS = {
    "by_side_a": (0, 1, 0),  # |B - A|
    "by_side_b": (1, 2, 1),  # |C - B|
    "by_side_c": (2, 3, 2),  # |D - C|
    "by_side_d": (3, 0, 3),  # |A - D|
    "by_width": (2, 3, 2),
    "by_height": (0, 3, 3),
}


def scale_to_marker(quad: Quad3, marker: MarkerSpec, mode: str = "by_width") -> tuple[Quad3, float]:
    """Scale a rectified quad to metric units using one known side.

    ``by_width`` measures side CD and ``by_height`` side DA.
    """
    try:
        i, j, side_idx = _SIDE_CORNERS[mode]
    except KeyError:
        raise InputValidationError(f"mode must be one of {SCALE_MODES}, got {mode!r}") from None
    observed = norm(quad[i] - quad[j])
    if not observed > EPS_DEGENERATE:
        raise DegenerateSideError(f"observed side for {mode} has zero length")
    u = marker.sides[side_idx] / observed
    return Quad3(quad.corners * u), u


def camera_position(pose: PoseMatrix, marker_origin_cam) -> np.ndarray:
    """Camera center in the marker frame whose origin is corner D."""
    o = np.asarray(marker_origin_cam, dtype=float)
    return np.array((-dot(o, pose.x_axis), -dot(o, pose.y_axis), -dot(o, pose.z_axis)))


def reconstruct(
    incidents: Quad3,
    marker: MarkerSpec,
    reference_corner: str = "c",
    mode: str = "by_width",
) -> ReconstructedScene:
    """Full metric reconstruction from four incident vectors."""
    pose = pose_from_incidents(incidents)
    flat = rectify3d(incidents, pose, reference_corner)
    points, u = scale_to_marker(flat, marker, mode)
    return ReconstructedScene(pose, points, u, camera_position(pose, points.d))
