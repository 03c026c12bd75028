"""Pose matrix of a projected rectangle from its four incident vectors.

Each side of the quad spans a great circle on the visual sphere; the two
pairs of opposite sides meet at spherical vanishing points.  Those two
directions are the marker's in-plane axes, and their cross product is the
plane normal.  Everything is a handful of cross products, so no iteration
and no field-of-view limit: incident vectors may point behind the camera.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuadError, DegenerateVectorError
from .linalg import CORNER_NAMES, EPS_DEGENERATE, Quad3, cross, dot, norm, normalize


@dataclass(frozen=True, eq=False)
class PoseMatrix:
    """Marker basis in camera coordinates.

    ``x_axis`` follows side A->B, ``y_axis`` follows D->A and ``z_axis`` is the
    plane normal, oriented away from the camera.  For a parallelogram marker
    ``x_axis`` and ``y_axis`` keep the marker's corner angle.
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    z_axis: np.ndarray

    def as_rows(self) -> np.ndarray:
        return np.array([self.x_axis, self.y_axis, self.z_axis])

    def negated(self, x: bool = False, y: bool = False, z: bool = False) -> PoseMatrix:
        return PoseMatrix(
            -self.x_axis if x else self.x_axis,
            -self.y_axis if y else self.y_axis,
            -self.z_axis if z else self.z_axis,
        )


def vanishing_direction(p: np.ndarray, q: np.ndarray, r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Unnormalized meeting direction of great circles ``pq`` and ``rs``."""
    return cross(cross(p, q), cross(r, s))


def _check_pairwise(quad: Quad3) -> None:
    units = [normalize(v) for v in quad]
    for i in range(4):
        for j in range(i + 1, 4):
            if norm(cross(units[i], units[j])) <= EPS_DEGENERATE:
                raise DegenerateQuadError(
                    f"incident vectors {CORNER_NAMES[i]} and {CORNER_NAMES[j]} are parallel"
                )


def raw_pose(quad: Quad3) -> PoseMatrix:
    """Pose basis straight from the cross products, signs not fixed."""
    _check_pairwise(quad)
    a, b, c, d = quad
    try:
        x = normalize(vanishing_direction(a, b, c, d))
        y = normalize(vanishing_direction(a, d, c, b))
        z = normalize(cross(x, y))
    except DegenerateVectorError as exc:
        raise DegenerateQuadError(f"collinear corner configuration: {exc}") from exc
    return PoseMatrix(x, y, z)


def canonicalize(p: PoseMatrix, quad: Quad3) -> PoseMatrix:
    """Fix the sign ambiguity of the cross-product construction.

    ``x_axis`` is flipped to point along A->B, then ``y_axis`` is flipped so
    that the normal ``x_axis x y_axis`` lies in the hemisphere of the quad's
    mean incident direction.  Incident vectors are normalized first, which
    keeps the rule independent of their lengths.
    """
    a, b, c, d = (normalize(v) for v in quad)
    x, y = p.x_axis, p.y_axis
    along = dot(x, b - a)
    if along < 0.0 or (along == 0.0 and dot(x, c - d) < 0.0):
        x = -x
    if dot(cross(x, y), a + b + c + d) < 0.0:
        y = -y
    return PoseMatrix(x, y, normalize(cross(x, y)))


def pose_from_incidents(quad: Quad3, canonical: bool = True) -> PoseMatrix:
    """Estimate the pose of a rectangle (or parallelogram) from four incident vectors.

    Corners must be ordered A, B, C, D clockwise from the top-left.  The
    vectors need not be normalized; only their directions matter.

    Raises:
        DegenerateQuadError: two incident vectors are parallel, or the
            corners are arranged so that both vanishing directions coincide.
    """
    p = raw_pose(quad)
    return canonicalize(p, quad) if canonical else p


def side_angle(p: PoseMatrix) -> float:
    """Angle in radians between the two in-plane axes.

    For a rectangle this is a right angle; for a parallelogram it equals the
    corner angle at D (or its supplement).
    """
    return math.acos(max(-1.0, min(1.0, dot(p.x_axis, p.y_axis))))
