"""Lens-agnostic 2D rectification of a quad.

Image points are lifted to ``z = 1`` and the same vanishing-point cross
products used for pose estimation give a 3x3 matrix whose rows map the quad
to a view where both pairs of sides are parallel.

With the unit lift the matrix is orthonormal only when the centered
coordinates happen to be in units of the true focal length; otherwise a
rectangle comes out as a parallelogram.  Every function therefore takes a
``focal`` lift depth.  Passing the focal length estimated from the quad
itself (:func:`quadpose.focal.self_calibrated_focal`) yields a right-angled
rectangle without any lens parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateQuadError,
    DegenerateSideError,
    DegenerateSpanError,
    DegenerateVectorError,
    HorizonPointError,
    InputValidationError,
)
from .linalg import EPS_DEGENERATE, Quad2, Quad3, cross, dot, norm, normalize
from .pose import vanishing_direction

DIRECTIONS = ("forward", "inverse")


@dataclass(frozen=True, eq=False)
class RectifyMatrix:
    """Rows of the rectification matrix.

    ``z_axis`` is ``normalize(y_axis x x_axis)``, the reverse of the pose
    convention.  No sign policy is applied; rectified coordinates are ratios
    and survive a simultaneous sign flip of numerator and denominator rows.
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    z_axis: np.ndarray

    def as_rows(self) -> np.ndarray:
        return np.array([self.x_axis, self.y_axis, self.z_axis])

    def negated(self, x: bool = False, y: bool = False, z: bool = False) -> RectifyMatrix:
        return RectifyMatrix(
            -self.x_axis if x else self.x_axis,
            -self.y_axis if y else self.y_axis,
            -self.z_axis if z else self.z_axis,
        )

    def with_aspect(self, factor: float) -> RectifyMatrix:
        """Stretch the rectified x coordinate by ``factor``."""
        return RectifyMatrix(self.x_axis * factor, self.y_axis, self.z_axis)


def lift_to_unit_plane(q: Quad2, focal: float = 1.0) -> Quad3:
    """Corners as 3D points ``(x, y, focal)``."""
    return Quad3(np.column_stack([q.corners, np.full(4, _check_focal(focal))]))


def _check_focal(focal: float) -> float:
    focal = float(focal)
    if not (np.isfinite(focal) and focal > 0.0):
        raise InputValidationError(f"focal lift depth must be positive and finite, got {focal!r}")
    return focal


def rectification_matrix(q: Quad2, focal: float = 1.0) -> RectifyMatrix:
    """Rectification matrix of a centered 2D quad lifted to ``z = focal``.

    Raises:
        DegenerateQuadError: three corners are collinear, or a side pair
            degenerates so that no vanishing direction exists.
    """
    a, b, c, d = lift_to_unit_plane(q, focal)
    lifted = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                u = normalize(lifted[i])
                v = normalize(lifted[j])
                w = normalize(lifted[k])
                if abs(dot(cross(u, v), w)) <= EPS_DEGENERATE:
                    raise DegenerateQuadError("three quad corners are collinear")
    try:
        x = normalize(vanishing_direction(a, b, c, d))
        y = normalize(vanishing_direction(a, d, c, b))
        z = normalize(cross(y, x))
    except DegenerateVectorError as exc:
        raise DegenerateQuadError(str(exc)) from exc
    return RectifyMatrix(x, y, z)


def rectify_point(p, m: RectifyMatrix, direction: str = "forward", focal: float = 1.0) -> np.ndarray:
    """Apply the projective rectification to one centered point.

    ``forward`` dots the lifted point with the matrix rows; ``inverse`` uses
    the transposed matrix (dots with the columns), the direction needed when
    warping texture coordinates.  The two are mutually inverse only when the
    matrix is orthonormal.  ``focal`` is the depth the matrix was built
    with: forward takes picture coordinates, inverse returns them.

    Raises:
        HorizonPointError: the point maps to infinity.
    """
    if direction not in DIRECTIONS:
        raise InputValidationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    f = _check_focal(focal)
    rows = m.as_rows()
    if direction == "forward":
        h = np.array((float(p[0]) / f, float(p[1]) / f, 1.0))
        scale = 1.0
    else:
        h = np.array((float(p[0]), float(p[1]), 1.0))
        rows = rows.T
        scale = f
    den = dot(h, rows[2])
    if not abs(den) > EPS_DEGENERATE:
        raise HorizonPointError(f"point {tuple(h[:2])} lies on the rectification horizon")
    return np.array((scale * dot(h, rows[0]) / den, scale * dot(h, rows[1]) / den))


def rectify_quad(q: Quad2, m: RectifyMatrix, direction: str = "forward", focal: float = 1.0) -> np.ndarray:
    """Rectified corners A'', B'', C'', D'' as a (4, 2) array."""
    return np.array([rectify_point(p, m, direction, focal) for p in q])


def aspect_correction_factor(m: RectifyMatrix, q: Quad2, marker_aspect: float, focal: float = 1.0) -> float:
    """Factor for ``x_axis`` that restores the marker's width/height ratio.

    Measured as ``marker_aspect * |A'' - D''| / |C'' - D''|``.
    """
    a2 = rectify_point(q.a, m, focal=focal)
    c2 = rectify_point(q.c, m, focal=focal)
    d2 = rectify_point(q.d, m, focal=focal)
    height = norm(a2 - d2)
    width = norm(c2 - d2)
    if not (height > EPS_DEGENERATE and width > EPS_DEGENERATE):
        raise DegenerateSideError("rectified side has zero length")
    return marker_aspect * height / width


def normalize_to_unit(p, rectified_quad) -> np.ndarray:
    """Map rectified coordinates so that D'' -> (0, 0) and B'' -> (1, 1)."""
    rq = np.asarray(rectified_quad, dtype=float)
    b2, d2 = rq[1], rq[3]
    span = b2 - d2
    if np.any(np.abs(span) <= EPS_DEGENERATE):
        raise DegenerateSpanError(f"opposite corners B'' and D'' share a coordinate: span {tuple(span)}")
    return (np.asarray(p, dtype=float) - d2) / span
