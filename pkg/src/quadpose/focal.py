"""Focal length from two perpendicular vanishing points, and line intersection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateLineError, DegenerateQuadError, InputValidationError, InvalidAxisError
from .linalg import EPS_DEGENERATE, Quad2, norm
from .pose import vanishing_direction
from .rectify import RectifyMatrix, lift_to_unit_plane

PARALLEL_Z = 1e-9


@dataclass(frozen=True)
class VanishingPoint:
    """Either a finite image point or a direction at infinity.

    Exactly one of ``point`` and ``direction`` is set.
    """

    point: tuple[float, float] | None = None
    direction: tuple[float, float] | None = None

    @property
    def finite(self) -> bool:
        return self.point is not None


@dataclass(frozen=True)
class FocalEstimate:
    """``focal`` is 0 when a side pair is parallel in the image.

    ``consistent`` is True when the two vanishing points lie on opposite sides
    of the principal point (non-positive dot product), the only configuration
    that a real focal length can produce.
    """

    focal: float
    consistent: bool


def vanishing_point(axis) -> VanishingPoint:
    """Image-plane vanishing point (at unit focal length) of a matrix axis.

    Raises:
        InvalidAxisError: the axis lies along the optical axis.  Such an axis
            is not the vanishing direction of any pair of image lines.
    """
    x, y, z = (float(v) for v in axis)
    r = math.hypot(x, y)
    if not r > EPS_DEGENERATE * math.hypot(r, z):
        raise InvalidAxisError("axis lies along the optical axis and has no image direction")
    if abs(z) > PARALLEL_Z:
        return VanishingPoint(point=(x / z, y / z))
    return VanishingPoint(direction=(x / r, y / r))


def _focal_from_axes(x, y, threshold: float) -> FocalEstimate:
    xz, yz = float(x[2]), float(y[2])
    if abs(xz) <= threshold * norm(x) or abs(yz) <= threshold * norm(y):
        return FocalEstimate(0.0, False)
    ratio = (float(x[0]) * float(y[0]) + float(x[1]) * float(y[1])) / (xz * yz)
    return FocalEstimate(math.sqrt(abs(ratio)), ratio <= 0.0)


def estimate_focal(m: RectifyMatrix) -> FocalEstimate:
    """Focal length implied by the rectification matrix's two vanishing axes.

    The result is in the units of the centered coordinates the matrix was
    built from.  Returns focal 0 with ``consistent=False`` when either side
    pair is parallel in the image.
    """
    return _focal_from_axes(m.x_axis, m.y_axis, PARALLEL_Z)


def estimate_focal_from_quad(q: Quad2) -> FocalEstimate:
    """Same estimate computed directly from the unnormalized cross products."""
    a, b, c, d = lift_to_unit_plane(q)
    x = vanishing_direction(a, b, c, d)
    y = vanishing_direction(a, d, c, b)
    if not (norm(x) > 0.0 and norm(y) > 0.0):
        raise DegenerateQuadError("quad has no vanishing directions")
    return _focal_from_axes(x, y, PARALLEL_Z)


def self_calibrated_focal(q: Quad2) -> float:
    """Lift depth that makes the rectification of ``q`` metric.

    This is the focal length estimated from ``q`` when the estimate exists
    and is consistent.  When a side pair is parallel in the image the
    rectification is metric at every depth, and 1.0 is returned.

    The estimate is chosen so that the two vanishing directions are
    perpendicular, so any quad with a consistent estimate rectifies to a
    right-angled figure at this depth.  The result is the true shape only
    when the quad really is the image of a rectangle.
    """
    fe = estimate_focal_from_quad(q)
    return fe.focal if fe.focal > 0.0 and fe.consistent else 1.0


@dataclass(frozen=True)
class Intersection:
    point: tuple[float, float] | None

    @property
    def parallel(self) -> bool:
        return self.point is None


def intersect_lines(a, b, c, d) -> Intersection:
    """Intersection of line AB with line CD.

    Both lines are lifted to ``z = 1``; the intersection is the cross product
    of the two line normals, dehomogenized.  Returns a parallel verdict when
    the homogeneous z vanishes relative to the segment lengths, that is when
    the lines meet at an angle whose sine is at most 1e-12.

    The products are evaluated in exact rational arithmetic and rounded once,
    so nearly parallel lines whose intersection lies far away still get the
    correctly rounded point instead of one polluted by cancellation.
    """
    coords = [float(v) for p in (a, b, c, d) for v in (p[0], p[1])]
    if not all(math.isfinite(v) for v in coords):
        raise InputValidationError("line points must be finite")
    ax, ay, bx, by, cx, cy, dx, dy = (Fraction(v) for v in coords)
    len_ab = math.hypot(float(bx - ax), float(by - ay))
    len_cd = math.hypot(float(dx - cx), float(dy - cy))
    if not (len_ab > EPS_DEGENERATE and len_cd > EPS_DEGENERATE):
        raise DegenerateLineError("a line is defined by two coincident points")
    l1 = (ay - by, bx - ax, ax * by - ay * bx)
    l2 = (cy - dy, dx - cx, cx * dy - cy * dx)
    xz = l1[0] * l2[1] - l1[1] * l2[0]
    if not abs(float(xz)) > EPS_DEGENERATE * len_ab * len_cd:
        return Intersection(None)
    xx = l1[1] * l2[2] - l1[2] * l2[1]
    xy = l1[2] * l2[0] - l1[0] * l2[2]
    return Intersection((float(xx / xz), float(xy / xz)))
