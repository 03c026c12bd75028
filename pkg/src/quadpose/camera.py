"""Camera models: picture coordinates to incident vectors and back.

Texture coordinates ``(s, t)`` span the picture as ``[0, 1]^2`` with ``t = 0``
at the bottom edge, so the top-left corner of a marker has the larger ``t``.
Centered picture coordinates are ``(aspect * (2s - 1), 2t - 1)``: the vertical
extent is ``[-1, 1]`` and the principal point sits at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    InvalidModelError,
    NotInViewError,
    OutOfRangeError,
    UnsupportedModelError,
    VectorMapFormatError,
)

AXES = ("horizontal", "diagonal", "vertical")
SAMPLING = ("nearest", "bilinear")


def _check_aspect(aspect: float) -> None:
    if not (math.isfinite(aspect) and aspect > 0):
        raise InvalidModelError(f"aspect must be a positive finite number, got {aspect!r}")


@dataclass(frozen=True)
class Rectilinear:
    """Pinhole lens described by its angle of view along one picture axis."""

    aov_deg: float
    axis: str = "horizontal"
    aspect: float = 1.0

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidModelError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not (0.0 < self.aov_deg < 180.0):
            raise InvalidModelError(f"rectilinear angle of view must lie in (0, 180), got {self.aov_deg!r}")
        _check_aspect(self.aspect)

    @property
    def cot_half(self) -> float:
        return 1.0 / math.tan(0.5 * math.radians(self.aov_deg))

    @property
    def focal_equivalent(self) -> float:
        """Focal length in centered picture units (picture height spans 2)."""
        a = self.aspect
        k = {"horizontal": a, "diagonal": math.hypot(a, 1.0), "vertical": 1.0}[self.axis]
        return k * self.cot_half


@dataclass(frozen=True)
class EquidistantFisheye:
    """Equidistant fisheye; ``aov_deg`` is measured across the picture diagonal.

    Image radius is proportional to the ray angle from the optical axis, with
    the diagonal corners at ``aov_deg / 2``.  Angles beyond 180 degrees are
    allowed, so rays may point behind the camera plane.
    """

    aov_deg: float
    aspect: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.aov_deg < 360.0):
            raise InvalidModelError(f"fisheye angle of view must lie in (0, 360), got {self.aov_deg!r}")
        _check_aspect(self.aspect)

    @property
    def half_angle(self) -> float:
        return 0.5 * math.radians(self.aov_deg)


@dataclass(frozen=True, eq=False)
class VectorMapGrid:
    """Sampled per-pixel incident vectors, stored row-major from the top-left cell.

    ``cells`` has shape ``(height, width, 3)``.  Values are signed reals; any
    pixel encoding must be undone by whoever produced the grid.
    """

    width: int
    height: int
    cells: np.ndarray
    sampling: str = "bilinear"

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height or self.width < 1 or self.height < 1:
            raise InvalidModelError("vector map dimensions must be positive integers")
        if self.sampling not in SAMPLING:
            raise InvalidModelError(f"sampling must be one of {SAMPLING}, got {self.sampling!r}")
        cells = np.array(self.cells, dtype=float)
        if cells.shape != (self.height, self.width, 3):
            raise InvalidModelError(
                f"cells must have shape {(self.height, self.width, 3)}, got {cells.shape}"
            )
        if not np.all(np.isfinite(cells)):
            raise InvalidModelError("vector map cells must be finite")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_model(cls, model, width: int, height: int, sampling: str = "bilinear") -> VectorMapGrid:
        """Tabulate ``incident(model, f)`` at every cell center."""
        cells = np.empty((height, width, 3))
        for j in range(height):
            t = 1.0 - (j + 0.5) / height
            for i in range(width):
                cells[j, i] = incident(model, ((i + 0.5) / width, t))
        return cls(width, height, cells, sampling)

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        """Texture coordinate of column ``i``, row ``j`` (row 0 at the top)."""
        return (i + 0.5) / self.width, 1.0 - (j + 0.5) / self.height


@dataclass(frozen=True, eq=False)
class VectorMap:
    grid: VectorMapGrid
    aspect: float | None = None

    def __post_init__(self):
        if self.aspect is None:
            object.__setattr__(self, "aspect", self.grid.width / self.grid.height)
        _check_aspect(self.aspect)


CameraModel = Union[Rectilinear, EquidistantFisheye, VectorMap]


def _texcoord(f) -> tuple[float, float]:
    s, t = float(f[0]), float(f[1])
    if not (math.isfinite(s) and math.isfinite(t)):
        raise OutOfRangeError("texture coordinate must be finite")
    return s, t


def incident_rectilinear(f, model: Rectilinear) -> np.ndarray:
    """Incident vector of a rectilinear lens.

    The z component is ``cot(aov/2)`` regardless of ``f``; x and y follow the
    axis along which the angle of view was measured.
    """
    s, t = _texcoord(f)
    x, y = 2.0 * s - 1.0, 2.0 * t - 1.0
    a = model.aspect
    if model.axis == "horizontal":
        y /= a
    elif model.axis == "diagonal":
        diag = math.hypot(a, 1.0)
        x = a * x / diag
        y /= diag
    else:
        x *= a
    return np.array((x, y, model.cot_half))


def incident_fisheye(f, model: EquidistantFisheye) -> np.ndarray:
    s, t = _texcoord(f)
    a = model.aspect
    diag = math.hypot(a, 1.0)
    u = a * (2.0 * s - 1.0) / diag
    v = (2.0 * t - 1.0) / diag
    r = math.hypot(u, v)
    theta = r * model.half_angle
    if r == 0.0:
        return np.array((0.0, 0.0, 1.0))
    sin_t = math.sin(theta)
    return np.array((sin_t * u / r, sin_t * v / r, math.cos(theta)))


def sample_vector_map(grid: VectorMapGrid, f) -> np.ndarray:
    """Look up the stored incident vector at ``f``.

    The result is deliberately not renormalized.
    """
    s, t = _texcoord(f)
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise OutOfRangeError(f"texture coordinate {(s, t)} lies outside [0, 1]^2")
    w, h = grid.width, grid.height
    if grid.sampling == "nearest":
        i = min(int(math.floor(s * w)), w - 1)
        j = min(int(math.floor((1.0 - t) * h)), h - 1)
        return grid.cells[j, i].copy()

    # continuous cell index, cell centers at integers
    x = min(max(s * w - 0.5, 0.0), w - 1.0)
    y = min(max((1.0 - t) * h - 0.5, 0.0), h - 1.0)
    i0, j0 = int(math.floor(x)), int(math.floor(y))
    i1, j1 = min(i0 + 1, w - 1), min(j0 + 1, h - 1)
    fx, fy = x - i0, y - j0
    c = grid.cells
    top = (1.0 - fx) * c[j0, i0] + fx * c[j0, i1]
    bottom = (1.0 - fx) * c[j1, i0] + fx * c[j1, i1]
    return (1.0 - fy) * top + fy * bottom


def incident(model: CameraModel, f) -> np.ndarray:
    """Incident vector for texture coordinate ``f`` under any camera model."""
    if isinstance(model, Rectilinear):
        return incident_rectilinear(f, model)
    if isinstance(model, EquidistantFisheye):
        return incident_fisheye(f, model)
    if isinstance(model, VectorMap):
        return sample_vector_map(model.grid, f)
    raise UnsupportedModelError(f"unknown camera model {type(model).__name__}")


def project(model: CameraModel, direction) -> np.ndarray:
    """Texture coordinate seen along ``direction``; inverse of :func:`incident`.

    Raises:
        NotInViewError: the direction is behind a rectilinear lens or outside
            the fisheye's angular coverage.
        UnsupportedModelError: for sampled vector maps, which have no
            closed-form inverse.
    """
    x, y, z = (float(v) for v in direction)
    if isinstance(model, Rectilinear):
        if not z > 0.0:
            raise NotInViewError("direction is not in front of the rectilinear image plane")
        scale = model.cot_half / z
        gx, gy = x * scale, y * scale
        a = model.aspect
        if model.axis == "horizontal":
            gy *= a
        elif model.axis == "diagonal":
            diag = math.hypot(a, 1.0)
            gx = gx * diag / a
            gy *= diag
        else:
            gx /= a
        return np.array(((gx + 1.0) / 2.0, (gy + 1.0) / 2.0))

    if isinstance(model, EquidistantFisheye):
        rho = math.hypot(x, y)
        theta = math.atan2(rho, z)
        if rho == 0.0 and z <= 0.0:
            raise NotInViewError("direction points straight behind the fisheye")
        if theta > model.half_angle * (1.0 + 1e-12):
            raise NotInViewError(
                f"direction is {math.degrees(theta):.6g} deg off axis, coverage is "
                f"{math.degrees(model.half_angle):.6g} deg"
            )
        r = theta / model.half_angle
        u, v = (r * x / rho, r * y / rho) if rho > 0.0 else (0.0, 0.0)
        a = model.aspect
        diag = math.hypot(a, 1.0)
        return np.array(((u * diag / a + 1.0) / 2.0, (v * diag + 1.0) / 2.0))

    if isinstance(model, VectorMap):
        raise UnsupportedModelError("vector-map cameras cannot project directions")
    raise UnsupportedModelError(f"unknown camera model {type(model).__name__}")


def centered_from_texcoord(f, aspect: float) -> np.ndarray:
    s, t = float(f[0]), float(f[1])
    return np.array((aspect * (2.0 * s - 1.0), 2.0 * t - 1.0))


def texcoord_from_centered(p, aspect: float) -> np.ndarray:
    x, y = float(p[0]), float(p[1])
    return np.array(((x / aspect + 1.0) / 2.0, (y + 1.0) / 2.0))


# --- vector map text format -------------------------------------------------

VMAP_MAGIC = "VMAP1"


def parse_vector_map(text: str) -> VectorMapGrid:
    """Parse the ``VMAP1`` text format.

    Line 1 is ``VMAP1 <width> <height> <nearest|bilinear>``, followed by
    ``width * height`` lines of three reals, row-major from the top-left cell.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise VectorMapFormatError("empty vector map")
    header = lines[0].split()
    if len(header) != 4 or header[0] != VMAP_MAGIC:
        raise VectorMapFormatError(f"bad header {lines[0]!r}")
    try:
        width, height = int(header[1]), int(header[2])
    except ValueError as exc:
        raise VectorMapFormatError(f"bad dimensions in header {lines[0]!r}") from exc
    if width < 1 or height < 1:
        raise VectorMapFormatError("vector map dimensions must be positive")
    sampling = header[3]
    if sampling not in SAMPLING:
        raise VectorMapFormatError(f"unknown sampling {sampling!r}")
    body = lines[1:]
    if len(body) != width * height:
        raise VectorMapFormatError(f"expected {width * height} cell lines, found {len(body)}")
    cells = np.empty((width * height, 3))
    for k, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 3:
            raise VectorMapFormatError(f"cell line {k + 2} must hold three values")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise VectorMapFormatError(f"cell line {k + 2}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise VectorMapFormatError(f"cell line {k + 2} holds a non-finite value")
        cells[k] = vals
    return VectorMapGrid(width, height, cells.reshape(height, width, 3), sampling)


def format_vector_map(grid: VectorMapGrid) -> str:
    out = [f"{VMAP_MAGIC} {grid.width} {grid.height} {grid.sampling}"]
    for cell in grid.cells.reshape(-1, 3):
        out.append(" ".join(repr(float(v)) for v in cell))
    return "\n".join(out) + "\n"


def load_vector_map(path) -> VectorMapGrid:
    return parse_vector_map(Path(path).read_text())
