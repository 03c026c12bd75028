"""Small fixed-size vector algebra and the quad containers.

Vectors are plain float64 numpy arrays of shape (2,) or (3,).  The 3-vector
helpers are written component-wise: for single vectors this is several
times faster than ``np.cross``, which matters when scoring thousands of
synthetic scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateQuadError, DegenerateVectorError, InputValidationError

EPS_DEGENERATE = 1e-12

CORNER_NAMES = ("a", "b", "c", "d")


def vec2(x, y=None) -> np.ndarray:
    if y is None:
        x, y = x
    return np.array((float(x), float(y)))


def vec3(x, y=None, z=None) -> np.ndarray:
    if y is None:
        x, y, z = x
    return np.array((float(x), float(y), float(z)))


def cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Right-handed cross product of two 3-vectors."""
    ux, uy, uz = float(u[0]), float(u[1]), float(u[2])
    vx, vy, vz = float(v[0]), float(v[1]), float(v[2])
    return np.array((uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx))


def dot(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(u, v))


def norm(v: np.ndarray) -> float:
    return math.sqrt(dot(v, v))


def normalize(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` to unit length.

    Raises:
        DegenerateVectorError: if ``|v| <= 1e-12``.
    """
    n = norm(v)
    if not n > EPS_DEGENERATE:
        raise DegenerateVectorError(f"cannot normalize vector of norm {n:.3e}")
    return np.asarray(v, dtype=float) / n


def triple(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Scalar triple product ``(a x b) . c``."""
    return dot(cross(a, b), c)


def coplanar_on_sphere(a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float) -> bool:
    """True when three directions lie on one great circle of the visual sphere.

    A straight image line is a great circle, so this doubles as a
    collinearity test for image points given as incident vectors.
    """
    if not tol > 0:
        raise InputValidationError("tol must be positive")
    return abs(triple(a, b, c)) <= tol


def _as_corners(corners, dim: int) -> np.ndarray:
    arr = np.array(corners, dtype=float)
    if arr.shape != (4, dim):
        raise InputValidationError(f"expected four {dim}D corners, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("quad corners must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class _Quad:
    corners: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return self.corners[0]

    @property
    def b(self) -> np.ndarray:
        return self.corners[1]

    @property
    def c(self) -> np.ndarray:
        return self.corners[2]

    @property
    def d(self) -> np.ndarray:
        return self.corners[3]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.corners)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.corners[CORNER_NAMES.index(key.lower())]
        return self.corners[key]

    def as_dict(self) -> dict[str, list[float]]:
        return {name: [float(v) for v in p] for name, p in zip(CORNER_NAMES, self.corners)}


@dataclass(frozen=True, eq=False)
class Quad2(_Quad):
    """Four image corners A, B, C, D, clockwise from top-left, y up.

    Coordinates are centered on the principal point.  Ordering is a contract
    of the caller; nothing here tries to sort corners.
    """

    def __post_init__(self):
        arr = _as_corners(self.corners, 2)
        for i in range(4):
            for j in range(i + 1, 4):
                if math.dist(arr[i], arr[j]) <= EPS_DEGENERATE:
                    raise DegenerateQuadError(
                        f"corners {CORNER_NAMES[i]} and {CORNER_NAMES[j]} coincide"
                    )
        object.__setattr__(self, "corners", arr)

    @classmethod
    def from_points(cls, a: Sequence[float], b: Sequence[float], c: Sequence[float], d: Sequence[float]) -> Quad2:
        return cls(np.array([a, b, c, d], dtype=float))


@dataclass(frozen=True, eq=False)
class Quad3(_Quad):
    """Four 3D corners: incident directions or reconstructed points."""

    def __post_init__(self):
        arr = _as_corners(self.corners, 3)
        for name, p in zip(CORNER_NAMES, arr):
            if not np.any(p):
                raise DegenerateVectorError(f"corner {name} is the zero vector")
        object.__setattr__(self, "corners", arr)

    @classmethod
    def from_points(cls, a: Sequence[float], b: Sequence[float], c: Sequence[float], d: Sequence[float]) -> Quad3:
        return cls(np.array([a, b, c, d], dtype=float))

    def scaled(self, factors) -> Quad3:
        """Multiply each corner by its own factor (or all by one scalar)."""
        f = np.broadcast_to(np.asarray(factors, dtype=float), (4,))
        return Quad3(self.corners * f[:, None])
