"""Synthetic scenes with known ground truth, and end-to-end scoring.

A scene places a rectangular (or parallelogram) marker in front of a camera
with a known rigid transform.  Corners are pushed through the camera model to
texture coordinates and back to incident vectors, exactly as a detector
would report them, so every solver in the package can be checked against
truth.

Random streams come from numpy's ``default_rng`` (PCG64) seeded with the
scene seed; the same seed and config always reproduce the same scene.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .camera import (
    CameraModel,
    EquidistantFisheye,
    Rectilinear,
    centered_from_texcoord,
    incident,
    project,
    texcoord_from_centered,
)
from .errors import InfeasibleConfigError, InputValidationError, NotInViewError, QuadPoseError
from .focal import estimate_focal_from_quad
from .linalg import Quad2, Quad3, normalize
from .pose import PoseMatrix
from .rectify import rectification_matrix, rectify_quad
from .reconstruct import MarkerSpec, reconstruct

MAX_ATTEMPTS = 1000
# corners exactly on the picture border may round a hair outside it
BORDER_TOL = 1e-12
MODEL_KINDS = ("rectilinear", "fisheye")


def _range(v) -> tuple[float, float]:
    if isinstance(v, (int, float)):
        return float(v), float(v)
    lo, hi = (float(x) for x in v)
    if hi < lo:
        raise InputValidationError(f"empty range {v!r}")
    return lo, hi


@dataclass(frozen=True)
class SceneConfig:
    """Sampling ranges for :func:`generate_scene`.

    Angles are in degrees.  ``distance`` is measured in marker widths from
    the camera to the marker center.  ``center_range`` bounds the texture
    coordinate at which the marker center is placed.  When ``yaw_deg`` or
    ``pitch_deg`` is given the marker is turned about the camera's vertical
    and horizontal axes by those magnitudes (random sign) instead of being
    tilted inside a cone of half-angle ``tilt_deg``.
    """

    model_kind: str = "rectilinear"
    aov_deg: tuple[float, float] = (30.0, 150.0)
    axis: str = "horizontal"
    camera_aspect: tuple[float, float] = (1.0, 16.0 / 9.0)
    tilt_deg: float = 75.0
    roll_deg: float = 45.0
    yaw_deg: tuple[float, float] | None = None
    pitch_deg: tuple[float, float] | None = None
    distance: tuple[float, float] = (2.0, 20.0)
    marker_width: float = 1.0
    marker_aspect: tuple[float, float] = (1.0, 1.0)
    corner_angle_deg: float = 90.0
    center_range: tuple[float, float] = (0.25, 0.75)
    min_facing_cos: float = 0.02

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise InputValidationError(f"model_kind must be one of {MODEL_KINDS}, got {self.model_kind!r}")
        for name in ("aov_deg", "camera_aspect", "distance", "marker_aspect", "center_range"):
            object.__setattr__(self, name, _range(getattr(self, name)))
        for name in ("yaw_deg", "pitch_deg"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, _range(getattr(self, name)))
        if not 0.0 < self.corner_angle_deg < 180.0:
            raise InputValidationError("corner_angle_deg must lie in (0, 180)")
        if self.distance[0] <= 0 or self.marker_width <= 0:
            raise InputValidationError("distance and marker width must be positive")


@dataclass(frozen=True, eq=False)
class SceneTruth:
    """Ground truth of one synthetic scene.

    ``rotation`` columns are the marker axes in camera coordinates and
    ``translation`` is the camera-frame position of the marker origin,
    corner D, so ``p_cam = rotation @ p_marker + translation``.
    ``focal_equivalent`` is the rectilinear focal length in centered
    picture units, or None for other models.
    """

    marker: MarkerSpec
    rotation: np.ndarray
    translation: np.ndarray
    camera: CameraModel
    focal_equivalent: float | None
    corner_angle_deg: float = 90.0

    @property
    def corners_marker(self) -> np.ndarray:
        w, h = self.marker.side_a, self.marker.side_b
        alpha = math.radians(self.corner_angle_deg)
        if self.corner_angle_deg == 90.0:
            a = np.array((0.0, h, 0.0))
        else:
            a = np.array((h * math.cos(alpha), h * math.sin(alpha), 0.0))
        d = np.zeros(3)
        c = np.array((w, 0.0, 0.0))
        return np.array([a, a + c, c, d])

    @property
    def corners_camera(self) -> np.ndarray:
        return self.corners_marker @ self.rotation.T + self.translation

    @property
    def normal(self) -> np.ndarray:
        return self.rotation[:, 2]

    @property
    def true_pose(self) -> PoseMatrix:
        """Orthonormal marker frame in camera coordinates."""
        return PoseMatrix(self.rotation[:, 0], self.rotation[:, 1], self.rotation[:, 2])

    @property
    def side_direction(self) -> np.ndarray:
        """Unit direction of side D->A in camera coordinates."""
        a, _, _, d = self.corners_camera
        return normalize(a - d)

    @property
    def camera_in_marker(self) -> np.ndarray:
        return -self.rotation.T @ self.translation

    @property
    def diagonal(self) -> float:
        a, _, c, _ = self.corners_marker
        return float(np.linalg.norm(c - a))


@dataclass(frozen=True, eq=False)
class ProjectedMarker:
    """What a camera sees of a scene.

    ``picture`` holds centered picture coordinates for every model.  ``image``
    holds points on a rectilinear image plane: for rectilinear cameras it is
    ``picture`` itself (plane at ``focal_equivalent``), for fisheye cameras the
    plane at unit focal length, and it is None when any corner lies at or
    behind the camera plane.
    """

    incidents: Quad3
    texcoords: np.ndarray
    picture: Quad2
    image: Quad2 | None


@dataclass
class RoundTripReport:
    pose_angle_error: float | None = None
    corner_error_rel: float | None = None
    camera_pos_error_rel: float | None = None
    focal_error_rel: float | None = None
    rectified_angle_error: float | None = None
    failure: str | None = None

    FIELDS = (
        "pose_angle_error",
        "corner_error_rel",
        "camera_pos_error_rel",
        "focal_error_rel",
        "rectified_angle_error",
    )


def rotation_angle_between(p: PoseMatrix, q: PoseMatrix) -> float:
    """Angle of the relative rotation between two orthonormal frames.

    Uses ``2 asin(|P - Q|_F / (2 sqrt 2))``, identical to
    ``acos((trace(P Q^T) - 1) / 2)`` but accurate for tiny angles.
    """
    diff = np.linalg.norm(p.as_rows() - q.as_rows())
    return 2.0 * math.asin(min(1.0, diff / (2.0 * math.sqrt(2.0))))


def axis_rotation(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a unit ``axis`` by ``angle`` radians."""
    x, y, z = normalize(np.asarray(axis, dtype=float))
    c, s = math.cos(angle), math.sin(angle)
    C = 1.0 - c
    return np.array(
        [
            [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
            [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
            [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
        ]
    )


def yaw_pitch_rotation(yaw_deg: float, pitch_deg: float) -> np.ndarray:
    """Turn about the camera's vertical axis after a turn about its horizontal axis.

    Written out explicitly so a zero angle leaves exact zeros in the matrix.
    """
    cy, sy = math.cos(math.radians(yaw_deg)), math.sin(math.radians(yaw_deg))
    cp, sp = math.cos(math.radians(pitch_deg)), math.sin(math.radians(pitch_deg))
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    return ry @ rx


def make_scene(
    camera: CameraModel,
    marker: MarkerSpec,
    rotation,
    center,
    corner_angle_deg: float = 90.0,
) -> SceneTruth:
    """Scene whose marker center sits at camera-frame point ``center``."""
    rotation = np.asarray(rotation, dtype=float)
    if not np.allclose(rotation.T @ rotation, np.eye(3), atol=1e-12, rtol=0.0) or abs(
        np.linalg.det(rotation) - 1.0
    ) > 1e-12:
        raise InputValidationError("rotation must be orthonormal with determinant +1")
    focal = camera.focal_equivalent if isinstance(camera, Rectilinear) else None
    probe = SceneTruth(marker, rotation, np.zeros(3), camera, focal, corner_angle_deg)
    a, _, c, _ = probe.corners_marker
    mid = 0.5 * (a + c)
    translation = np.asarray(center, dtype=float) - rotation @ mid
    return SceneTruth(marker, rotation, translation, camera, focal, corner_angle_deg)


def _sample_camera(rng: np.random.Generator, cfg: SceneConfig) -> CameraModel:
    aov = rng.uniform(*cfg.aov_deg)
    aspect = rng.uniform(*cfg.camera_aspect)
    if cfg.model_kind == "rectilinear":
        return Rectilinear(aov, cfg.axis, aspect)
    return EquidistantFisheye(aov, aspect)


def _sample_rotation(rng: np.random.Generator, cfg: SceneConfig) -> np.ndarray:
    if cfg.yaw_deg is not None or cfg.pitch_deg is not None:
        yaw_lo, yaw_hi = cfg.yaw_deg or (0.0, 0.0)
        pitch_lo, pitch_hi = cfg.pitch_deg or (0.0, 0.0)
        yaw = rng.uniform(yaw_lo, yaw_hi) * rng.choice((-1.0, 1.0))
        pitch = rng.uniform(pitch_lo, pitch_hi) * rng.choice((-1.0, 1.0))
        return yaw_pitch_rotation(yaw, pitch)
    # normal uniform on the spherical cap around the optical axis
    cos_tilt = rng.uniform(math.cos(math.radians(cfg.tilt_deg)), 1.0)
    tilt = math.acos(min(1.0, cos_tilt))
    azimuth = rng.uniform(0.0, 2.0 * math.pi)
    roll = math.radians(rng.uniform(-cfg.roll_deg, cfg.roll_deg))
    r_roll = axis_rotation((0.0, 0.0, 1.0), roll)
    if tilt == 0.0:
        return r_roll
    r_tilt = axis_rotation((-math.sin(azimuth), math.cos(azimuth), 0.0), tilt)
    return r_tilt @ r_roll


def _acceptable(truth: SceneTruth, cfg: SceneConfig) -> bool:
    pts = truth.corners_camera
    n = truth.normal
    for p in pts:
        if np.dot(p, n) / np.linalg.norm(p) < cfg.min_facing_cos:
            return False
    try:
        project_marker(truth)
    except NotInViewError:
        return False
    return True


def generate_scene(seed: int, config: SceneConfig | None = None) -> SceneTruth:
    """Draw a random visible scene, deterministically from ``seed``.

    Raises:
        InfeasibleConfigError: no acceptable scene after 1,000 draws.
    """
    cfg = config or SceneConfig()
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        camera = _sample_camera(rng, cfg)
        marker_aspect = rng.uniform(*cfg.marker_aspect)
        marker = MarkerSpec.rectangle(cfg.marker_width, cfg.marker_width / marker_aspect)
        rotation = _sample_rotation(rng, cfg)
        distance = rng.uniform(*cfg.distance) * cfg.marker_width
        tc = rng.uniform(*cfg.center_range, size=2)
        center = distance * normalize(incident(camera, tc))
        truth = make_scene(camera, marker, rotation, center, cfg.corner_angle_deg)
        if _acceptable(truth, cfg):
            return truth
    raise InfeasibleConfigError(f"no visible scene after {MAX_ATTEMPTS} attempts for seed {seed}")


def project_marker(truth: SceneTruth) -> ProjectedMarker:
    """Observe the marker corners through the scene's camera.

    Raises:
        NotInViewError: a corner is outside the camera's coverage or outside
            the picture rectangle.
    """
    cam = truth.camera
    pts = truth.corners_camera
    tcs = np.array([project(cam, p) for p in pts])
    if np.any(tcs < -BORDER_TOL) or np.any(tcs > 1.0 + BORDER_TOL):
        raise NotInViewError("a marker corner falls outside the picture")
    incidents = Quad3(np.array([incident(cam, tc) for tc in tcs]))
    picture = Quad2(np.array([centered_from_texcoord(tc, cam.aspect) for tc in tcs]))
    if isinstance(cam, Rectilinear):
        image = picture
    elif np.all(pts[:, 2] > 0.0):
        image = Quad2(pts[:, :2] / pts[:, 2:3])
    else:
        image = None
    return ProjectedMarker(incidents, tcs, picture, image)


def perturb(image: Quad2, sigma: float, seed: int) -> Quad2:
    """Add zero-mean Gaussian noise of standard deviation ``sigma`` to every coordinate."""
    if not sigma >= 0.0:
        raise InputValidationError("sigma must be non-negative")
    if sigma == 0.0:
        return image
    rng = np.random.default_rng(seed)
    return Quad2(image.corners + rng.normal(0.0, sigma, size=(4, 2)))


def _corner_angles(pts: np.ndarray) -> np.ndarray:
    out = np.empty(4)
    for i in range(4):
        u = pts[(i + 1) % 4] - pts[i]
        v = pts[(i - 1) % 4] - pts[i]
        cos = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
        out[i] = math.acos(max(-1.0, min(1.0, cos)))
    return out


def roundtrip(truth: SceneTruth, sigma: float = 0.0, seed: int = 0) -> RoundTripReport:
    """Run every solver on the observed scene and score it against truth.

    The pose error compares orthonormal frames, using ``z x x`` as the
    recovered in-plane y axis.  For rectilinear scenes the focal length is
    estimated from the centered picture, and the 2D rectification lifts the
    picture to the true focal length.  A self-estimated lift would make the
    rectified angles right by construction and measure nothing.  Camera
    position, focal and rectified angles are scored only for rectangular
    markers.  Solver errors are caught and recorded in ``failure``.
    """
    report = RoundTripReport()
    try:
        obs = project_marker(truth)
        cam = truth.camera
        if sigma > 0.0:
            picture = perturb(obs.picture, sigma, seed)
            incidents = Quad3(
                np.array([incident(cam, texcoord_from_centered(p, cam.aspect)) for p in picture])
            )
        else:
            picture, incidents = obs.picture, obs.incidents

        rec = reconstruct(incidents, truth.marker)
        est = rec.pose
        est_frame = PoseMatrix(est.x_axis, normalize(np.cross(est.z_axis, est.x_axis)), est.z_axis)
        report.pose_angle_error = rotation_angle_between(est_frame, truth.true_pose)
        report.corner_error_rel = float(
            np.max(np.linalg.norm(rec.points.corners - truth.corners_camera, axis=1)) / truth.diagonal
        )
        if truth.corner_angle_deg != 90.0:
            # camera position, focal and 2D rectification assume a rectangle
            return report
        true_cam = truth.camera_in_marker
        report.camera_pos_error_rel = float(
            np.linalg.norm(rec.camera_in_marker - true_cam) / np.linalg.norm(true_cam)
        )

        if truth.focal_equivalent is not None:
            f_true = truth.focal_equivalent
            fe = estimate_focal_from_quad(picture)
            if fe.focal > 0.0:
                report.focal_error_rel = abs(fe.focal - f_true) / f_true
            rect = rectify_quad(picture, rectification_matrix(picture, f_true), focal=f_true)
            report.rectified_angle_error = float(
                np.max(np.abs(_corner_angles(rect) - math.pi / 2))
            )
    except QuadPoseError as exc:
        report.failure = f"{type(exc).__name__}: {exc}"
    return report


@dataclass(frozen=True)
class BatchRow:
    seed: int
    sigma: float
    report: RoundTripReport = field(compare=False)

    def csv(self) -> str:
        vals = [str(self.seed), repr(float(self.sigma))]
        for name in RoundTripReport.FIELDS:
            v = getattr(self.report, name)
            vals.append("NA" if v is None else repr(float(v)))
        return ",".join(vals)


CSV_HEADER = "seed,sigma,pose_err,corner_err,campos_err,focal_err,rect_angle_err"


def run_batch(first_seed: int, count: int, config: SceneConfig, sigma: float = 0.0) -> list[BatchRow]:
    """Round trips for seeds ``first_seed .. first_seed + count - 1``, in seed order.

    The noise stream of each scene is seeded with the scene seed.
    """
    rows = []
    for seed in range(first_seed, first_seed + count):
        try:
            truth = generate_scene(seed, config)
        except InfeasibleConfigError as exc:
            rows.append(BatchRow(seed, sigma, RoundTripReport(failure=str(exc))))
            continue
        rows.append(BatchRow(seed, sigma, roundtrip(truth, sigma, seed)))
    return rows
