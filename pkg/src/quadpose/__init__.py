"""Closed-form pose, metric reconstruction and rectification of a planar
rectangular marker from its four image corners."""

from .camera import (
    EquidistantFisheye,
    Rectilinear,
    VectorMap,
    VectorMapGrid,
    incident,
    incident_fisheye,
    incident_rectilinear,
    project,
    sample_vector_map,
)
from .focal import (
    FocalEstimate,
    VanishingPoint,
    estimate_focal,
    estimate_focal_from_quad,
    intersect_lines,
    self_calibrated_focal,
    vanishing_point,
)
from .linalg import Quad2, Quad3, coplanar_on_sphere, cross, normalize
from .pose import PoseMatrix, canonicalize, pose_from_incidents, side_angle
from .reconstruct import MarkerSpec, ReconstructedScene, camera_position, intersect_ray_plane, reconstruct, rectify3d, scale_to_marker
from .rectify import (
    RectifyMatrix,
    aspect_correction_factor,
    lift_to_unit_plane,
    normalize_to_unit,
    rectification_matrix,
    rectify_point,
    rectify_quad,
)

__version__ = "0.1.0"

__all__ = [
    "EquidistantFisheye",
    "FocalEstimate",
    "MarkerSpec",
    "PoseMatrix",
    "Quad2",
    "Quad3",
    "ReconstructedScene",
    "RectifyMatrix",
    "Rectilinear",
    "VanishingPoint",
    "VectorMap",
    "VectorMapGrid",
    "aspect_correction_factor",
    "camera_position",
    "canonicalize",
    "coplanar_on_sphere",
    "cross",
    "estimate_focal",
    "estimate_focal_from_quad",
    "incident",
    "incident_fisheye",
    "incident_rectilinear",
    "intersect_lines",
    "intersect_ray_plane",
    "lift_to_unit_plane",
    "normalize",
    "normalize_to_unit",
    "pose_from_incidents",
    "project",
    "reconstruct",
    "rectification_matrix",
    "rectify3d",
    "rectify_point",
    "rectify_quad",
    "sample_vector_map",
    "scale_to_marker",
    "self_calibrated_focal",
    "side_angle",
    "vanishing_point",
]
