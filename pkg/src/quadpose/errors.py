"""Exception hierarchy.

Two families matter to callers: input validation problems (bad models,
malformed files, out-of-range lookups) and geometric degeneracies (parallel
rays, collinear corners, horizon points).  The CLI maps them to distinct
exit codes.
"""


class QuadPoseError(Exception):
    """Base class for every error raised by this package."""


class InputValidationError(QuadPoseError, ValueError):
    pass


class InvalidModelError(InputValidationError):
    pass


class UnsupportedModelError(InputValidationError):
    pass


class OutOfRangeError(InputValidationError):
    pass


class VectorMapFormatError(InputValidationError):
    pass


class GeometryError(QuadPoseError, ArithmeticError):
    """A closed-form solve hit a degenerate configuration."""


class DegenerateVectorError(GeometryError):
    pass


class DegenerateQuadError(GeometryError):
    pass


class DegenerateSideError(GeometryError):
    pass


class DegenerateSpanError(GeometryError):
    pass


class DegenerateLineError(GeometryError):
    pass


class ParallelRayError(GeometryError):
    pass


class GrazingPlaneError(ParallelRayError):
    def __init__(self, corner: str, message: str | None = None):
        self.corner = corner
        super().__init__(message or f"incident ray of corner {corner} is parallel to the marker plane")


class HorizonPointError(GeometryError):
    pass


class InvalidAxisError(GeometryError):
    pass


class NotInViewError(GeometryError):
    pass


class InfeasibleConfigError(QuadPoseError):
    pass
