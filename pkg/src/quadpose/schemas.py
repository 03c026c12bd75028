"""JSON Schemas (draft 2020-12) of every document the CLI writes to stdout."""

_VEC2 = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_BASIS = {
    "type": "object",
    "properties": {"x": _VEC3, "y": _VEC3, "z": _VEC3},
    "required": ["x", "y", "z"],
    "additionalProperties": False,
}


def _corners(vec):
    return {
        "type": "object",
        "properties": {k: vec for k in "abcd"},
        "required": list("abcd"),
        "additionalProperties": False,
    }


_FOCAL_FIELDS = {
    "focal": {"type": "number", "minimum": 0},
    "consistent": {"type": "boolean"},
}

POSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {"pose": _BASIS},
    "required": ["pose"],
    "additionalProperties": False,
}

RECONSTRUCT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "pose": _BASIS,
        "points": _corners(_VEC3),
        "camera_position": _VEC3,
        "scale": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["pose", "points", "camera_position", "scale"],
    "additionalProperties": False,
}

RECTIFY = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "matrix": _BASIS,
        "corners": _corners(_VEC2),
        "points": {"type": "array", "items": _VEC2},
        "aspect_factor": {"type": "number"},
        "focal": {
            "type": "object",
            "properties": _FOCAL_FIELDS,
            "required": ["focal", "consistent"],
            "additionalProperties": False,
        },
        "lift": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["matrix", "corners", "focal", "lift"],
    "additionalProperties": False,
}

FOCAL = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        **_FOCAL_FIELDS,
        "vanishing_x": {"oneOf": [_VEC2, {"type": "null"}]},
        "vanishing_y": {"oneOf": [_VEC2, {"type": "null"}]},
    },
    "required": ["focal", "consistent", "vanishing_x", "vanishing_y"],
    "additionalProperties": False,
}

INTERSECT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        {
            "type": "object",
            "properties": {"point": _VEC2},
            "required": ["point"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"parallel": {"const": True}},
            "required": ["parallel"],
            "additionalProperties": False,
        },
    ],
}

SIMULATE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "scenes": {"type": "integer", "minimum": 0},
        "failures": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
        "median": {
            "type": "object",
            "additionalProperties": {"oneOf": [{"type": "number"}, {"type": "null"}]},
        },
    },
    "required": ["scenes", "failures", "out", "median"],
    "additionalProperties": False,
}

BY_COMMAND = {
    "pose": POSE,
    "reconstruct": RECONSTRUCT,
    "rectify": RECTIFY,
    "focal": FOCAL,
    "intersect": INTERSECT,
    "simulate": SIMULATE,
}
