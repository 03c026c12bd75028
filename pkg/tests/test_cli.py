import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from quadpose import cli
from quadpose.camera import Rectilinear
from quadpose.focal import estimate_focal, intersect_lines, self_calibrated_focal
from quadpose.linalg import Quad2
from quadpose.pose import pose_from_incidents
from quadpose.reconstruct import MarkerSpec, reconstruct
from quadpose.rectify import aspect_correction_factor, normalize_to_unit, rectification_matrix, rectify_point
from quadpose.schemas import BY_COMMAND

FRONTAL = {
    "quad": {"a": [-0.5, 0.5], "b": [0.5, 0.5], "c": [0.5, -0.5], "d": [-0.5, -0.5]},
    "camera": {"model": "rectilinear", "aov_deg": 90, "axis": "horizontal", "aspect": 1.0},
}
TILTED = {
    "quad": {"a": [-0.31, 0.42], "b": [0.52, 0.37], "c": [0.61, -0.33], "d": [-0.44, -0.29]},
    "camera": {"model": "rectilinear", "aov_deg": 70, "axis": "horizontal", "aspect": 1.5},
}


def invoke(*argv):
    out = io.StringIO()
    code = cli.run([str(a) for a in argv], stdout=out)
    doc = json.loads(out.getvalue()) if code == 0 else None
    if doc is not None:
        jsonschema.validate(doc, BY_COMMAND[argv[0]])
    return code, doc


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="in.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return _write


def quad_of(doc):
    return Quad2(np.array([doc["quad"][k] for k in "abcd"], float))


def incidents_of(doc):
    c = doc["camera"]
    return cli.incidents_from_quad(quad_of(doc), Rectilinear(c["aov_deg"], c["axis"], c["aspect"]))


def test_pose_frontal_fixture(write):
    code, doc = invoke("pose", "--input", write(FRONTAL))
    assert code == 0
    np.testing.assert_allclose([doc["pose"][k] for k in "xyz"], np.eye(3), atol=1e-9)


def test_pose_matches_library(write):
    code, doc = invoke("pose", "--input", write(TILTED))
    p = pose_from_incidents(incidents_of(TILTED))
    assert code == 0
    assert doc["pose"] == {"x": p.x_axis.tolist(), "y": p.y_axis.tolist(), "z": p.z_axis.tolist()}


def test_reconstruct_matches_library(write):
    marker = '{"sides":[0.2,0.1,0.2,0.1],"aspect":2}'
    code, doc = invoke("reconstruct", "--input", write(TILTED), "--marker", marker, "--scale-by", "by_height")
    rec = reconstruct(incidents_of(TILTED), MarkerSpec(0.2, 0.1, 0.2, 0.1, 2.0), "c", "by_height")
    assert code == 0
    assert doc["points"] == {k: v.tolist() for k, v in zip("abcd", rec.points.corners)}
    assert doc["camera_position"] == rec.camera_in_marker.tolist()
    assert doc["scale"] == rec.scale_u


def test_rectify_matches_library(write):
    pts = [[0.0, 0.0], [0.1, -0.2]]
    code, doc = invoke(
        "rectify", "--input", write(TILTED), "--marker-aspect", 1.5, "--normalize", "--points", json.dumps(pts)
    )
    q = quad_of(TILTED)
    m = rectification_matrix(q)
    k = aspect_correction_factor(m, q, 1.5)
    m = m.with_aspect(k)
    corners = np.array([rectify_point(p, m) for p in q])
    assert code == 0
    assert doc["aspect_factor"] == k
    assert doc["corners"] == {n: normalize_to_unit(p, corners).tolist() for n, p in zip("abcd", corners)}
    assert doc["points"] == [normalize_to_unit(rectify_point(p, m), corners).tolist() for p in pts]
    assert doc["matrix"]["z"] == m.z_axis.tolist()


def test_rectify_with_focal_divides_input(write):
    _, plain = invoke("rectify", "--input", write(TILTED))
    _, scaled = invoke("rectify", "--input", write(TILTED), "--focal", 2.0)
    q = quad_of(TILTED)
    m = rectification_matrix(q, 2.0)
    assert scaled["corners"]["a"] == rectify_point(q.a, m, focal=2.0).tolist()
    assert plain["focal"] == scaled["focal"]
    assert plain["lift"] == 1.0 and scaled["lift"] == 2.0


def test_rectify_auto_focal(write):
    code, doc = invoke("rectify", "--input", write(TILTED), "--focal", "auto")
    q = quad_of(TILTED)
    f = self_calibrated_focal(q)
    assert code == 0 and doc["lift"] == f
    assert doc["corners"]["c"] == rectify_point(q.c, rectification_matrix(q, f), focal=f).tolist()
    assert invoke("rectify", "--input", write(TILTED), "--focal", "wide")[0] == 2


def test_rectify_inverse_direction(write):
    _, doc = invoke("rectify", "--input", write(TILTED), "--direction", "inverse", "--points", "[[0.2,0.1]]")
    m = rectification_matrix(quad_of(TILTED))
    assert doc["points"] == [rectify_point((0.2, 0.1), m, "inverse").tolist()]


def test_focal_frontal_sentinel(write):
    code, doc = invoke("focal", "--input", write(FRONTAL))
    assert code == 0
    assert doc == {"focal": 0.0, "consistent": False, "vanishing_x": None, "vanishing_y": None}


def test_focal_matches_library(write):
    code, doc = invoke("focal", "--input", write(TILTED))
    m = rectification_matrix(quad_of(TILTED))
    fe = estimate_focal(m)
    assert code == 0
    assert doc["focal"] == fe.focal and doc["consistent"] == fe.consistent
    assert doc["vanishing_x"] == [m.x_axis[0] / m.x_axis[2], m.x_axis[1] / m.x_axis[2]]


def test_intersect():
    assert invoke("intersect", "--a", "0,0", "--b", "1,1", "--c", "0,1", "--d", "1,0") == (0, {"point": [0.5, 0.5]})
    assert invoke("intersect", "--a", "0,0", "--b", "1,0", "--c", "0,1", "--d", "1,1") == (0, {"parallel": True})
    code, doc = invoke("intersect", "--a=-1.5,2", "--b", "3,0.25", "--c", "0,-4", "--d", "2,7")
    assert doc["point"] == list(intersect_lines((-1.5, 2), (3, 0.25), (0, -4), (2, 7)).point)


def test_pixels_flag():
    code, doc = invoke("intersect", "--pixels", "200x100", "--a", "0,0", "--b", "200,100", "--c", "200,0", "--d", "0,100")
    assert code == 0 and doc == {"point": [0.0, 0.0]}


def test_center_coords():
    frame = cli.ImageFrame(640, 480)
    np.testing.assert_array_equal(cli.center_coords((320, 240), frame), [0, 0])
    assert cli.center_coords((100, 0), cli.ImageFrame(100, 100)).tolist() == [1.0, 1.0]
    rng = np.random.default_rng(1)
    for p in rng.uniform(0, 640, (100, 2)):
        np.testing.assert_allclose(cli.pixel_coords(cli.center_coords(p, frame), frame), p, rtol=0, atol=1e-12)


def test_simulate(tmp_path):
    out = tmp_path / "batch.csv"
    code, doc = invoke("simulate", "--seed", 3, "--scenes", 5, "--sigma", 0, "--out", out)
    assert code == 0 and doc["scenes"] == 5 and doc["failures"] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "seed,sigma,pose_err,corner_err,campos_err,focal_err,rect_angle_err"
    assert [line.split(",")[0] for line in lines[1:]] == ["3", "4", "5", "6", "7"]
    assert doc["median"]["pose_angle_error"] < 1e-8


def test_simulate_fisheye_na(tmp_path):
    out = tmp_path / "fish.csv"
    code, _ = invoke("simulate", "--scenes", 2, "--model", '{"model":"fisheye","aov_deg":[200,270]}', "--out", out)
    assert code == 0
    assert all(line.endswith(",NA,NA") for line in out.read_text().splitlines()[1:])


def test_vmap_camera(write, tmp_path):
    from quadpose.camera import VectorMapGrid, format_vector_map

    grid = VectorMapGrid.from_model(Rectilinear(90.0, "horizontal", 1.0), 9, 9, "bilinear")
    vpath = tmp_path / "lens.vmap"
    vpath.write_text(format_vector_map(grid))
    code, doc = invoke("pose", "--input", write({"quad": FRONTAL["quad"], "camera": {"model": "vmap", "path": str(vpath)}}))
    assert code == 0
    np.testing.assert_allclose([doc["pose"][k] for k in "xyz"], np.eye(3), atol=1e-9)


@pytest.mark.parametrize(
    "argv",
    [
        ["pose"],
        ["frobnicate"],
        ["intersect", "--a", "0", "--b", "1,1", "--c", "0,1", "--d", "1,0"],
        ["intersect", "--pixels", "axb", "--a", "0,0", "--b", "1,1", "--c", "0,1", "--d", "1,0"],
        ["simulate", "--scenes", "-1", "--out", "x.csv"],
        ["simulate", "--model", '{"model":"fisheye","zoom":2}', "--out", "x.csv"],
    ],
)
def test_exit_code_input(argv):
    assert invoke(*argv)[0] == 2


@pytest.mark.parametrize(
    "doc",
    [
        {"quad": {"a": [0, 0]}, "camera": FRONTAL["camera"]},
        {"quad": FRONTAL["quad"], "camera": {"model": "orthographic"}},
        {"quad": FRONTAL["quad"], "camera": {"model": "rectilinear", "aov_deg": 180}},
        {"quad": FRONTAL["quad"], "camera": {"model": "vmap", "path": "/nonexistent.vmap"}},
        {"quad": {**FRONTAL["quad"], "a": [0, "x"]}, "camera": FRONTAL["camera"]},
    ],
)
def test_exit_code_input_documents(write, doc):
    assert invoke("pose", "--input", write(doc))[0] == 2


def test_exit_code_bad_json_and_marker(tmp_path, write):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert invoke("pose", "--input", bad)[0] == 2
    assert invoke("reconstruct", "--input", write(FRONTAL), "--marker", '{"sides":[1,1]}')[0] == 2
    assert invoke("rectify", "--input", write(FRONTAL), "--focal", 0)[0] == 2


def test_exit_code_geometry(write):
    collinear = {"quad": {"a": [-0.5, 0], "b": [0, 0], "c": [0.5, 0], "d": [0.7, 0]}, "camera": FRONTAL["camera"]}
    assert invoke("pose", "--input", write(collinear))[0] == 3
    assert invoke("rectify", "--input", write(collinear))[0] == 3
    assert invoke("focal", "--input", write(collinear))[0] == 3
    assert invoke("intersect", "--a", "1,1", "--b", "1,1", "--c", "0,1", "--d", "1,0")[0] == 3


def test_exit_code_internal(monkeypatch, write):
    def boom(*_):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(cli.COMMANDS, "pose", boom)
    assert invoke("pose", "--input", write(FRONTAL))[0] == 1


def test_pretty_and_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "quadpose", "pose", "--pretty", "--input", "-"],
        input=json.dumps(FRONTAL),
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("{\n")
    jsonschema.validate(json.loads(proc.stdout), BY_COMMAND["pose"])


def test_serialization_keeps_all_digits(write):
    _, doc = invoke("pose", "--input", write(TILTED))
    p = pose_from_incidents(incidents_of(TILTED))
    for got, want in zip(doc["pose"]["x"], p.x_axis):
        assert f"{got:.15g}" == f"{want:.15g}"
