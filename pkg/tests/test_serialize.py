import json

import numpy as np

from convexspec import analytic, serialize as io
from convexspec.geom import Box, regular_polygon, unit_square
from convexspec.verify import brunn_minkowski_check, rerun


def test_json_roundtrip_polygon(tmp_path):
    P = regular_polygon(7, 1.3)
    path = io.write_json(tmp_path / "p.json", P, {"seed": 1})
    raw = json.loads(path.read_text())
    assert raw["artifact"] == "convexspec" and raw["config"] == {"seed": 1}
    assert io.read_domain(path) == P
    # repr precision survives the trip
    assert np.array_equal(io.read_domain(path).vertices, P.vertices)


def test_plain_vertex_file(tmp_path):
    path = tmp_path / "sq.json"
    path.write_text(json.dumps([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert io.read_domain(path) == unit_square()


def test_box_domain(tmp_path):
    path = io.write_json(tmp_path / "b.json", Box((1.0, 2.0)))
    assert io.read_domain(path) == Box((1.0, 2.0))


def test_spectrum_roundtrip(tmp_path):
    s = analytic.disk_spectrum(1.0, "DIRICHLET", 6)
    path = io.write_json(tmp_path / "s.json", s)
    back = io.spectrum_from(io.read_json(path))
    assert np.array_equal(back.eigenvalues, s.eigenvalues)
    assert back.index_base == 1 and back.bc_mode == s.bc_mode


def test_jsonl(tmp_path):
    reps = [brunn_minkowski_check(unit_square(), regular_polygon(5, 1.0), t) for t in (0.2, 0.7)]
    path = io.write_jsonl(tmp_path / "r.jsonl", reps, {"x": 1})
    lines = path.read_text().splitlines()
    assert len(lines) == 3 and "version" in json.loads(lines[0])
    rows = io.read_jsonl(path)
    assert [rerun(r).lhs for r in rows] == [r.lhs for r in reps]


def test_table(tmp_path):
    path = io.write_table(tmp_path / "t.csv", ["a", "b", "ok"], [[1, 0.1, True], [2, 1 / 3, False]])
    csv = path.read_text().splitlines()
    assert csv[0] == "a,b,ok" and csv[2] == "2,0.3333333333333333,0"
    dat = path.with_suffix(".dat").read_text().splitlines()
    assert dat[0].startswith("# {") and dat[1] == "# a b ok" and dat[2] == "1 0.1 1"


def test_bytes_identical(tmp_path):
    obj = {"b": [1.0, 2.5], "a": regular_polygon(5, 1.0)}
    a = io.write_json(tmp_path / "a.json", obj).read_bytes()
    b = io.write_json(tmp_path / "b.json", obj).read_bytes()
    assert a == b
