"""End-to-end smoke tests for the python bindings.

The bindings speak the same JSON documents as the CLI, so these tests drive
the full pipeline through dicts only: certify the bundled examples, verify
matrices (including a tampered one), generate seeded instances, and export
SDP problem text.
"""

import json
import pathlib

import pytest

import stresscert

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def load(name):
    return json.loads((DATA / name).read_text())


def test_certify_first_example():
    report = stresscert.certify(load("ex1.json"))
    assert report["kind"] == "framework"
    assert report["pass"] is True
    assert report["tree"] is True
    assert report["modifications"] == 0
    assert report["order"] == [1, 2, 3, 4, 5, 6, 7]
    assert report["verify"]["rank"] == 4
    assert report["verify"]["gram_rank"] == 3
    assert report["matrix"]["rows"] == 7
    # exact backend: integers stay numbers, fractions become "p/q" strings
    assert report["matrix"]["entries"][0][0] == "125/4"
    assert report["matrix"]["entries"][6][6] == 1


def test_certify_second_example_traces_modifications():
    report = stresscert.certify(load("ex2.json"))
    assert report["pass"] is True
    assert report["tree"] is False
    assert report["modifications"] == 2
    steps = report["trace"]
    assert [s["skipped"] for s in steps] == [True, False, False]
    assert steps[1]["s"][0] == "-15/16"

    relaxed = stresscert.certify(load("ex2.json"), backend="float")
    assert relaxed["pass"] is True
    assert abs(relaxed["matrix"]["entries"][6][6] - 1.0) < 1e-9


def test_verify_round_trip_and_tamper():
    report = stresscert.certify(load("ex2.json"))
    matrix = report["matrix"]
    assert stresscert.verify(load("ex2.json"), matrix)["pass"] is True

    bad = json.loads(json.dumps(matrix))
    bad["entries"][0][5] = "1"
    bad["entries"][5][0] = "1"
    refused = stresscert.verify(load("ex2.json"), bad)
    assert refused["pass"] is False
    assert refused["verify"]["offedge_ok"] is False
    assert refused["verify"]["offedge_witness"] == [1, 6]


def test_generate_is_deterministic_and_certifiable():
    a = stresscert.generate(2, 9, seed=5)
    b = stresscert.generate(2, 9, seed=5)
    assert a == b
    assert stresscert.generate(2, 9, seed=6) != a
    assert stresscert.certify(a)["pass"] is True

    tree = stresscert.generate(2, 12, seed=8, tree=True)
    report = stresscert.certify(tree)
    assert report["tree"] is True
    assert report["modifications"] == 0


def test_anchored_path():
    net = stresscert.generate(2, 5, anchors=3, seed=4)
    assert net["anchors"] == 3
    report = stresscert.certify(net)
    assert report["kind"] == "anchored"
    assert report["pass"] is True
    assert report["verify"]["gap"] == "0"
    assert report["verify"]["rank"] == 5
    matrix = report["matrix"]
    assert matrix["rows"] == 2 + 5
    assert stresscert.verify(net, matrix)["pass"] is True


def test_export_sdp_text():
    text = stresscert.export_sdp(load("ex1.json"))
    lines = text.splitlines()
    assert lines[0] == "15"
    assert lines[1] == "1"
    assert lines[2] == "7"
    assert len(lines[3].split()) == 15


def test_errors_surface_as_python_exceptions():
    inst = load("ex1.json")
    inst["positions"][0] = [0, 0]
    inst["positions"][1] = [1, 0]
    inst["positions"][2] = [2, 0]
    with pytest.raises(stresscert.SingularMatrix):
        stresscert.certify(inst)

    path_graph = {
        "dim": 2,
        "positions": [[0, 0], [1, 2], [2, 5], [3, 1], [4, 3]],
        "edges": [[1, 2], [2, 3], [3, 4], [4, 5]],
    }
    with pytest.raises(stresscert.OrderNotFound):
        stresscert.certify(path_graph)

    with pytest.raises(ValueError):
        stresscert.certify({"dim": 2})
