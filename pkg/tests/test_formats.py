from __future__ import annotations

import json
from fractions import Fraction

import pytest

from bratteli_irs.clopen import ClopenSet
from bratteli_irs.errors import InputError
from bratteli_irs.formats import (
    diagram_from_dict,
    diagram_to_dict,
    format_clopen,
    format_element,
    load_diagram,
    load_element,
    load_measure,
    measure_to_dict,
    parse_clopen,
    parse_element,
)
from bratteli_irs.group import GroupElement


def test_builtin_names():
    assert load_diagram("odometer:3").total_paths(2) == 9
    assert load_diagram("all-ones:3").num_vertices(1) == 3
    assert load_diagram("polynomial-example").total_paths(3) == 10
    with pytest.raises(InputError):
        load_diagram("odometer:x")


def test_diagram_roundtrip(tmp_path, poly, ones):
    for d in (ones, load_diagram("odometer:2")):
        path = tmp_path / "d.json"
        path.write_text(json.dumps(diagram_to_dict(d)))
        assert load_diagram(path) == d


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"root_edges": [1,\n  1,]}')
    with pytest.raises(InputError, match=r"line 2 column"):
        load_diagram(path)


@pytest.mark.parametrize(
    "doc,msg",
    [
        ([], "JSON object"),
        ({"matrices": []}, "root_edges"),
        ({"root_edges": [1], "extra": 1}, "unknown field"),
        ({"root_edges": [1.5]}, "root_edges"),
        ({"root_edges": [1], "matrices": [[[1], "x"]]}, r"matrices\[0\]\[1\]"),
        ({"root_edges": [1], "continuation": "loop"}, "continuation"),
    ],
)
def test_diagram_diagnostics(doc, msg):
    with pytest.raises(InputError, match=msg):
        diagram_from_dict(doc)


def test_measure_roundtrip(tmp_path, odo, odo_mu):
    doc = measure_to_dict(odo_mu)
    assert doc["levels"][1] == ["1/4"]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    back = load_measure(path, odo)
    assert back.levels == odo_mu.levels and back.mode == "rational"


def test_measure_float_and_errors(tmp_path, odo):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"levels": [[0.5], [0.25]], "mode": "float"}))
    assert load_measure(path, odo).q(2) == (0.25,)
    path.write_text(json.dumps({"levels": [[0.5]], "mode": "rational"}))
    with pytest.raises(InputError, match="rational"):
        load_measure(path, odo)
    path.write_text(json.dumps({"levels": [["1/2"]], "depth": 3, "mode": "rational"}))
    with pytest.raises(InputError, match="depth"):
        load_measure(path, odo)


def test_element_text(ones, tmp_path):
    g = parse_element("level=2; v0:(0 1); v1:id", ones)
    assert g == GroupElement.from_cycles(ones, 2, {0: [(0, 1)]})
    assert parse_element(format_element(g), ones) == g
    path = tmp_path / "g.txt"
    path.write_text("level=2; v1:(0 1)\n")
    assert load_element(str(path), ones).perms[1] == (1, 0)


@pytest.mark.parametrize(
    "text",
    ["v0:(0 1)", "level=2; v0:(0 1", "level=2; v0:(a b)", "level=2; v0:(0 1); v0:id", "level=2; x:(0 1)", "level=2; v0:(0 5)"],
)
def test_element_errors(ones, text):
    with pytest.raises(InputError):
        parse_element(text, ones)


def test_clopen_text(odo):
    a = parse_clopen("level=2; v0:0,3", odo)
    assert a == ClopenSet(odo, 2, frozenset({(0, 0), (0, 3)}))
    assert parse_clopen(format_clopen(a), odo) == a
    assert parse_clopen("empty", odo).is_empty()
    assert parse_clopen("all", odo).is_whole()
    with pytest.raises(InputError):
        parse_clopen("level=2; v0:x", odo)
