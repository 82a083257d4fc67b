"""Test the graph, blowup data and XW text formats and the dot exporter."""

import pytest

from cuspedkit.blowup import build_blowup
from cuspedkit.chhs import XWPair
from cuspedkit.errors import GraphFormatError
from cuspedkit.formats import (
    depth_from_label,
    format_blowup_data,
    format_graph,
    format_xw,
    parse_blowup_data,
    parse_graph,
    parse_xw,
    to_dot,
)
from cuspedkit.graph import Graph

from .conftest import A, B, C, U, V, toy_data

TOY_XW = """\
v 0 u
v 1 v
v 2 a
v 3 b
v 4 c
e 0 1
e 0 2
e 0 3
e 0 4
e 1 2
e 1 3
e 1 4
e 2 4
e 3 4
cone 0 2 3
cone 1 4
wsimp 0 1 2 4
wsimp 0 1 3 4
"""


def test_parse_graph_is_canonical():
    """Test that records in any order come back sorted, comments dropped."""
    text = "# a path\nv 2\nv 0 start here\n\nv 1\ne 2 1\ne 0 1\n"
    g = parse_graph(text)
    assert g.vertices == (0, 1, 2)
    assert g.edges == ((0, 1), (1, 2))
    assert g.label(0) == "start here"
    assert format_graph(g) == "v 0 start here\nv 1\nv 2\ne 0 1\ne 1 2\n"
    assert parse_graph(format_graph(g)) == g


def test_parse_empty_graph():
    assert len(parse_graph("# nothing\n")) == 0
    assert format_graph(Graph()) == "\n"


@pytest.mark.parametrize(
    "text, message",
    [
        ("x 1\n", "line 1: unknown record 'x'"),
        ("v 0\nv 0\n", "line 2: duplicate vertex 0"),
        ("v 0\nv 1\ne 0 1\ne 1 0\n", "line 4: duplicate edge 1 0"),
        ("v 0\ne 0 0\n", "line 2: self-loop at vertex 0"),
        ("v 0\n\ne 0 1\n", "line 3: edge endpoint 1 is not a declared vertex"),
        ("v -1\n", "line 1: vertex ids must be non-negative integers, got '-1'"),
        ("v ²\n", "line 1: vertex ids must be non-negative integers, got '²'"),
        ("v 0\nv ٣\n", "line 2: vertex ids must be non-negative integers, got '٣'"),
        ("v 0\nv 1\ne 0\n", "line 3: record 'e' needs at least 2 fields"),
        ("v 0\nv 1\nv 2\ne 0 1 2\n", "line 4: edge records take exactly two ids"),
    ],
)
def test_parse_graph_errors(text, message):
    with pytest.raises(GraphFormatError) as excinfo:
        parse_graph(text)
    assert str(excinfo.value) == message


def test_graph_format_error_carries_the_line():
    with pytest.raises(GraphFormatError) as excinfo:
        parse_graph("v 0\nv 0\n")
    assert excinfo.value.line == 2
    assert isinstance(excinfo.value, ValueError)


def test_blowup_data_round_trip():
    text = "v 0 u\nv 1 v\ne 0 1\nbase 0 a b\nbase 1 c\n"
    data = parse_blowup_data(text)
    assert data.bases == {U: ["a", "b"], V: ["c"]}
    assert format_blowup_data(data) == text
    assert build_blowup(data).graph == build_blowup(toy_data()).graph


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("v 0\nv 1\ne 0 1\nbase 0 a\n", "without a base record"),
        ("v 0\nbase 0 a\nbase 0 b\n", "line 3: second base record"),
        ("v 0\nbase 0 a\nbase 4 b\n", "line 3: base given for unknown support vertex 4"),
        ("v 0\nbase 0\n", "base set of support vertex 0 is empty"),
    ],
)
def test_blowup_data_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        parse_blowup_data(text)


def test_blowup_data_allows_empty_bases_on_request():
    data = parse_blowup_data("v 0\nbase 0\n", allow_empty_bases=True)
    assert data.bases == {0: []}


def test_format_xw_of_toy(toy_xw):
    assert format_xw(toy_xw) == TOY_XW


def test_parse_xw_restores_the_blowup(toy_xw):
    """Test that cone records survive a pipe: the parsed pair is a blowup again."""
    w = toy_xw.maxsimps
    text = TOY_XW + "wedge 0 1\n"
    p = parse_xw(text)
    assert p.blowup is not None
    assert p.blowup.base_of(U) == {A, B}
    assert p.blowup.base_of(V) == {C}
    assert p.maxsimps == w
    assert p.w_edges == {(0, 1)}
    assert format_xw(p) == text


def test_parse_xw_without_cones_or_wsimps():
    p = parse_xw("v 0\nv 1\nv 2\ne 0 1\ne 1 2\nwedge 0 1\n")
    assert p.blowup is None
    assert p.maxsimps == ((0, 1), (1, 2))
    assert p.w_edges == {(0, 1)}


@pytest.mark.parametrize(
    "extra, fragment",
    [
        ("wedge 1 0\n", "line 19: wedge indices must satisfy i < j"),
        ("wedge 0 1\nwedge 0 1\n", "line 20: duplicate wedge 0 1"),
        ("wedge 0 1 1\n", "line 19: wedge records take exactly two indices"),
        ("wedge 0 7\n", "out of range for 2 simplices"),
        ("cone 0 2\n", "line 19: second cone record for apex 0"),
    ],
)
def test_parse_xw_errors(extra, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        parse_xw(TOY_XW + extra)


def test_parse_xw_rejects_wsimps_out_of_order():
    text = TOY_XW.replace("wsimp 0 1 2 4\nwsimp 0 1 3 4\n", "wsimp 0 1 3 4\nwsimp 0 1 2 4\n")
    with pytest.raises(GraphFormatError):
        parse_xw(text)


def test_parse_xw_rejects_cones_that_miss_vertices():
    with pytest.raises(GraphFormatError, match="cone records miss vertices"):
        parse_xw(TOY_XW.replace("cone 1 4\n", ""))


def test_parse_xw_rejects_edges_outside_the_blowup():
    with pytest.raises(GraphFormatError, match="do not form the blowup"):
        parse_xw(TOY_XW.replace("e 2 4\n", ""))


@pytest.mark.parametrize(
    "label, depth",
    [
        ("a@2", 2),
        ("aB@10", 10),
        ("a", 0),
        (None, 0),
        ("x@y", 0),
        ("a@²", 0),
    ],
)
def test_depth_from_label(label, depth):
    assert depth_from_label(label) == depth


def test_to_dot_groups_depths_from_labels():
    g = Graph([0, 1, 2], [(0, 1), (1, 2)], {0: "a", 1: "a@1", 2: 'say "b"'})
    dot = to_dot(g).splitlines()
    assert dot[0] == "graph G {"
    assert dot[-1] == "}"
    assert "  subgraph depth_0 {" in dot
    assert "  subgraph depth_1 {" in dot
    assert "    rank=same;" in dot
    assert '    1 [label="a@1"];' in dot
    assert '    2 [label="say \\"b\\""];' in dot
    assert "  0 -- 1;" in dot
    assert dot.index("  subgraph depth_1 {") > dot.index('    2 [label="say \\"b\\""];')


def test_to_dot_with_explicit_depths():
    g = Graph([0, 1], [(0, 1)])
    dot = to_dot(g, depth_of={0: 3, 1: 0}, name="H")
    assert dot.startswith("graph H {\n  subgraph depth_0 {\n    rank=same;\n    1;\n")
    assert "  subgraph depth_3 {" in dot


def test_xw_pair_from_formats_drives_checks(toy_xw):
    """Test that a pair read back from text equals the one built in memory."""
    p = parse_xw(format_xw(XWPair(toy_xw.blowup, [(0, 1)])))
    assert p.x == toy_xw.x
    assert p.w_graph.edges == ((0, 1),)
