"""Test horoball construction and the distance lower bound."""

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from cuspedkit.generators import path_graph
from cuspedkit.graph import Graph, bfs_distances, distance_matrix, distances_among, induced
from cuspedkit.horoball import (
    MAX_CAP,
    build_horoball,
    check_horoball_lower_bound,
    default_cap,
    lower_bound,
    lower_bound_holds,
)
from cuspedkit.hyperbolicity import verify_coarse_embedding
from cuspedkit.models import Verdict

from .conftest import small_graphs


def test_single_vertex_horoball_is_a_ray():
    h = build_horoball(Graph([0]), 3)
    assert h.graph.vertices == (0, 1, 2, 3)
    assert h.graph.edges == ((0, 1), (1, 2), (2, 3))
    assert [h.depth_of[v] for v in h.graph.vertices] == [0, 1, 2, 3]
    assert h.graph.label(3) == "0@3"


def test_path_horoball_size_and_distance():
    """Test P5 at cap 2: fifteen vertices and d((0,0),(4,0)) = 4."""
    h = build_horoball(path_graph(5), 2)
    assert len(h.graph) == 15
    assert bfs_distances(h.graph, [h.vertex_at(0, 0)])[h.vertex_at(4, 0)] == 4


def test_horizontal_edges_follow_powers_of_two():
    h = build_horoball(path_graph(5), 2)
    assert h.graph.has_edge(h.vertex_at(0, 1), h.vertex_at(2, 1))
    assert not h.graph.has_edge(h.vertex_at(0, 1), h.vertex_at(3, 1))
    assert h.graph.has_edge(h.vertex_at(0, 2), h.vertex_at(4, 2))


def test_depth_zero_is_the_base():
    base = Graph.from_networkx(nx.cycle_graph(6))
    h = build_horoball(base, 2)
    assert induced(h.graph, h.level(0)) == base
    assert h.base == base.vertex_set
    assert all(h.origin_of[v] == v for v in base.vertices)


def test_deep_ids_start_above_the_base():
    h = build_horoball(Graph([3, 7]), 2)
    assert h.vertex_at(3, 0) == 3
    assert h.vertex_at(3, 1) == 8
    assert h.vertex_at(7, 2) == 11
    assert h.level(1) == [8, 10]


def test_disconnected_base_stays_disconnected():
    h = build_horoball(Graph([0, 1]), 4)
    assert not h.graph.has_edge(h.vertex_at(0, 4), h.vertex_at(1, 4))


def test_cap_bounds():
    with pytest.raises(ValueError):
        build_horoball(Graph([0]), -1)
    with pytest.raises(ValueError):
        build_horoball(Graph([0]), MAX_CAP + 1)
    with pytest.raises(ValueError):
        build_horoball(Graph([0]), 1).vertex_at(0, 2)


@pytest.mark.parametrize(
    "size, expected",
    [
        (1, 2),
        (2, 2),
        (3, 3),
        (9, 5),
        (64, 8),
    ],
)
def test_default_cap(size, expected):
    """Test ceil(log2(max(diam, 1))) + 2 on paths of diameter size - 1."""
    assert default_cap(path_graph(size)) == expected


def test_lower_bound_values():
    assert lower_bound(1) == 1.0
    assert lower_bound(8) == pytest.approx(3.0)
    assert lower_bound_holds(1, 1)
    assert lower_bound_holds(8, 3)
    assert not lower_bound_holds(9, 3)
    assert not lower_bound_holds(1, 0)


def test_lower_bound_on_long_path():
    """Test that P64 at the default cap passes with every pair certified."""
    base = path_graph(64)
    result = check_horoball_lower_bound(build_horoball(base, default_cap(base)))
    assert result.verdict is Verdict.PASS
    assert result.constants == {"pairs": 64 * 63 // 2, "uncertified": 0}
    assert result.line() == "CHECK lower_bound PASS"


def test_lower_bound_rejects_shallow_cap():
    base = path_graph(64)
    with pytest.raises(ValueError):
        check_horoball_lower_bound(build_horoball(base, 3))


@settings(max_examples=30, deadline=None)
@given(small_graphs(max_vertices=8))
def test_horoball_properties(g):
    """Test that depth 0 is the base, distances only shrink and the bound never fails."""
    h = build_horoball(g, default_cap(g))
    assert induced(h.graph, g.vertices) == g
    d_base = distance_matrix(g)
    for i, p in enumerate(g.vertices):
        reached = bfs_distances(h.graph, [p])
        for j, q in enumerate(g.vertices):
            assert reached.get(q, float("inf")) <= d_base[i, j]
    assert check_horoball_lower_bound(h).verdict is not Verdict.FAIL


def test_path_embeds_coarsely_in_its_horoball():
    base = path_graph(32)
    h = build_horoball(base, default_cap(base))
    check = verify_coarse_embedding(
        base, h.graph, {v: h.vertex_at(v, 0) for v in base.vertices}, lower_bound, lambda t: t
    )
    assert check.ok
    assert check.counterexample is None


def test_default_cap_does_not_truncate_geodesics():
    """Test that depth-0 distances in Hor(P32) are the same at the default cap and three deeper."""
    base = path_graph(32)
    cap = default_cap(base)
    assert cap == 7
    shallow = build_horoball(base, cap)
    deep = build_horoball(base, cap + 3)
    ids = list(base.vertices)
    assert np.array_equal(distances_among(shallow.graph, ids), distances_among(deep.graph, ids))
