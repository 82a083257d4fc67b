"""Test blowup construction, link decomposition and simplex classification."""

import pytest
from pydantic import ValidationError

from cuspedkit.blowup import (
    BlowupData,
    BlowupGraph,
    SimplexType,
    build_blowup,
    classify_simplex,
    decompose_link,
    has_cleanish,
    is_nontrivial_join,
    support_of,
)
from cuspedkit.generators import cycle_graph, gen_random_blowup, path_graph
from cuspedkit.graph import Graph, Simplex, all_simplices, link_of_set, maximal_simplices
from cuspedkit.models import Verdict

from .conftest import A, B, C, U, V


def broken_bipartite() -> Graph:
    return Graph(range(5), [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3)])


def test_toy_blowup_shape(toy_blowup):
    """Test the edge blowup: five vertices, nine edges and two maximal simplices."""
    x = toy_blowup.graph
    assert x.vertices == (U, V, A, B, C)
    assert x.number_of_edges() == 9
    assert not x.has_edge(A, B)
    assert maximal_simplices(x) == [Simplex([U, V, A, C]), Simplex([U, V, B, C])]
    assert [x.label(v) for v in x.vertices] == ["u", "v", "a", "b", "c"]


def test_toy_blowup_bookkeeping(toy_blowup):
    assert toy_blowup.base_of(U) == {A, B}
    assert toy_blowup.cone(V) == {V, C}
    assert toy_blowup.apex_of[B] == U
    assert toy_blowup.is_apex(V) and not toy_blowup.is_apex(C)
    assert toy_blowup.cone_vertex_for_link(frozenset({C})) == V
    assert toy_blowup.cone_vertex_for_link(frozenset({A})) is None
    assert not toy_blowup.tainted


def test_support_of(toy_blowup):
    assert support_of(toy_blowup, [A, C]) == Simplex([U, V])
    with pytest.raises(ValueError):
        support_of(toy_blowup, [A, B])


def test_blowup_data_validation():
    support = Graph([0, 1], [(0, 1)])
    with pytest.raises(ValidationError):
        BlowupData(support=support, bases={0: ["a"]})
    with pytest.raises(ValidationError):
        BlowupData(support=support, bases={0: ["a"], 1: ["b"], 2: ["c"]})
    with pytest.raises(ValidationError):
        BlowupData(support=support, bases={0: ["a", "a"], 1: ["b"]})
    with pytest.raises(ValidationError):
        BlowupData(support=support, bases={0: [], 1: ["b"]})


def test_empty_bases_taint_the_blowup():
    data = BlowupData(
        support=Graph([0, 1], [(0, 1)]), bases={0: [], 1: ["b"]}, allow_empty_bases=True
    )
    x = build_blowup(data)
    assert x.tainted
    assert x.base_of(0) == frozenset()


def test_from_cones_rejects_colliding_ids():
    with pytest.raises(ValueError):
        BlowupGraph.from_cones(Graph([0, 1]), {0: [2], 1: [2]})
    with pytest.raises(ValueError):
        BlowupGraph.from_cones(Graph([0, 1]), {0: [1]})


def test_maximal_simplices_lift_support_simplices():
    """Test that every maximal simplex is {v, p_v : v in a maximal support simplex}."""
    p = gen_random_blowup(seed=3, support_size=6, base_max=3)
    x = p.blowup
    count = 0
    for bar in maximal_simplices(x.support):
        size = 1
        for v in bar:
            size *= len(x.base_of(v))
        count += size
    assert len(p.maxsimps) == count
    for s in p.maxsimps:
        bar = support_of(x, s)
        assert bar in maximal_simplices(x.support)
        assert len(s) == 2 * len(bar)


def test_decompose_link_of_vertex_simplex(toy_blowup):
    """Test Lk({u, a}) = preimage of Lk(u) joined with an empty cone part."""
    parts = decompose_link(toy_blowup, [U, A])
    assert parts.preimage == {V, C}
    assert parts.cone_parts == {U: frozenset()}


def test_decompose_link_of_apex(toy_blowup):
    parts = decompose_link(toy_blowup, [V])
    assert parts.preimage == {U, A, B}
    assert parts.cone_parts == {V: frozenset({C})}


@pytest.mark.parametrize("seed", range(100))
def test_decompose_link_on_random_blowups(seed):
    """Test that the decomposition reassembles every link, over supports of up to eight vertices."""
    size = 1 + seed % 8
    kind = "cycle" if size >= 5 and seed % 2 else "tree"
    x = gen_random_blowup(seed=seed, support_size=size, base_max=3, kind=kind).blowup
    for s in all_simplices(x.graph)[1:]:
        parts = decompose_link(x, s)
        assembled = parts.preimage.union(*parts.cone_parts.values())
        assert assembled == link_of_set(x.graph, s)


def test_classify_simplex(toy_blowup):
    blowup_type = classify_simplex(toy_blowup, [U, A])
    assert blowup_type.kind is SimplexType.BLOWUP
    assert blowup_type.tags == {SimplexType.BLOWUP, SimplexType.BOUNDED}

    cone_type = classify_simplex(toy_blowup, [U, V, A])
    assert cone_type.kind is SimplexType.CONE
    assert SimplexType.CONE in cone_type.tags

    with pytest.raises(ValueError):
        classify_simplex(toy_blowup, [U, V, A, C])


def test_is_nontrivial_join():
    square = cycle_graph(4)
    assert is_nontrivial_join(square, [0, 1, 2, 3])
    assert is_nontrivial_join(path_graph(3), [0, 1, 2])
    assert not is_nontrivial_join(path_graph(4), [0, 1, 2, 3])
    assert not is_nontrivial_join(square, [0])


def test_cleanish_on_blowup(toy_blowup):
    result = has_cleanish(toy_blowup.graph)
    assert result.verdict is Verdict.PASS
    assert result.constants["simplices"] == len(all_simplices(toy_blowup.graph))


def test_cleanish_fails_on_broken_bipartite_graph():
    """Test K_{2,3} minus an edge: Lk(0) ∩ Lk(1) is two non-adjacent points and no link."""
    result = has_cleanish(broken_bipartite())
    assert result.verdict is Verdict.FAIL
    assert result.witness.startswith("sigma=")


def test_cleanish_worker_processes_agree():
    g = broken_bipartite()
    assert has_cleanish(g, jobs=3) == has_cleanish(g)
