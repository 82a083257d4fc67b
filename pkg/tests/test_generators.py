"""Test the F2 relative to <a> instances, random blowups and graph families."""

import networkx as nx
import pytest

from cuspedkit.blowup import has_cleanish
from cuspedkit.formats import format_xw
from cuspedkit.generators import (
    FAMILIES,
    check_augmented_iso,
    coset_representative,
    free_group_ball,
    gen_augmented_direct,
    gen_family,
    gen_random_blowup,
    gen_random_graph,
    gen_relhyp,
    get_family,
    list_families,
    parse_word,
    reduce_word,
    word_label,
)
from cuspedkit.graph import induced
from cuspedkit.models import Verdict


def test_reduce_word():
    assert reduce_word([1, -1, 2]) == (2,)
    assert reduce_word([2, 1, -1, -2]) == ()
    with pytest.raises(ValueError):
        reduce_word([3])


def test_word_labels():
    assert word_label(()) == "e"
    assert word_label((1, -2, -1)) == "aBA"
    assert parse_word("aBA") == (1, -2, -1)
    assert parse_word("aAb") == (2,)
    assert parse_word("e") == ()
    with pytest.raises(ValueError):
        parse_word("ac")


def test_coset_representative():
    assert coset_representative((2, 1, 1)) == (2,)
    assert coset_representative((1, 1)) == ()
    assert coset_representative((1, 2, -1)) == (1, 2)


@pytest.mark.parametrize("radius, size", [(0, 1), (1, 5), (2, 17), (3, 53)])
def test_free_group_ball_sizes(radius, size):
    """Test 1 + 4 * (3**R - 1) / 2 vertices, joined as a tree."""
    ball, words = free_group_ball(radius)
    assert len(ball) == len(words) == size
    assert nx.is_tree(ball.nx)
    assert ball.label(0) == "e"


def test_relhyp_radius_two(relhyp2):
    """Test 17 ball vertices split into nine coset traces."""
    assert len(relhyp2.ball) == 17
    assert len(relhyp2.cosets) == 9
    assert frozenset().union(*relhyp2.cosets) == frozenset(range(17))
    assert sum(len(t) for t in relhyp2.cosets) == 17
    assert relhyp2.inner == frozenset(i for i, w in enumerate(relhyp2.words) if len(w) <= 1)
    assert len(relhyp2.xw.maxsimps) == 17
    assert len(relhyp2.xw.w_edges) == relhyp2.ball.number_of_edges()
    assert relhyp2.xw.blowup.support.number_of_edges() == 0


def test_relhyp_traces_are_paths(relhyp3):
    """Test that the trace of <a> through e at radius 3 is a^-3 .. a^3."""
    trace = relhyp3.cosets[0]
    assert sorted(word_label(relhyp3.words[i]) for i in trace) == sorted(
        ["e", "a", "A", "aa", "AA", "aaa", "AAA"]
    )
    assert nx.is_isomorphic(induced(relhyp3.ball, trace).nx, nx.path_graph(7))
    for t in relhyp3.cosets:
        assert nx.is_isomorphic(induced(relhyp3.ball, t).nx, nx.path_graph(len(t)))


def test_relhyp_element_maps(relhyp2):
    for i in relhyp2.ball.vertices:
        v = relhyp2.vertex_of[i]
        assert relhyp2.element_of[v] == i
        assert relhyp2.xw.x.label(v) == word_label(relhyp2.words[i])


def test_relhyp_is_cleanish(relhyp2):
    assert has_cleanish(relhyp2.xw.x).verdict is Verdict.PASS


def test_relhyp_argument_errors():
    with pytest.raises(ValueError):
        gen_relhyp(radius=1)
    with pytest.raises(ValueError):
        gen_relhyp(radius=3, margin=0)
    with pytest.raises(ValueError):
        gen_relhyp(radius=3, margin=3)


def test_inner_w_indices(relhyp2):
    inner = relhyp2.inner_w_indices()
    assert len(inner) == len(relhyp2.inner) == 5


def test_augmented_direct_at_cap_zero_is_the_ball(relhyp2):
    assert gen_augmented_direct(relhyp2, 0) == relhyp2.ball


def test_augmented_direct_counts(relhyp2):
    """Test that every ball vertex gains exactly cap deeper copies."""
    direct = gen_augmented_direct(relhyp2, 2)
    assert len(direct) == 17 * 3
    assert direct.label(17) is not None and "@" in direct.label(17)
    assert induced(direct, relhyp2.ball.vertices) == relhyp2.ball


@pytest.mark.parametrize("cap", [2, "auto"])
def test_augmented_iso_radius_two(relhyp2, cap):
    result = check_augmented_iso(relhyp2, cap)
    assert result.verdict is Verdict.PASS
    assert result.constants["vertices"] == 17 * (result.constants["cap"] + 1)


def test_augmented_iso_detects_a_missing_w_edge(relhyp2):
    """Test that deleting one W-edge breaks the isomorphism with a named edge."""
    first = sorted(relhyp2.xw.w_edges)[0]
    result = check_augmented_iso(relhyp2, 2, xw=relhyp2.xw.without_w_edge(*first))
    assert result.verdict is Verdict.FAIL
    assert result.witness.startswith("edge=")


def test_random_blowup_is_deterministic():
    first = gen_random_blowup(seed=11, support_size=6, base_max=3)
    second = gen_random_blowup(seed=11, support_size=6, base_max=3)
    assert format_xw(first) == format_xw(second)


def test_random_blowup_without_w_edges():
    assert gen_random_blowup(seed=2, w_density=0.0).w_edges == set()


def test_random_cycle_blowup_counts():
    """Test that a C5 support gives sum over edges of |L_u| * |L_v| maximal simplices."""
    p = gen_random_blowup(seed=4, support_size=5, base_max=2, kind="cycle")
    x = p.blowup
    expected = sum(len(x.base_of(a)) * len(x.base_of(b)) for a, b in x.support.edges)
    assert len(p.maxsimps) == expected
    assert x.support.number_of_edges() == 5


def test_random_blowup_w_edges_share_a_face():
    p = gen_random_blowup(seed=8, support_size=5, base_max=3, w_density=1.0)
    for i, j in p.w_edges:
        first, second = set(p.maxsimps[i]), set(p.maxsimps[j])
        assert len(first & second) == len(first) - 1


def test_random_blowup_argument_errors():
    with pytest.raises(ValueError):
        gen_random_blowup(seed=0, support_size=0)
    with pytest.raises(ValueError):
        gen_random_blowup(seed=0, base_max=0)
    with pytest.raises(ValueError):
        gen_random_blowup(seed=0, w_density=1.5)
    with pytest.raises(ValueError):
        gen_random_blowup(seed=0, support_size=4, kind="cycle")
    with pytest.raises(ValueError):
        gen_random_blowup(seed=0, kind="star")


def test_random_graph_is_deterministic():
    assert gen_random_graph(24, 0.15, seed=3) == gen_random_graph(24, 0.15, seed=3)
    assert len(gen_random_graph(24, 0.15, seed=3)) == 24


@pytest.mark.parametrize(
    "kind, size, vertices, edges",
    [
        ("path", 5, 5, 4),
        ("cycle", 6, 6, 6),
        ("grid", 3, 9, 12),
        ("quasiline", 5, 5, 7),
    ],
)
def test_gen_family(kind, size, vertices, edges):
    g = gen_family(kind, size)
    assert len(g) == vertices
    assert g.number_of_edges() == edges


def test_family_registry():
    assert list_families() == list(FAMILIES)
    assert get_family("grid")["name"] == "Grid"
    with pytest.raises(ValueError, match="Unknown family"):
        get_family("torus")
    with pytest.raises(ValueError):
        gen_family("path", 0)
    with pytest.raises(ValueError):
        gen_family("cycle", 2)
