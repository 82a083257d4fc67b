"""Exhaustive acceptance runs over generated families. Deselected by default; run with -m slow."""

import pytest

from cuspedkit.blowup import decompose_link, has_cleanish
from cuspedkit.chhs import check_axioms, complexity
from cuspedkit.cusped import (
    AUTO,
    build_cusped,
    check_blowup_type_2qi,
    check_w_coarse_embedding,
    run_cusped_checks,
)
from cuspedkit.generators import (
    check_augmented_iso,
    cycle_graph,
    gen_random_blowup,
    gen_random_graph,
    gen_relhyp,
    grid_graph,
    path_graph,
)
from cuspedkit.graph import all_simplices, link_of_set
from cuspedkit.horoball import build_horoball, check_horoball_lower_bound, default_cap
from cuspedkit.hyperbolicity import four_point_delta
from cuspedkit.models import Verdict

pytestmark = pytest.mark.slow


def horoball_bases():
    yield "P64", path_graph(64)
    yield "C64", cycle_graph(64)
    yield "grid8", grid_graph(8)
    for seed in range(50):
        yield f"gnp-{seed}", gen_random_graph(24, 0.15, seed)


def test_horoball_lower_bound_on_families():
    for name, base in horoball_bases():
        result = check_horoball_lower_bound(build_horoball(base, default_cap(base)))
        assert result.verdict is not Verdict.FAIL, (name, result.line())


def test_horoball_delta_stays_in_a_narrow_band():
    """Test that four-point delta of Hor(P_k) barely moves and never grows as k doubles."""
    deltas = []
    for k in (8, 16, 32, 64, 128):
        base = path_graph(k)
        deltas.append(four_point_delta(build_horoball(base, default_cap(base)).graph, jobs=4).delta)
    assert max(deltas) - min(deltas) <= 1
    assert all(later <= earlier for earlier, later in zip(deltas, deltas[1:])), deltas


@pytest.mark.parametrize("radius", [2, 3])
def test_cusped_space_is_the_augmented_space(radius):
    result = check_augmented_iso(gen_relhyp(radius), AUTO)
    assert result.verdict is Verdict.PASS


def test_w_embeds_in_the_cusped_w_on_inner_vertices():
    instance = gen_relhyp(3)
    c = build_cusped(instance.xw)
    result = check_w_coarse_embedding(c, among=instance.inner_w_indices())
    assert result.verdict is not Verdict.FAIL, result.line()


@pytest.mark.parametrize("radius", [2, 3, 4])
def test_relhyp_complexity_is_three(radius):
    p = gen_relhyp(radius).xw
    assert complexity(p) == 3
    assert check_axioms(p, relative=True, axioms=[1]).complexity_n == 3


def test_structural_lemmas_on_random_blowups():
    for seed in range(100):
        p = gen_random_blowup(seed, support_size=2 + seed % 4, base_max=2, w_density=0.6)
        for s in all_simplices(p.x)[1:]:
            parts = decompose_link(p.blowup, s)
            assert parts.preimage.union(*parts.cone_parts.values()) == link_of_set(p.x, s)
        c = build_cusped(p)
        for result in run_cusped_checks(c):
            assert result.ok, (seed, result.line())


def test_cleanish_is_preserved_by_blowups():
    for seed in range(50):
        kind = "cycle" if seed % 2 else "tree"
        p = gen_random_blowup(seed, support_size=5, base_max=2, kind=kind)
        assert has_cleanish(p.x).verdict is Verdict.PASS, seed


def test_blowup_type_classes_are_2_quasi_isometric():
    for seed in range(20):
        p = gen_random_blowup(seed, support_size=3, base_max=2, w_density=0.8)
        result = check_blowup_type_2qi(build_cusped(p))
        assert result.verdict is not Verdict.FAIL, (seed, result.line())


def test_deleting_a_w_edge_is_detected():
    """Test that a single missing W-edge trips axiom 5 or the augmented-space comparison."""
    instance = gen_relhyp(3)
    for edge in sorted(instance.xw.w_edges)[:5]:
        mutated = instance.xw.without_w_edge(*edge)
        axiom5 = check_axioms(mutated, axioms=[5]).verdict(5)
        iso = check_augmented_iso(instance, 2, xw=mutated).verdict
        assert Verdict.FAIL in (axiom5, iso), edge
