"""Shared fixtures: the toy blowup and the F2 relative to <a> instances."""

import pytest
from hypothesis import strategies as st

from cuspedkit.blowup import BlowupData, build_blowup
from cuspedkit.chhs import XWPair
from cuspedkit.generators import gen_relhyp
from cuspedkit.graph import Graph

# toy blowup ids: support u=0, v=1; bases a=2, b=3 over u and c=4 over v
U, V, A, B, C = 0, 1, 2, 3, 4


def toy_data() -> BlowupData:
    return BlowupData(
        support=Graph([U, V], [(U, V)], {U: "u", V: "v"}),
        bases={U: ["a", "b"], V: ["c"]},
    )


@pytest.fixture
def toy_blowup():
    """Blowup of the edge {u, v} with L_u = {a, b} and L_v = {c}."""
    return build_blowup(toy_data())


@pytest.fixture
def toy_xw(toy_blowup):
    return XWPair(toy_blowup)


@pytest.fixture(scope="module")
def relhyp2():
    return gen_relhyp(radius=2)


@pytest.fixture(scope="module")
def relhyp3():
    return gen_relhyp(radius=3)


@st.composite
def small_graphs(draw: st.DrawFn, max_vertices: int = 12) -> Graph:
    """Random simple graphs with ids 0..n-1."""
    n = draw(st.integers(min_value=0, max_value=max_vertices))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(range(n), edges)
