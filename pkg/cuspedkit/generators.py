"""
Reproducible instance families.

The centrepiece is the free group F₂ = ⟨a, b⟩ relative to the cyclic
subgroup ⟨a⟩, truncated to a ball of radius R: its (X, W) pair, and the
augmented space built directly from the Cayley ball for cross-checking the
cusped-space construction. Random blowups and a few named base graphs feed
the property tests.
"""

import logging
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .blowup import BlowupData, build_blowup
from .chhs import XWPair
from .config import DEFAULT_LIMITS, Limits
from .cusped import AUTO, CuspedPair, build_cusped, required_cap
from .graph import Graph, Simplex, induced, maximal_simplices
from .horoball import build_horoball
from .models import CheckResult, Verdict

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

# a, A = a⁻¹, b, B = b⁻¹ in shortlex order
LETTERS = (1, -1, 2, -2)
LETTER_NAMES = {1: "a", -1: "A", 2: "b", -2: "B"}
IDENTITY_LABEL = "e"


def reduce_word(word: Sequence[int]) -> Word:
    """Freely reduce a word over the letters ±1, ±2."""
    out: List[int] = []
    for letter in word:
        if letter not in LETTER_NAMES:
            raise ValueError(f"unknown letter {letter!r}")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def word_label(word: Word) -> str:
    return "".join(LETTER_NAMES[x] for x in word) or IDENTITY_LABEL


def parse_word(label: str) -> Word:
    if label == IDENTITY_LABEL:
        return ()
    names = {v: k for k, v in LETTER_NAMES.items()}
    try:
        return reduce_word([names[ch] for ch in label])
    except KeyError:
        raise ValueError(f"not a word over a, A, b, B: {label!r}")


def shortlex_key(word: Word) -> Tuple[int, Tuple[int, ...]]:
    return len(word), tuple(LETTERS.index(x) for x in word)


def free_group_ball(radius: int) -> Tuple[Graph, List[Word]]:
    """
    Cayley ball of F₂ with generators a, b.

    Returns:
        The ball graph, vertex i standing for words[i] (shortlex order), and
        the word list; edges join w and w·s for every generator s
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    words: List[Word] = [()]
    frontier: List[Word] = [()]
    for _ in range(radius):
        frontier = [
            w + (s,) for w in frontier for s in LETTERS if not w or w[-1] != -s
        ]
        words.extend(frontier)
    words.sort(key=shortlex_key)
    index = {w: i for i, w in enumerate(words)}
    edges = [
        (index[w], index[w + (s,)])
        for w in words
        for s in LETTERS
        if (not w or w[-1] != -s) and w + (s,) in index
    ]
    labels = {i: word_label(w) for i, w in enumerate(words)}
    return Graph(range(len(words)), edges, labels), words


def coset_representative(word: Word) -> Word:
    """Shortest element of the left coset word·⟨a⟩."""
    end = len(word)
    while end and abs(word[end - 1]) == 1:
        end -= 1
    return word[:end]


class RelHypInstance(NamedTuple):
    """
    F₂ relative to ⟨a⟩ at a finite radius.

    Attributes:
        radius: Ball radius R
        margin: Boundary margin; inner holds words of length <= R - margin
        ball: Cayley ball, vertex ids in shortlex order
        words: Word of each ball vertex
        cosets: Traces of the ⟨a⟩-cosets, by shortlex order of representative
        inner: Ball vertices away from the boundary
        xw: The (X, W) pair; support vertices are cosets, bases are traces
        vertex_of: X base vertex of each ball vertex
        element_of: Ball vertex of each X base vertex
    """

    radius: int
    margin: int
    ball: Graph
    words: List[Word]
    cosets: List[FrozenSet[int]]
    inner: FrozenSet[int]
    xw: XWPair
    vertex_of: Dict[int, int]
    element_of: Dict[int, int]

    def inner_w_indices(self) -> List[int]:
        """W-vertices {gP, x} with x in the inner set."""
        found = []
        for i, s in enumerate(self.xw.maxsimps):
            if any(self.element_of.get(v) in self.inner for v in s):
                found.append(i)
        return found


def gen_relhyp(
    radius: int = 2, margin: int = 1, limits: Limits = DEFAULT_LIMITS
) -> RelHypInstance:
    """
    Build the relatively hyperbolic toy pair for F₂ relative to ⟨a⟩.

    X is the blowup of the discrete graph on coset traces, with the trace as
    base; maximal simplices are pairs {gP, x}; {gP, x} and {g'P', x'} are
    W-adjacent iff x and x' are Cayley-adjacent.
    """
    if radius < 2:
        raise ValueError(f"radius must be at least 2, got {radius}")
    if not 1 <= margin < radius:
        raise ValueError(f"margin must satisfy 1 <= margin < radius, got {margin}")
    ball, words = free_group_ball(radius)
    grouped: Dict[Word, List[int]] = {}
    for i, w in enumerate(words):
        grouped.setdefault(coset_representative(w), []).append(i)
    reps = sorted(grouped, key=shortlex_key)
    cosets = [frozenset(grouped[r]) for r in reps]

    support = Graph(range(len(reps)), (), {k: word_label(r) + "P" for k, r in enumerate(reps)})
    bases = {k: [word_label(words[i]) for i in sorted(grouped[r])] for k, r in enumerate(reps)}
    x = build_blowup(BlowupData(support=support, bases=bases))

    by_label = {x.graph.label(v): v for v in x.graph.vertices if not x.is_apex(v)}
    vertex_of = {i: by_label[word_label(w)] for i, w in enumerate(words)}
    element_of = {v: i for i, v in vertex_of.items()}
    coset_of = {i: k for k, members in enumerate(cosets) for i in members}

    def simplex_of(i: int) -> Simplex:
        return Simplex((coset_of[i], vertex_of[i]))

    canonical = maximal_simplices(x.graph)
    index = {s: j for j, s in enumerate(canonical)}
    w_edges = [(index[simplex_of(a)], index[simplex_of(b)]) for a, b in ball.edges]
    xw = XWPair(x, w_edges, limits=limits)

    inner = frozenset(i for i, w in enumerate(words) if len(w) <= radius - margin)
    logger.info(
        "relhyp radius %d: %d ball vertices, %d cosets, %d W-edges",
        radius,
        len(words),
        len(cosets),
        len(xw.w_edges),
    )
    return RelHypInstance(
        radius=radius,
        margin=margin,
        ball=ball,
        words=words,
        cosets=cosets,
        inner=inner,
        xw=xw,
        vertex_of=vertex_of,
        element_of=element_of,
    )


def _depth_label(word_label_: str, n: int) -> str:
    return word_label_ if n == 0 else f"{word_label_}@{n}"


def _label_key(label: str) -> Tuple[str, int]:
    word, _, depth = label.partition("@")
    return word, int(depth) if depth else 0


def gen_augmented_direct(instance: RelHypInstance, cap: int) -> Graph:
    """
    The ball with a combinatorial horoball glued on every coset trace.

    Depth-0 vertices are the ball vertices; deeper copies get fresh ids and
    labels "word@n".
    """
    ball = instance.ball
    next_id = len(ball)
    edges = list(ball.edges)
    labels = ball.labels
    for trace in instance.cosets:
        h = build_horoball(induced(ball, trace), cap)
        ids = {}
        for v, n in h.depth_of.items():
            if n == 0:
                ids[v] = v
            else:
                ids[v] = next_id
                labels[next_id] = _depth_label(ball.label(h.origin_of[v]), n)
                next_id += 1
        edges.extend(
            (ids[a], ids[b])
            for a, b in h.graph.edges
            if h.depth_of[a] > 0 or h.depth_of[b] > 0
        )
    return Graph(range(next_id), edges, labels)


def _what_keys(c: CuspedPair) -> Dict[int, Tuple[str, int]]:
    keys = {}
    for i, s in enumerate(c.what.maxsimps):
        point = next(v for v in s if not c.xhat.is_apex(v))
        keys[i] = (c.source.x.label(c.down_of[point]), c.depth_of[point])
    return keys


def check_augmented_iso(
    instance: RelHypInstance,
    cap: Union[int, str] = AUTO,
    xw: Optional[XWPair] = None,
) -> CheckResult:
    """
    Compare Ŵ with the directly built augmented space.

    The bijection sends the Ŵ-vertex {gP, x at depth n} to (x, n). Passing
    `xw` replaces the instance's pair, e.g. by a mutated copy.
    """
    xw = xw or instance.xw
    if cap == AUTO:
        cap = required_cap(xw)
    c = build_cusped(xw, int(cap), shallow=True)
    direct = gen_augmented_direct(instance, int(cap))

    keys = _what_keys(c)
    what_edges = {frozenset((keys[i], keys[j])) for i, j in c.what.w_edges}
    direct_keys = {v: _label_key(direct.label(v)) for v in direct.vertices}
    direct_edges = {frozenset((direct_keys[a], direct_keys[b])) for a, b in direct.edges}
    constants = {"vertices": len(direct), "edges": len(direct_edges), "cap": int(cap)}

    if set(keys.values()) != set(direct_keys.values()):
        return CheckResult(
            name="augmented_iso", verdict=Verdict.FAIL, detail="vertex sets differ", constants=constants
        )
    differing = sorted(tuple(sorted(e)) for e in what_edges ^ direct_edges)
    if differing:
        (w1, n1), (w2, n2) = differing[0]
        return CheckResult(
            name="augmented_iso",
            verdict=Verdict.FAIL,
            witness=f"edge={_depth_label(w1, n1)},{_depth_label(w2, n2)}",
            constants=constants,
        )
    return CheckResult(name="augmented_iso", verdict=Verdict.PASS, constants=constants)


SUPPORT_KINDS = ("tree", "cycle")


def _random_support(rng: np.random.Generator, size: int, kind: str) -> Graph:
    if kind == "tree":
        edges = [(int(rng.integers(0, v)), v) for v in range(1, size)]
    elif kind == "cycle":
        if size < 5:
            raise ValueError(f"cycle supports need at least 5 vertices, got {size}")
        edges = [(v, (v + 1) % size) for v in range(size)]
    else:
        raise ValueError(f"Unknown support kind: {kind}. Available: {list(SUPPORT_KINDS)}")
    return Graph(range(size), edges)


def gen_random_blowup(
    seed: int,
    support_size: int = 5,
    base_max: int = 2,
    w_density: float = 0.5,
    kind: str = "tree",
    limits: Limits = DEFAULT_LIMITS,
) -> XWPair:
    """
    Random blowup of a triangle- and square-free support with sampled W-edges.

    The support is a random recursive tree or a cycle of length >= 5. W-edges
    are drawn only between maximal simplices sharing a codimension-1 face,
    each with probability `w_density`. The result depends on the arguments
    alone.
    """
    if support_size < 1:
        raise ValueError(f"support_size must be positive, got {support_size}")
    if base_max < 1:
        raise ValueError(f"base_max must be positive, got {base_max}")
    if not 0.0 <= w_density <= 1.0:
        raise ValueError(f"w_density must lie in [0, 1], got {w_density}")
    rng = np.random.default_rng(seed)
    support = _random_support(rng, support_size, kind)
    bases = {
        v: [f"p{v}_{k}" for k in range(int(rng.integers(1, base_max + 1)))]
        for v in support.vertices
    }
    x = build_blowup(BlowupData(support=support, bases=bases))

    maxsimps = maximal_simplices(x.graph)
    w_edges = []
    for i in range(len(maxsimps)):
        first = frozenset(maxsimps[i])
        for j in range(i + 1, len(maxsimps)):
            second = frozenset(maxsimps[j])
            if len(first & second) == len(first) - 1 == len(second) - 1:
                if rng.random() < w_density:
                    w_edges.append((i, j))
    logger.debug("random blowup seed %d: %d W-edges", seed, len(w_edges))
    return XWPair(x, w_edges, limits=limits)


def gen_random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p) with integer ids 0..n-1."""
    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def path_graph(size: int) -> Graph:
    return Graph.from_networkx(nx.path_graph(size))


def cycle_graph(size: int) -> Graph:
    if size < 3:
        raise ValueError(f"cycles need at least 3 vertices, got {size}")
    return Graph.from_networkx(nx.cycle_graph(size))


def grid_graph(size: int) -> Graph:
    """size × size grid, vertex r*size + c at row r, column c."""
    g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(size, size), ordering="sorted")
    return Graph.from_networkx(g)


def quasiline_graph(size: int) -> Graph:
    """Path with extra chords between vertices at distance two."""
    g = nx.path_graph(size)
    g.add_edges_from((v, v + 2) for v in range(size - 2))
    return Graph.from_networkx(g)


FAMILIES = {
    "path": {
        "name": "Path",
        "description": "Path graph P_n",
        "generator": path_graph,
    },
    "cycle": {
        "name": "Cycle",
        "description": "Cycle graph C_n, n >= 3",
        "generator": cycle_graph,
    },
    "grid": {
        "name": "Grid",
        "description": "Square n x n grid",
        "generator": grid_graph,
    },
    "quasiline": {
        "name": "Quasiline",
        "description": "Path with distance-2 chords",
        "generator": quasiline_graph,
    },
}


def get_family(name: str) -> Dict[str, Any]:
    """Get graph family by name."""
    if name not in FAMILIES:
        raise ValueError(f"Unknown family: {name}. Available: {list(FAMILIES.keys())}")
    return FAMILIES[name]


def list_families() -> List[str]:
    return list(FAMILIES.keys())


def gen_family(kind: str, size: int) -> Graph:
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    return get_family(kind)["generator"](size)
