"""
Finite simple graphs, simplices and the link/star calculus.

A Graph is an immutable wrapper around a frozen networkx graph whose vertices
are non-negative integer ids. Cliques are treated as simplices (flag complex
convention), and hop distances are stored in float64 numpy arrays so that
disconnected pairs carry an explicit infinity rather than a sentinel integer.
"""

import logging
from functools import cached_property
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx
import numpy as np

from .errors import SizeGuardError

logger = logging.getLogger(__name__)

INFINITY = float("inf")

Edge = Tuple[int, int]


class Simplex(tuple):
    """A clique stored as a strictly increasing tuple of vertex ids."""

    __slots__ = ()

    def __new__(cls, vertices: Iterable[int] = ()):
        return super().__new__(cls, sorted({int(v) for v in vertices}))

    @property
    def vertex_set(self) -> FrozenSet[int]:
        return frozenset(self)

    def __repr__(self) -> str:
        return "{" + ",".join(str(v) for v in self) + "}"


def _check_vertex_id(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
        raise ValueError(f"vertex ids must be non-negative integers, got {v!r}")
    return int(v)


class Graph:
    """
    Finite simple undirected graph with stable integer vertex ids.

    Equality is id-preserving: two graphs are equal when they have the same
    vertex ids and the same edges. Labels are opaque tags and do not take
    part in equality.
    """

    def __init__(
        self,
        vertices: Iterable[int] = (),
        edges: Iterable[Edge] = (),
        labels: Optional[Mapping[int, str]] = None,
    ):
        g = nx.Graph()
        for v in vertices:
            v = _check_vertex_id(v)
            if v in g:
                raise ValueError(f"duplicate vertex id {v}")
            g.add_node(v)
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if a not in g or b not in g:
                raise ValueError(f"edge ({a}, {b}) has an unknown endpoint")
            g.add_edge(a, b)

        self._labels: Dict[int, str] = {}
        for v, label in (labels or {}).items():
            if v not in g:
                raise ValueError(f"label given for unknown vertex {v}")
            if label is not None:
                self._labels[int(v)] = str(label)

        self._nx = nx.freeze(g)
        self._simplices: Optional[Tuple[Simplex, ...]] = None
        self._maximal: Optional[Tuple[Simplex, ...]] = None

    @classmethod
    def from_networkx(
        cls, g: nx.Graph, labels: Optional[Mapping[int, str]] = None
    ) -> "Graph":
        """Wrap an integer-labelled networkx graph."""
        return cls(g.nodes, g.edges, labels)

    @property
    def nx(self) -> nx.Graph:
        """Frozen networkx view, for algorithms that want one."""
        return self._nx

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self._nx.nodes))

    @cached_property
    def vertex_set(self) -> FrozenSet[int]:
        return frozenset(self._nx.nodes)

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted((min(a, b), max(a, b)) for a, b in self._nx.edges))

    @cached_property
    def index(self) -> Dict[int, int]:
        """Row of each vertex in distance_matrix."""
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _adjacency(self) -> Dict[int, FrozenSet[int]]:
        return {v: frozenset(self._nx[v]) for v in self._nx.nodes}

    @property
    def labels(self) -> Dict[int, str]:
        return dict(self._labels)

    def label(self, v: int) -> Optional[str]:
        return self._labels.get(v)

    def neighbors(self, v: int) -> FrozenSet[int]:
        try:
            return self._adjacency[v]
        except KeyError:
            raise ValueError(f"unknown vertex id {v}")

    def has_edge(self, a: int, b: int) -> bool:
        return self._nx.has_edge(a, b)

    def number_of_edges(self) -> int:
        return self._nx.number_of_edges()

    def __contains__(self, v) -> bool:
        return v in self._nx

    def __len__(self) -> int:
        return self._nx.number_of_nodes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(vertices={len(self)}, edges={self.number_of_edges()})"

    @cached_property
    def distances(self) -> np.ndarray:
        n = len(self)
        matrix = np.full((n, n), INFINITY)
        index = self.index
        for source in self.vertices:
            reached = nx.single_source_shortest_path_length(self._nx, source)
            cols = np.fromiter((index[t] for t in reached), dtype=np.intp)
            matrix[index[source], cols] = np.fromiter(reached.values(), dtype=float)
        matrix.setflags(write=False)
        logger.debug("distance matrix computed for %d vertices", n)
        return matrix


def distance_matrix(g: Graph) -> np.ndarray:
    """
    All-pairs hop distances, rows and columns in ascending vertex id order.

    The array is read-only and computed once per graph. Disconnected pairs
    hold INFINITY.
    """
    return g.distances


def distances_among(g: Graph, ids: Sequence[int]) -> np.ndarray:
    """
    Distance submatrix on ids, in the given order.

    Reuses the full matrix when it has already been computed, otherwise runs
    one BFS per listed vertex.
    """
    if "distances" in g.__dict__:
        rows = [g.index[v] for v in ids]
        return g.distances[np.ix_(rows, rows)]
    position = {v: i for i, v in enumerate(ids)}
    out = np.full((len(ids), len(ids)), INFINITY)
    for i, v in enumerate(ids):
        for t, d in nx.single_source_shortest_path_length(g.nx, v).items():
            j = position.get(t)
            if j is not None:
                out[i, j] = d
    return out


def bfs_distances(g: Graph, sources: Iterable[int]) -> Dict[int, int]:
    """Hop distance from the nearest source to every reachable vertex."""
    sources = list(sources)
    for s in sources:
        if s not in g:
            raise ValueError(f"unknown vertex id {s}")
    if not sources:
        return {}
    dist = {}
    for depth, layer in enumerate(nx.bfs_layers(g.nx, sources)):
        for v in layer:
            dist[v] = depth
    return dist


def components(g: Graph) -> List[FrozenSet[int]]:
    """Connected components ordered by least vertex id."""
    return sorted(
        (frozenset(c) for c in nx.connected_components(g.nx)), key=min
    )


def diameter(g: Graph) -> float:
    """Largest finite distance; 0 for graphs with fewer than two vertices."""
    d = distance_matrix(g)
    finite = d[np.isfinite(d)]
    return float(finite.max()) if finite.size else 0.0


def _check_known(g: Graph, vs: Iterable[int]) -> FrozenSet[int]:
    vs = frozenset(vs)
    unknown = vs - g.vertex_set
    if unknown:
        raise ValueError(f"unknown vertex ids {sorted(unknown)}")
    return vs


def is_simplex(g: Graph, vs: Iterable[int]) -> bool:
    vs = list(vs)
    if any(v not in g for v in vs):
        return False
    return all(
        g.has_edge(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs))
    )


def link_of_set(g: Graph, vs: Iterable[int]) -> FrozenSet[int]:
    """Vertices adjacent to every vertex of vs; all vertices when vs is empty."""
    vs = _check_known(g, vs)
    if not vs:
        return g.vertex_set
    it = iter(vs)
    common = set(g.neighbors(next(it)))
    for v in it:
        common &= g.neighbors(v)
    return frozenset(common - vs)


def link(g: Graph, s: Iterable[int]) -> FrozenSet[int]:
    s = tuple(s)
    if not is_simplex(g, s):
        raise ValueError(f"{Simplex(s)!r} is not a simplex of the graph")
    return link_of_set(g, s)


def star(g: Graph, s: Iterable[int]) -> FrozenSet[int]:
    s = tuple(s)
    return link(g, s) | frozenset(s)


def maximal_simplices(g: Graph) -> List[Simplex]:
    """
    Inclusion-maximal cliques in canonical order.

    Uses networkx's pivoting Bron-Kerbosch enumeration; each clique is sorted
    and the list is sorted lexicographically, so W-vertex indices derived
    from it are stable across runs. The empty graph has the empty simplex as
    its only maximal simplex.
    """
    if g._maximal is None:
        if len(g) == 0:
            g._maximal = (Simplex(),)
        else:
            g._maximal = tuple(sorted(Simplex(c) for c in nx.find_cliques(g.nx)))
    return list(g._maximal)


def all_simplices(g: Graph, limit: Optional[int] = None) -> List[Simplex]:
    """
    Every clique of g including the empty simplex, ordered by size then
    lexicographically.

    Raises:
        SizeGuardError: if more than `limit` simplices exist
    """
    if g._simplices is None:
        found = [Simplex()]
        for clique in nx.enumerate_all_cliques(g.nx):
            found.append(Simplex(clique))
            if limit is not None and len(found) > limit:
                raise SizeGuardError(
                    f"graph has more than {limit} simplices; raise the limit to scan it"
                )
        found.sort(key=lambda s: (len(s), s))
        g._simplices = tuple(found)
    elif limit is not None and len(g._simplices) > limit:
        raise SizeGuardError(
            f"graph has {len(g._simplices)} simplices, above the limit of {limit}"
        )
    return list(g._simplices)


def induced(g: Graph, vs: Iterable[int]) -> Graph:
    """Full subgraph on vs, keeping ids and labels."""
    vs = _check_known(g, vs)
    sub = g.nx.subgraph(vs)
    labels = {v: g.label(v) for v in vs if g.label(v) is not None}
    return Graph(sorted(vs), sub.edges, labels)


def is_join(g: Graph, a: Iterable[int], b: Iterable[int]) -> bool:
    a = _check_known(g, a)
    b = _check_known(g, b)
    if a & b:
        raise ValueError(f"join sides overlap in {sorted(a & b)}")
    return all(b <= g.neighbors(x) for x in a)


def relabel(g: Graph, mapping: Mapping[int, int]) -> Graph:
    """Rename vertices through an injective map defined on every vertex."""
    missing = g.vertex_set - set(mapping)
    if missing:
        raise ValueError(f"relabelling is not defined on {sorted(missing)}")
    if len({mapping[v] for v in g.vertices}) != len(g):
        raise ValueError("relabelling is not injective")
    return Graph(
        (mapping[v] for v in g.vertices),
        ((mapping[a], mapping[b]) for a, b in g.edges),
        {mapping[v]: label for v, label in g.labels.items()},
    )

