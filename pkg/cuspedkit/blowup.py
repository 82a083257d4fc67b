"""
Blowup graphs over a support graph.

Each support vertex v is replaced by the cone Cone(v) = {v} * L_v, whose base
points are pairwise non-adjacent, and the cones of adjacent apices span
complete joins. This module builds them, decomposes links along the
retraction to the support, classifies non-maximal simplices, and checks the
cleanish-intersection property.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from itertools import repeat
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import LemmaViolation
from .graph import (
    Graph,
    Simplex,
    all_simplices,
    induced,
    is_join,
    is_simplex,
    link,
    link_of_set,
)
from .models import CheckResult, Verdict

logger = logging.getLogger(__name__)


class BlowupData(BaseModel):
    """
    Input to build_blowup: a support graph and one base label list per vertex.

    Empty base lists are rejected unless `allow_empty_bases` is set; blowups
    built from such data are marked tainted.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    support: Graph
    bases: Dict[int, List[str]]
    allow_empty_bases: bool = False

    @model_validator(mode="after")
    def _check_bases(self) -> "BlowupData":
        vertices = self.support.vertex_set
        missing = vertices - set(self.bases)
        if missing:
            raise ValueError(f"support vertices without a base set: {sorted(missing)}")
        extra = set(self.bases) - vertices
        if extra:
            raise ValueError(f"base sets given for unknown support vertices: {sorted(extra)}")
        for v, labels in self.bases.items():
            if not labels and not self.allow_empty_bases:
                raise ValueError(f"base set of support vertex {v} is empty")
            if len(set(labels)) != len(labels):
                raise ValueError(f"base set of support vertex {v} repeats a label")
        return self


class BlowupGraph:
    """
    A blowup X of a support graph, with the retraction apex_of: X -> X̄.

    Apices keep their support ids, so apex_of is the identity on them.
    """

    def __init__(
        self,
        graph: Graph,
        support: Graph,
        cones: Mapping[int, Iterable[int]],
        data: Optional[BlowupData] = None,
    ):
        self.graph = graph
        self.support = support
        self.data = data
        self._bases: Dict[int, FrozenSet[int]] = {
            v: frozenset(cones.get(v, ())) for v in support.vertices
        }
        self.apex_of: Dict[int, int] = {v: v for v in support.vertices}
        for v, base in self._bases.items():
            for b in base:
                self.apex_of[b] = v
        self._cone_of_link = {base: v for v, base in self._bases.items() if base}

    @classmethod
    def from_cones(
        cls,
        support: Graph,
        cones: Mapping[int, Iterable[int]],
        labels: Optional[Mapping[int, str]] = None,
        data: Optional[BlowupData] = None,
    ) -> "BlowupGraph":
        """Assemble the blowup graph from explicit base vertex ids."""
        cones = {v: sorted(cones.get(v, ())) for v in support.vertices}
        vertices = list(support.vertices)
        for v, base in cones.items():
            vertices.extend(base)
        if len(set(vertices)) != len(vertices):
            raise ValueError("base ids collide with each other or with support ids")

        edges = [(v, b) for v, base in cones.items() for b in base]
        for v, w in support.edges:
            left = [v, *cones[v]]
            right = [w, *cones[w]]
            edges.extend((p, q) for p in left for q in right)
        graph = Graph(vertices, edges, labels)
        return cls(graph, support, cones, data)

    @property
    def tainted(self) -> bool:
        return any(not base for base in self._bases.values())

    def is_apex(self, x: int) -> bool:
        return x in self.support

    def base_of(self, v: int) -> FrozenSet[int]:
        """L_v as vertex ids."""
        return self._bases[v]

    def cone(self, v: int) -> FrozenSet[int]:
        return self._bases[v] | {v}

    def cone_vertex_for_link(self, vs: FrozenSet[int]) -> Optional[int]:
        """The support vertex v with L_v == vs, if any."""
        return self._cone_of_link.get(frozenset(vs))

    def __repr__(self) -> str:
        return f"BlowupGraph(support={len(self.support)}, vertices={len(self.graph)})"


def build_blowup(d: BlowupData) -> BlowupGraph:
    """
    Blow up d.support, assigning base ids after the support ids.

    Base vertices are numbered consecutively from max(support id) + 1, walking
    the support in id order and each base list in its given order. Apex labels
    are the support labels (or the id); base labels are the given labels.
    """
    ids = d.support.vertices
    next_id = (max(ids) + 1) if ids else 0
    cones: Dict[int, List[int]] = {}
    labels: Dict[int, str] = {}
    for v in ids:
        labels[v] = d.support.label(v) or str(v)
        cones[v] = []
        for name in d.bases[v]:
            cones[v].append(next_id)
            labels[next_id] = name
            next_id += 1
    x = BlowupGraph.from_cones(d.support, cones, labels, data=d)
    logger.debug("blowup: %d support vertices -> %d vertices", len(ids), len(x.graph))
    return x


def _require_simplex(x: BlowupGraph, s: Iterable[int]) -> Simplex:
    s = Simplex(s)
    if not is_simplex(x.graph, s):
        raise ValueError(f"{s!r} is not a simplex of the blowup")
    return s


def support_of(x: BlowupGraph, s: Iterable[int]) -> Simplex:
    """The support Σ̄ of a simplex Σ."""
    s = _require_simplex(x, s)
    return Simplex(x.apex_of[v] for v in s)


class LinkDecomposition(NamedTuple):
    preimage: FrozenSet[int]
    cone_parts: Dict[int, FrozenSet[int]]


def decompose_link(x: BlowupGraph, s: Iterable[int]) -> LinkDecomposition:
    """
    Split Lk_X(s) into the preimage of Lk_X̄(s̄) and one cone link per v in s̄.

    The pieces are verified to be pairwise joins whose union is the link.

    Raises:
        LemmaViolation: if the reassembled join differs from the link
    """
    s = _require_simplex(x, s)
    bar = support_of(x, s)
    support_link = link(x.support, bar)
    preimage = frozenset(y for y in x.graph.vertices if x.apex_of[y] in support_link)
    cone_parts = {}
    for v in bar:
        cone = x.cone(v)
        cone_parts[v] = link(induced(x.graph, cone), [y for y in s if y in cone])

    pieces = [preimage, *cone_parts.values()]
    assembled = frozenset().union(*pieces)
    actual = link(x.graph, s)
    if assembled != actual:
        raise LemmaViolation(
            f"link of {s!r} is {sorted(actual)} but its decomposition gives {sorted(assembled)}"
        )
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if pieces[i] & pieces[j] or not is_join(x.graph, pieces[i], pieces[j]):
                raise LemmaViolation(f"link pieces of {s!r} do not span a join")
    return LinkDecomposition(preimage, cone_parts)


class SimplexType(str, Enum):
    CONE = "ConeType"
    BLOWUP = "BlowupType"
    BOUNDED = "Bounded"


_PRECEDENCE = (SimplexType.CONE, SimplexType.BLOWUP, SimplexType.BOUNDED)


class SimplexClassification(NamedTuple):
    kind: SimplexType
    tags: FrozenSet[SimplexType]


def is_nontrivial_join(g: Graph, vs: Iterable[int]) -> bool:
    """True iff the full subgraph on vs is A * B with A, B non-empty."""
    vs = frozenset(vs)
    if len(vs) < 2:
        return False
    return not nx.is_connected(nx.complement(induced(g, vs).nx))


def classify_simplex(x: BlowupGraph, s: Iterable[int]) -> SimplexClassification:
    """
    Classify a non-maximal simplex as cone, blowup or bounded type.

    All satisfied descriptions are returned in `tags`; `kind` picks one with
    precedence Cone > Blowup > Bounded.
    """
    s = _require_simplex(x, s)
    lk = link(x.graph, s)
    if not lk:
        raise ValueError(f"{s!r} is a maximal simplex")
    tags = set()
    if x.cone_vertex_for_link(lk) is not None:
        tags.add(SimplexType.CONE)
    members = frozenset(s)
    if all(len(members & x.cone(v)) == 2 for v in support_of(x, s)):
        tags.add(SimplexType.BLOWUP)
    if len(lk) == 1 or is_nontrivial_join(x.graph, lk):
        tags.add(SimplexType.BOUNDED)
    if not tags:
        raise LemmaViolation(f"simplex {s!r} fits none of the link descriptions")
    kind = next(t for t in _PRECEDENCE if t in tags)
    return SimplexClassification(kind, frozenset(tags))


def _cleanish_rows(
    g: Graph,
    simplices: List[Simplex],
    links: Dict[Simplex, FrozenSet[int]],
    rows: List[int],
) -> Optional[Tuple[Simplex, Simplex]]:
    for r in rows:
        sigma = simplices[r]
        sigma_set = frozenset(sigma)
        extensions = [p for p in simplices if sigma_set <= frozenset(p)]
        decided: Dict[FrozenSet[int], bool] = {}
        for phi in simplices:
            target = links[sigma] & links[phi]
            ok = decided.get(target)
            if ok is None:
                ok = False
                for pi in extensions:
                    lk = links[pi]
                    if lk <= target:
                        psi = target - lk
                        if is_simplex(g, psi) and is_join(g, lk, psi):
                            ok = True
                            break
                decided[target] = ok
            if not ok:
                return sigma, phi
    return None


def has_cleanish(g: Graph, limit: int = 2_000, jobs: int = 1) -> CheckResult:
    """
    Check that every Lk(Σ) ∩ Lk(Φ) equals Lk(Π) * Ψ for some simplices Π ⊇ Σ and Ψ.

    The scan is exhaustive over ordered simplex pairs, so it is meant for
    graphs with a few hundred simplices. The first failing pair in canonical
    order is reported regardless of `jobs`.
    """
    simplices = all_simplices(g, limit)
    links = {s: link_of_set(g, s) for s in simplices}
    rows = list(range(len(simplices)))
    if jobs <= 1:
        found = _cleanish_rows(g, simplices, links, rows)
    else:
        size = -(-len(rows) // jobs)
        chunks = [rows[i : i + size] for i in range(0, len(rows), size)]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(
                pool.map(_cleanish_rows, repeat(g), repeat(simplices), repeat(links), chunks)
            )
        found = next((r for r in results if r is not None), None)
    constants = {"simplices": len(simplices)}
    if found is not None:
        sigma, phi = found
        return CheckResult(
            name="cleanish",
            verdict=Verdict.FAIL,
            witness=f"sigma={sigma!r} phi={phi!r}",
            constants=constants,
        )
    return CheckResult(name="cleanish", verdict=Verdict.PASS, constants=constants)
