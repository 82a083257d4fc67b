"""
Truncated combinatorial horoballs.

Hor(Γ) has a copy (p, n) of every base vertex p at each depth n = 0..cap,
vertical edges (p, n)-(p, n+1) and horizontal edges (p, n)-(q, n) whenever
d_Γ(p, q) <= 2^n. Depth-0 vertices keep their base ids; deeper copies get
fresh ids above the largest base id.
"""

import logging
import math
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from .graph import Graph, bfs_distances, diameter, distance_matrix, induced
from .models import CheckResult, Verdict

logger = logging.getLogger(__name__)

MAX_CAP = 62


class Horoball:
    """
    A built horoball with its depth and origin bookkeeping.

    Attributes:
        graph: The horoball graph
        base_graph: The base Γ it was built over
        base: Depth-0 vertex ids (identical to the base's ids)
        depth_of: Depth of every horoball vertex
        origin_of: Base vertex every horoball vertex sits over
        cap: Truncation depth
    """

    def __init__(
        self,
        graph: Graph,
        base_graph: Graph,
        cap: int,
        positions: Dict[Tuple[int, int], int],
    ):
        self.graph = graph
        self.base_graph = base_graph
        self.cap = cap
        self._positions = positions
        self.depth_of: Dict[int, int] = {v: n for (_, n), v in positions.items()}
        self.origin_of: Dict[int, int] = {v: p for (p, _), v in positions.items()}

    @property
    def base(self) -> FrozenSet[int]:
        return self.base_graph.vertex_set

    def vertex_at(self, p: int, n: int) -> int:
        """Id of the copy of base vertex p at depth n."""
        try:
            return self._positions[(p, n)]
        except KeyError:
            raise ValueError(f"no vertex ({p}, {n}) in horoball of cap {self.cap}")

    def level(self, n: int) -> List[int]:
        return [self._positions[(p, n)] for p in self.base_graph.vertices]

    def __repr__(self) -> str:
        return f"Horoball(base={len(self.base_graph)}, cap={self.cap})"


def default_cap(base: Graph) -> int:
    """ceil(log2(max(diam, 1))) + 2 over the largest finite component diameter."""
    diam = int(diameter(base))
    return (max(diam, 1) - 1).bit_length() + 2


def build_horoball(base: Graph, cap: int) -> Horoball:
    """
    Build Hor(base) truncated at depth `cap`.

    Args:
        base: Base graph Γ; may be disconnected
        cap: Truncation depth, 0 <= cap <= 62

    Returns:
        Horoball whose depth-0 level is base itself
    """
    if cap < 0 or cap > MAX_CAP:
        raise ValueError(f"cap must lie in 0..{MAX_CAP}, got {cap}")
    ids = base.vertices
    positions: Dict[Tuple[int, int], int] = {(p, 0): p for p in ids}
    next_id = (max(ids) + 1) if ids else 0
    for p in ids:
        for n in range(1, cap + 1):
            positions[(p, n)] = next_id
            next_id += 1

    edges = []
    for p in ids:
        for n in range(cap):
            edges.append((positions[(p, n)], positions[(p, n + 1)]))

    d = distance_matrix(base)
    for n in range(cap + 1):
        rows, cols = np.nonzero(np.triu(d <= float(2**n), 1))
        edges.extend(
            (positions[(ids[r], n)], positions[(ids[c], n)]) for r, c in zip(rows, cols)
        )

    labels = {v: f"{p}@{n}" for (p, n), v in positions.items()}
    graph = Graph(sorted(positions.values()), edges, labels)
    logger.debug(
        "horoball over %d base vertices, cap %d: %d vertices, %d edges",
        len(ids),
        cap,
        len(graph),
        graph.number_of_edges(),
    )
    return Horoball(graph, base, cap, positions)


def lower_bound(t: float) -> float:
    """(2/3) log2(t) + 1, the depth-0 distance floor inside a horoball."""
    return (2.0 / 3.0) * math.log2(t) + 1.0


def lower_bound_holds(base_distance: int, horoball_distance: int) -> bool:
    """Exact integer form of horoball_distance >= lower_bound(base_distance)."""
    if horoball_distance < 1:
        return False
    return base_distance * base_distance <= 2 ** (3 * (horoball_distance - 1))


def check_horoball_lower_bound(h: Horoball) -> CheckResult:
    """
    Verify d_Hor(x, y) >= (2/3) log2(d_base(x, y)) + 1 on all base pairs.

    A violation found in the truncated horoball is a genuine failure, since
    truncation can only lengthen distances. A pair is certified when its
    distance does not change after removing the top layer; any uncertified
    pair turns an otherwise clean scan into INCONCLUSIVE.
    """
    required = default_cap(h.base_graph)
    if h.cap < required:
        raise ValueError(
            f"horoball cap {h.cap} is below the trusted depth {required} for this base"
        )
    below = induced(h.graph, [v for v, n in h.depth_of.items() if n < h.cap])
    d_base = distance_matrix(h.base_graph)
    ids = h.base_graph.vertices
    pairs = uncertified = 0
    first_uncertified = None
    for i, p in enumerate(ids):
        full = bfs_distances(h.graph, [p])
        low = bfs_distances(below, [p])
        for j in range(i + 1, len(ids)):
            t = d_base[i, j]
            if not np.isfinite(t):
                continue
            q = ids[j]
            pairs += 1
            if not lower_bound_holds(int(t), full[q]):
                return CheckResult(
                    name="lower_bound",
                    verdict=Verdict.FAIL,
                    witness=f"pair={p},{q} d_base={int(t)} d_hor={full[q]}",
                )
            if low.get(q) != full[q]:
                uncertified += 1
                if first_uncertified is None:
                    first_uncertified = f"pair={p},{q}"
    verdict = Verdict.INCONCLUSIVE if uncertified else Verdict.PASS
    return CheckResult(
        name="lower_bound",
        verdict=verdict,
        detail=first_uncertified,
        constants={"pairs": pairs, "uncertified": uncertified},
    )
