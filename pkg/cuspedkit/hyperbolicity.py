"""
Metric estimators: four-point hyperbolicity, subgraph distortion and
coarse embedding checks.

All three work from the dense distance matrix of graph.py. The four-point
scan does not visit every quadruple: some quadruple of largest value has
both pairs of its largest distance sum far-apart (no neighbour of either
end lies farther from the other end), and its value is at most the
smaller of those two distances. The scan walks far-apart pairs from the
longest down and stops once no pair can beat the best value. The outer
pairs can be spread over worker processes without changing the result.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Callable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .graph import Graph, components, distance_matrix, distances_among, induced
from .models import ComponentDelta, DeltaReport, DistortionReport, EmbeddingCheck

logger = logging.getLogger(__name__)

DEFAULT_DISTORTION_CAP = 64.0
TOLERANCE = 1e-9

Quadruple = Tuple[int, int, int, int]
PairList = Tuple[np.ndarray, np.ndarray, np.ndarray]


def far_apart_pairs(m: np.ndarray) -> PairList:
    """
    Far-apart index pairs (u, v), u < v, of a connected distance matrix.

    Returns:
        (first, second, distance) arrays sorted by decreasing distance, then
        by (first, second)
    """
    n = m.shape[0]
    reach = np.empty_like(m)
    for u in range(n):
        reach[u] = m[m[u] == 1].max(axis=0)
    far = (reach <= m) & (reach.T <= m)
    first, second = np.nonzero(np.triu(far, 1))
    dist = m[first, second]
    order = np.lexsort((second, first, -dist))
    return first[order], second[order], dist[order]


def _scan_pairs(
    m: np.ndarray, pairs: PairList, outer: Sequence[int]
) -> Tuple[int, Optional[int]]:
    """
    Largest doubled four-point value over far-apart pair couples (q, p), q <= p, p in outer.

    Only couples that form the largest distance sum of their quadruple
    count, so the value never exceeds dist[p]. Quadruples are keyed by their
    sorted indices in base n; ties keep the smallest key. Couples sharing a
    vertex are skipped.
    """
    first, second, dist = pairs
    n = m.shape[0]
    weights = np.array([n**3, n**2, n, 1], dtype=np.int64)
    best, key = -1, None
    for p in outer:
        if dist[p] < best:
            break
        a, b = first[p], second[p]
        qa, qb = first[: p + 1], second[: p + 1]
        s1 = dist[p] + dist[: p + 1]
        s2 = m[a, qa] + m[b, qb]
        s3 = m[a, qb] + m[b, qa]
        hi = np.maximum(np.maximum(s1, s2), s3)
        lo = np.minimum(np.minimum(s1, s2), s3)
        values = 2 * hi + lo - s1 - s2 - s3
        quads = np.sort(
            np.stack([np.full_like(qa, a), np.full_like(qb, b), qa, qb], axis=1), axis=1
        )
        values[(s1 < s2) | (s1 < s3) | np.any(np.diff(quads, axis=1) == 0, axis=1)] = -1
        top = int(values.max())
        if top < 0 or top < best:
            continue
        low = int((quads[values == top] @ weights).min())
        if top > best:
            best, key = top, low
        else:
            key = min(key, low)
    return best, key


def _component_delta(m: np.ndarray, jobs: int) -> Tuple[int, Optional[Quadruple]]:
    n = m.shape[0]
    if n < 4:
        return 0, None
    pairs = far_apart_pairs(m)
    outer = list(range(len(pairs[0])))
    if jobs <= 1:
        results = [_scan_pairs(m, pairs, outer)]
    else:
        chunks = [outer[c::jobs] for c in range(jobs) if outer[c::jobs]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(_scan_pairs, repeat(m), repeat(pairs), chunks))
    best = max(r[0] for r in results)
    if best < 0:
        # every far-apart couple shares a vertex, so all quadruples are flat
        return 0, (0, 1, 2, 3)
    key = min(r[1] for r in results if r[0] == best)
    quad = []
    for _ in range(4):
        key, digit = divmod(key, n)
        quad.append(digit)
    return best, tuple(reversed(quad))


def four_point_value(g: Graph, quad: Quadruple) -> float:
    """(L1 - L2) / 2 for a single quadruple, L1 >= L2 the two largest pair sums."""
    d = distance_matrix(g)
    w, x, y, z = (g.index[v] for v in quad)
    sums = sorted(
        (d[w, x] + d[y, z], d[w, y] + d[x, z], d[w, z] + d[x, y]), reverse=True
    )
    return float((sums[0] - sums[1]) / 2)


def four_point_delta(g: Graph, jobs: int = 1) -> DeltaReport:
    """
    Gromov four-point hyperbolicity constant, per connected component.

    Cross-component quadruples are skipped; delta is the largest component
    value. Components with fewer than four vertices contribute 0 with the
    degenerate witness (v, v, v, v).

    Args:
        g: Graph to measure
        jobs: Worker processes for the far-apart pair scan

    Returns:
        DeltaReport whose witness realises delta exactly
    """
    full = distance_matrix(g)
    per_component: List[ComponentDelta] = []
    best, witness = -1, None
    for comp in components(g):
        ids = sorted(comp)
        rows = [g.index[v] for v in ids]
        m = full[np.ix_(rows, rows)].astype(np.int64)
        doubled, quad = _component_delta(m, jobs)
        if quad is None:
            quad_ids = (ids[0],) * 4
        else:
            quad_ids = tuple(ids[q] for q in quad)
        per_component.append(ComponentDelta(vertices=ids, delta=doubled / 2))
        if doubled > best:
            best, witness = doubled, quad_ids
    if witness is None:
        return DeltaReport()
    logger.debug("four-point delta %s over %d components", best / 2, len(per_component))
    return DeltaReport(delta=best / 2, witness=witness, per_component=per_component)


def distortion(
    amb: Graph,
    sub_vertices: Iterable[int],
    sub_graph: Optional[Graph] = None,
    cap: float = DEFAULT_DISTORTION_CAP,
) -> DistortionReport:
    """
    Smallest half-integer K >= 1 with d_sub <= K*d_amb + K on every pair.

    The subgraph metric is that of the induced subgraph unless `sub_graph`
    is given, in which case its vertex set must equal `sub_vertices`.

    Returns:
        DistortionReport with mult = inf when no K up to `cap` works or when
        a pair is connected in the ambient graph but not in the subgraph
    """
    sub_vertices = frozenset(sub_vertices)
    if not sub_vertices:
        raise ValueError("sub_vertices must be non-empty")
    unknown = sub_vertices - amb.vertex_set
    if unknown:
        raise ValueError(f"sub_vertices not in the ambient graph: {sorted(unknown)}")
    if sub_graph is None:
        sub_graph = induced(amb, sub_vertices)
    elif sub_graph.vertex_set != sub_vertices:
        raise ValueError("sub_graph vertex set differs from sub_vertices")

    ids = sub_graph.vertices
    d_amb = distances_among(amb, ids)
    d_sub = distance_matrix(sub_graph)
    iu = np.triu_indices(len(ids), 1)
    a, s = d_amb[iu], d_sub[iu]

    sub_finite = np.isfinite(s)
    lipschitz_ok = bool(np.all(a[sub_finite] <= s[sub_finite]))

    def pair(flat: int) -> Tuple[int, int]:
        return ids[iu[0][flat]], ids[iu[1][flat]]

    broken = np.flatnonzero(np.isfinite(a) & ~sub_finite)
    if broken.size:
        return DistortionReport(
            mult=float("inf"), witness=pair(int(broken[0])), lipschitz_ok=lipschitz_ok
        )

    both = np.flatnonzero(np.isfinite(a))
    if not both.size:
        return DistortionReport(mult=1.0, lipschitz_ok=lipschitz_ok)
    a_int = a[both].astype(np.int64)
    s_int = s[both].astype(np.int64)
    # twice the least admissible K for each pair
    need = -(-2 * s_int // (a_int + 1))
    worst = int(np.argmax(need))
    doubled = max(2, int(need[worst]))
    mult = doubled / 2
    if mult > cap:
        mult = float("inf")
    return DistortionReport(
        mult=mult, witness=pair(int(both[worst])), lipschitz_ok=lipschitz_ok
    )


def verify_coarse_embedding(
    domain: Graph,
    codomain: Graph,
    f: Mapping[int, int],
    lower: Callable[[float], float],
    upper: Callable[[float], float],
) -> EmbeddingCheck:
    """
    Check lower(d_dom(x, y)) <= d_cod(f x, f y) <= upper(d_dom(x, y)).

    Pairs of distinct vertices in the same domain component are scanned in
    vertex order and the first violation is returned as the counterexample.
    """
    missing = domain.vertex_set - set(f)
    if missing:
        raise ValueError(f"map is not defined on {sorted(missing)}")
    outside = {f[v] for v in domain.vertices} - codomain.vertex_set
    if outside:
        raise ValueError(f"map leaves the codomain at {sorted(outside)}")

    d_dom = distance_matrix(domain)
    d_cod = distance_matrix(codomain)
    ids = domain.vertices
    images = [codomain.index[f[v]] for v in ids]
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            t = float(d_dom[i, j])
            if np.isinf(t):
                continue
            c = float(d_cod[images[i], images[j]])
            lo, hi = lower(t), upper(t)
            if lo > c + TOLERANCE or c > hi + TOLERANCE:
                return EmbeddingCheck(
                    ok=False,
                    counterexample=(ids[i], ids[j]),
                    detail=f"d_dom={t:g} d_cod={c:g} bounds=[{lo:g}, {hi:g}]",
                )
    return EmbeddingCheck(ok=True)
