"""
The cusped space (X̂, Ŵ) of a pair whose X is a blowup, and exact checkers
for the finite-graph statements relating it to its source.

X̂ is the blowup of the same support with bases L_v × {0..cap}. Depth-0
vertices of X̂ keep the ids of X, so X sits inside X̂ literally. Ŵ joins two
maximal simplices of X̂ by an edge of cusp type (they differ in one cone
coordinate and those coordinates are adjacent in the horoball over C(Δ_v))
or of W type (equal positive-depth parts over W-adjacent shadows).
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import numpy as np

from .blowup import BlowupGraph, SimplexType, classify_simplex
from .chhs import (
    XWPair,
    augmented_graph,
    augmented_link,
    class_of,
    cone_class,
    domain_classes,
)
from .config import Limits
from .errors import LemmaViolation, SizeGuardError
from .graph import (
    Graph,
    Simplex,
    all_simplices,
    bfs_distances,
    distance_matrix,
    distances_among,
    induced,
    link_of_set,
    maximal_simplices,
)
from .horoball import Horoball, build_horoball, default_cap
from .models import CheckResult, QuasiIsometryReport, Verdict

logger = logging.getLogger(__name__)

AUTO = "auto"


class CuspedPair:
    """
    A built cusped space with its depth and shadow bookkeeping.

    Attributes:
        source: The originating (X, W) pair
        xhat: X̂ as a blowup over the source support
        what: The pair (X̂, Ŵ)
        down_of: Shadow in X of every X̂ vertex
        depth_of: Depth of every X̂ vertex, apices at 0
        cap: Truncation depth
        horoballs: Hor(C(Δ_v)) for every support vertex with a non-empty base
    """

    def __init__(
        self,
        source: XWPair,
        xhat: BlowupGraph,
        w_edges: Iterable[Tuple[int, int]],
        down_of: Dict[int, int],
        depth_of: Dict[int, int],
        cap: int,
        horoballs: Dict[int, Horoball],
        positions: Dict[Tuple[int, int], int],
    ):
        self.source = source
        self.xhat = xhat
        self.what = XWPair(xhat, w_edges, limits=source.limits)
        self.down_of = down_of
        self.depth_of = depth_of
        self.cap = cap
        self.horoballs = horoballs
        self._positions = positions

    def lift(self, x: int, n: int) -> int:
        """X̂ id of the depth-n copy of the X vertex x."""
        try:
            return self._positions[(x, n)]
        except KeyError:
            raise ValueError(f"no depth-{n} copy of vertex {x} (cap {self.cap})")

    def down(self, s: Iterable[int]) -> Simplex:
        return Simplex(self.down_of[v] for v in s)

    def simplex_depth(self, s: Iterable[int]) -> int:
        return max((self.depth_of[v] for v in s), default=0)

    def positive_part(self, s: Iterable[int]) -> FrozenSet[int]:
        """Θ⁺: the positive-depth cone coordinates of s."""
        return frozenset(v for v in s if self.depth_of[v] > 0)

    def w_index(self, source_index: int) -> int:
        """Ŵ vertex of a source W-vertex, seen at depth 0."""
        return self.what.index_of(self.source.maxsimps[source_index])

    @property
    def base_w_indices(self) -> List[int]:
        return [self.w_index(i) for i in range(len(self.source.maxsimps))]

    def __repr__(self) -> str:
        return (
            f"CuspedPair(cap={self.cap}, vertices={len(self.xhat.graph)}, "
            f"w_vertices={len(self.what.maxsimps)})"
        )


def required_cap(p: XWPair) -> int:
    """Largest default horoball cap over the cone links C(Δ_v)."""
    x = _require_blowup(p)
    caps = [
        default_cap(augmented_link(p, cone_class(p, v)))
        for v in x.support.vertices
        if x.base_of(v)
    ]
    return max(caps, default=0)


def _require_blowup(p: XWPair) -> BlowupGraph:
    if p.blowup is None:
        raise ValueError("the cusped space needs X to be a blowup graph")
    return p.blowup


def _w_vertex_count(x: BlowupGraph, cap: int) -> int:
    total = 0
    for s in maximal_simplices(x.support):
        count = 1
        for v in s:
            count *= max(1, len(x.base_of(v)) * (cap + 1))
        total += count
    return total


def build_cusped(
    p: XWPair,
    cap: Union[int, str] = AUTO,
    limits: Optional[Limits] = None,
    shallow: bool = False,
) -> CuspedPair:
    """
    Build (X̂, Ŵ) over a pair whose X is a blowup.

    Args:
        p: Source pair
        cap: Truncation depth, or "auto" for the smallest trusted one
        limits: Size guards; defaults to the source's limits
        shallow: Accept caps below the trusted depth; the combinatorics are
            exact at any cap, only the metric checks need the deeper one

    Returns:
        CuspedPair whose depth-0 part is the source itself

    Raises:
        ValueError: if X is not a blowup or cap is below the trusted depth
        SizeGuardError: if Ŵ would exceed the vertex budget
    """
    x = _require_blowup(p)
    limits = limits or p.limits
    required = required_cap(p)
    if cap == AUTO:
        cap = required
    cap = int(cap)
    if cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    if cap < required and not shallow:
        raise ValueError(f"cap {cap} is below the trusted depth {required}")

    expected = _w_vertex_count(x, cap)
    if expected > limits.vertex_budget:
        raise SizeGuardError(
            f"Ŵ would have {expected} vertices, above the budget of {limits.vertex_budget}"
        )

    positions: Dict[Tuple[int, int], int] = {(v, 0): v for v in x.graph.vertices}
    labels = x.graph.labels
    cones: Dict[int, List[int]] = {}
    next_id = max(x.graph.vertices, default=-1) + 1
    for v in x.support.vertices:
        cones[v] = sorted(x.base_of(v))
    for b in sorted(b for v in x.support.vertices for b in x.base_of(v)):
        name = x.graph.label(b) or str(b)
        for n in range(1, cap + 1):
            positions[(b, n)] = next_id
            labels[next_id] = f"{name}@{n}"
            next_id += 1
    for v in x.support.vertices:
        cones[v] = [positions[(b, n)] for b in cones[v] for n in range(cap + 1)]
    xhat = BlowupGraph.from_cones(x.support, cones, labels, data=x.data)

    down_of = {vid: b for (b, _), vid in positions.items()}
    depth_of = {vid: n for (_, n), vid in positions.items()}

    horoballs = {
        v: build_horoball(augmented_link(p, cone_class(p, v)), cap)
        for v in x.support.vertices
        if x.base_of(v)
    }

    maxsimps = maximal_simplices(xhat.graph)
    index = {s: i for i, s in enumerate(maxsimps)}
    edges = set()

    # cusp type: swap one cone coordinate for a horoball neighbour
    for i, theta in enumerate(maxsimps):
        for member in theta:
            if xhat.is_apex(member):
                continue
            v = xhat.apex_of[member]
            h = horoballs[v]
            here = h.vertex_at(down_of[member], depth_of[member])
            rest = [u for u in theta if u != member]
            for nb in h.graph.neighbors(here):
                other = positions[(h.origin_of[nb], h.depth_of[nb])]
                j = index[Simplex(rest + [other])]
                if i != j:
                    edges.add((min(i, j), max(i, j)))

    # W type: lift both ends of a source W-edge by the same positive part
    for a, b in sorted(p.w_edges):
        sigma, rho = p.maxsimps[a], p.maxsimps[b]
        common = sorted(u for u in set(sigma) & set(rho) if not x.is_apex(u))
        for depths in itertools.product(range(cap + 1), repeat=len(common)):
            lifted = dict(zip(common, depths))
            theta = Simplex(positions[(u, lifted.get(u, 0))] for u in sigma)
            xi = Simplex(positions[(u, lifted.get(u, 0))] for u in rho)
            i, j = index[theta], index[xi]
            if i == j:
                raise LemmaViolation(f"W-type edge from {theta!r} to itself")
            edges.add((min(i, j), max(i, j)))

    c = CuspedPair(p, xhat, edges, down_of, depth_of, cap, horoballs, positions)
    logger.info(
        "cusped space at cap %d: %d vertices, %d Ŵ-vertices, %d Ŵ-edges",
        cap,
        len(xhat.graph),
        len(maxsimps),
        len(edges),
    )
    return c


def m_inverse(t: int) -> int:
    """Largest n >= 0 with n * 2**n <= t."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    n = 0
    while (n + 1) * 2 ** (n + 1) <= t:
        n += 1
    return n


def check_depth_difference(c: CuspedPair) -> CheckResult:
    """Adjacent Ŵ-vertices differ in depth by at most one."""
    for i, j in sorted(c.what.w_edges):
        gap = abs(c.simplex_depth(c.what.maxsimps[i]) - c.simplex_depth(c.what.maxsimps[j]))
        if gap > 1:
            return CheckResult(
                name="depth_difference", verdict=Verdict.FAIL, witness=f"w_edge={i},{j} gap={gap}"
            )
    return CheckResult(
        name="depth_difference", verdict=Verdict.PASS, constants={"w_edges": len(c.what.w_edges)}
    )


def check_links_lemma(c: CuspedPair) -> CheckResult:
    """x ∈ Lk_X̂(Δ) iff ↓x ∈ Lk_X(↓Δ), for every X̂-simplex Δ and vertex x."""
    xhat, x = c.xhat.graph, c.source.x
    simplices = all_simplices(xhat, c.source.limits.max_simplices)
    for s in simplices:
        upstairs = link_of_set(xhat, s)
        downstairs = link_of_set(x, c.down(s))
        for v in xhat.vertices:
            if (v in upstairs) != (c.down_of[v] in downstairs):
                return CheckResult(
                    name="links_lemma", verdict=Verdict.FAIL, witness=f"simplex={s!r} vertex={v}"
                )
        if frozenset(c.down_of[v] for v in upstairs) != downstairs:
            return CheckResult(name="links_lemma", verdict=Verdict.FAIL, witness=f"simplex={s!r}")
    return CheckResult(
        name="links_lemma", verdict=Verdict.PASS, constants={"simplices": len(simplices)}
    )


def check_nesting_correspondence(c: CuspedPair) -> CheckResult:
    """Lk_X̂(Δ) ⊆ Lk_X̂(Σ) iff Lk_X(↓Δ) ⊆ Lk_X(↓Σ), over all simplex pairs."""
    xhat, x = c.xhat.graph, c.source.x
    pairs: Dict[Tuple[FrozenSet[int], FrozenSet[int]], Simplex] = {}
    for s in all_simplices(xhat, c.source.limits.max_simplices):
        key = (link_of_set(xhat, s), link_of_set(x, c.down(s)))
        pairs.setdefault(key, s)
    keys = list(pairs)
    for up1, down1 in keys:
        for up2, down2 in keys:
            if (up1 <= up2) != (down1 <= down2):
                return CheckResult(
                    name="nesting_correspondence",
                    verdict=Verdict.FAIL,
                    witness=f"delta={pairs[(up1, down1)]!r} sigma={pairs[(up2, down2)]!r}",
                )
    return CheckResult(
        name="nesting_correspondence", verdict=Verdict.PASS, constants={"links": len(keys)}
    )


def cone_link_matches(c: CuspedPair) -> Dict[int, bool]:
    """Per support vertex: does Ĉ(Δ_v) equal Hor(C(Δ_v)) edge for edge?"""
    result = {}
    for v, h in sorted(c.horoballs.items()):
        chat = augmented_link(c.what, cone_class(c.what, v))
        built = {
            frozenset(((c.down_of[a], c.depth_of[a]), (c.down_of[b], c.depth_of[b])))
            for a, b in chat.edges
        }
        expected = {
            frozenset(((h.origin_of[a], h.depth_of[a]), (h.origin_of[b], h.depth_of[b])))
            for a, b in h.graph.edges
        }
        result[v] = built == expected and len(chat) == len(h.graph)
    return result


def check_cone_link_is_horoball(c: CuspedPair) -> CheckResult:
    matches = cone_link_matches(c)
    if not matches:
        return CheckResult(name="cone_link_is_horoball", verdict=Verdict.NOT_APPLICABLE)
    bad = [v for v, ok in matches.items() if not ok]
    if bad:
        return CheckResult(
            name="cone_link_is_horoball", verdict=Verdict.FAIL, witness=f"cone={bad[0]}"
        )
    return CheckResult(
        name="cone_link_is_horoball", verdict=Verdict.PASS, constants={"cones": len(matches)}
    )


def check_duaug_embedding(c: CuspedPair) -> CheckResult:
    """X⁺W equals the depth-0 part of X̂⁺Ŵ."""
    base = augmented_graph(c.source)
    top = augmented_graph(c.what)
    restricted = induced(top, [v for v in top.vertices if c.depth_of[v] == 0])
    if restricted == base:
        return CheckResult(name="duaug_embedding", verdict=Verdict.PASS)
    extra = sorted(set(restricted.edges) ^ set(base.edges))
    witness = f"edge={extra[0][0]},{extra[0][1]}" if extra else None
    return CheckResult(name="duaug_embedding", verdict=Verdict.FAIL, witness=witness)


def check_w_coarse_embedding(
    c: CuspedPair, among: Optional[Iterable[int]] = None
) -> CheckResult:
    """
    m(d_W) <= d_Ŵ <= d_W on depth-0 pairs, m the floor inverse of n * 2**n.

    A lower-bound violation in the truncated Ŵ is genuine, since truncation
    only lengthens paths. A passing pair is certified when its distance in Ŵ
    without the top layer is unchanged; otherwise the verdict is INCONCLUSIVE.

    Args:
        c: The cusped pair
        among: Source W-vertices to restrict the pairs to; all of them when None
    """
    chosen = sorted(set(among)) if among is not None else list(range(len(c.source.maxsimps)))
    hat_ids = [c.w_index(i) for i in chosen]
    d_w = distances_among(c.source.w_graph, chosen)
    d_hat = distances_among(c.what.w_graph, hat_ids)
    low_graph = induced(
        c.what.w_graph,
        [i for i, s in enumerate(c.what.maxsimps) if c.simplex_depth(s) < c.cap],
    )
    d_low = distances_among(low_graph, hat_ids)

    pairs = uncertified = 0
    first_uncertified = None
    for a in range(len(chosen)):
        for b in range(a + 1, len(chosen)):
            t = d_w[a, b]
            if not np.isfinite(t):
                continue
            pairs += 1
            d = d_hat[a, b]
            if not (m_inverse(int(t)) <= d <= t):
                return CheckResult(
                    name="w_coarse_embedding",
                    verdict=Verdict.FAIL,
                    witness=f"pair={chosen[a]},{chosen[b]} d_w={int(t)} d_what={d:g}",
                )
            if d_low[a, b] != d:
                uncertified += 1
                if first_uncertified is None:
                    first_uncertified = f"pair={chosen[a]},{chosen[b]}"
    return CheckResult(
        name="w_coarse_embedding",
        verdict=Verdict.INCONCLUSIVE if uncertified else Verdict.PASS,
        detail=first_uncertified,
        constants={"pairs": pairs, "uncertified": uncertified},
    )


def _half_ceil(numerator: float, denominator: float) -> float:
    return float(np.ceil(2 * numerator / denominator)) / 2


def measure_quasi_isometry(
    representative: Simplex, lower: Graph, upper: Graph
) -> QuasiIsometryReport:
    """
    Constants of the id map lower -> upper, lower's vertices a subset of upper's.

    The multiplicative constant is measured at additive error 2, the additive
    one at multiplicative constant 2.
    """
    ids = lower.vertices
    d1 = distance_matrix(lower)
    d2 = distances_among(upper, ids)
    mult, additive, witness = 1.0, 0.0, None
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = d1[i, j], d2[i, j]
            if np.isinf(a) and np.isinf(b):
                continue
            if np.isinf(a) or np.isinf(b):
                mult = additive = float("inf")
                witness = (ids[i], ids[j])
                continue
            k = max(_half_ceil(b - 2, a), _half_ceil(a - 2, b))
            extra = max(b - 2 * a, a - 2 * b)
            if k > mult or extra > additive:
                witness = (ids[i], ids[j])
            mult = max(mult, k)
            additive = max(additive, extra)
    reach = bfs_distances(upper, ids)
    surjectivity = float(
        max((reach.get(v, float("inf")) for v in upper.vertices), default=0.0)
    )
    return QuasiIsometryReport(
        representative=list(representative),
        multiplicative=mult,
        additive=additive,
        surjectivity=surjectivity,
        ok=mult <= 2 and additive <= 2 and surjectivity <= 2,
        witness=witness,
    )


def blowup_type_reports(c: CuspedPair) -> List[QuasiIsometryReport]:
    """One report per X̂ class with a blowup-type member of non-empty support."""
    reports = []
    for cls in domain_classes(c.what):
        member = next(
            (
                s
                for s in cls.members
                if s and SimplexType.BLOWUP in classify_simplex(c.xhat, s).tags
            ),
            None,
        )
        if member is None:
            continue
        lower = augmented_link(c.source, class_of(c.source, c.down(member)))
        upper = augmented_link(c.what, cls)
        reports.append(measure_quasi_isometry(member, lower, upper))
    return reports


def check_blowup_type_2qi(c: CuspedPair) -> CheckResult:
    reports = blowup_type_reports(c)
    if not reports:
        return CheckResult(name="blowup_type_2qi", verdict=Verdict.NOT_APPLICABLE)
    constants = {
        "classes": len(reports),
        "multiplicative": max(r.multiplicative for r in reports),
        "additive": max(r.additive for r in reports),
    }
    bad = next((r for r in reports if not r.ok), None)
    if bad is not None:
        return CheckResult(
            name="blowup_type_2qi",
            verdict=Verdict.FAIL,
            witness=(
                f"class={Simplex(bad.representative)!r} K={bad.multiplicative:g} "
                f"A={bad.additive:g} surj={bad.surjectivity:g}"
            ),
            constants=constants,
        )
    return CheckResult(name="blowup_type_2qi", verdict=Verdict.PASS, constants=constants)


CUSPED_CHECKS = (
    check_links_lemma,
    check_nesting_correspondence,
    check_depth_difference,
    check_cone_link_is_horoball,
    check_duaug_embedding,
    check_w_coarse_embedding,
    check_blowup_type_2qi,
)


def run_cusped_checks(c: CuspedPair) -> List[CheckResult]:
    return [check(c) for check in CUSPED_CHECKS]
