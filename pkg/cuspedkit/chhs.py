"""
The combinatorial HHS calculus on a pair (X, W).

W is a graph on the maximal simplices of X. Non-maximal simplices are grouped
into domain classes by their links; each class Δ gets a saturation Sat(Δ),
a graph Y_Δ = X⁺W - Sat(Δ) and an augmented link C(Δ) inside it. On top of
those sit the relations between classes, the closest-point projections,
and the five-axiom checker.
"""

import logging
from enum import Enum
from functools import cached_property
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .blowup import BlowupGraph
from .config import DEFAULT_LIMITS, Limits
from .errors import LemmaViolation, SizeGuardError
from .graph import (
    INFINITY,
    Graph,
    Simplex,
    all_simplices,
    bfs_distances,
    components,
    diameter,
    distances_among,
    induced,
    is_simplex,
    link_of_set,
    maximal_simplices,
)
from .hyperbolicity import distortion, four_point_delta
from .models import (
    AxiomReport,
    AxiomVerdict,
    CheckResult,
    DeltaReport,
    DistortionReport,
    DomainMeasurement,
    Verdict,
)

logger = logging.getLogger(__name__)

ALL_AXIOMS = (1, 2, 3, 4, 5)


class XWPair:
    """
    A graph X with a W-adjacency relation on its maximal simplices.

    `maxsimps` is always the canonical list from maximal_simplices(X); when a
    list is passed in it is validated against the recomputation. W-vertices
    are positions in that list.
    """

    def __init__(
        self,
        x: Union[Graph, BlowupGraph],
        w_edges: Iterable[Tuple[int, int]] = (),
        maxsimps: Optional[Sequence[Iterable[int]]] = None,
        limits: Limits = DEFAULT_LIMITS,
    ):
        if isinstance(x, BlowupGraph):
            self.blowup: Optional[BlowupGraph] = x
            self.x = x.graph
        else:
            self.blowup = None
            self.x = x
        self.limits = limits

        computed = maximal_simplices(self.x)
        if maxsimps is not None and [Simplex(s) for s in maxsimps] != computed:
            raise ValueError(
                "listed maximal simplices differ from the canonical recomputation"
            )
        self.maxsimps: Tuple[Simplex, ...] = tuple(computed)

        n = len(self.maxsimps)
        edges = set()
        for i, j in w_edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"W-edge ({i}, {j}) is a self-loop")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"W-edge ({i}, {j}) is out of range for {n} simplices")
            edges.add((min(i, j), max(i, j)))
        self.w_edges: FrozenSet[Tuple[int, int]] = frozenset(edges)
        self._y_cache: Dict[FrozenSet[int], Graph] = {}
        self._c_cache: Dict[FrozenSet[int], Graph] = {}

    def __repr__(self) -> str:
        return (
            f"XWPair(vertices={len(self.x)}, maxsimps={len(self.maxsimps)}, "
            f"w_edges={len(self.w_edges)})"
        )

    @cached_property
    def w_graph(self) -> Graph:
        return Graph(range(len(self.maxsimps)), sorted(self.w_edges))

    @cached_property
    def _maxsimp_index(self) -> Dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.maxsimps)}

    def index_of(self, s: Iterable[int]) -> int:
        try:
            return self._maxsimp_index[Simplex(s)]
        except KeyError:
            raise ValueError(f"{Simplex(s)!r} is not a maximal simplex")

    def without_w_edge(self, i: int, j: int) -> "XWPair":
        """Copy of the pair with one W-edge removed."""
        edge = (min(i, j), max(i, j))
        if edge not in self.w_edges:
            raise ValueError(f"({i}, {j}) is not a W-edge")
        return XWPair(
            self.blowup if self.blowup is not None else self.x,
            self.w_edges - {edge},
            limits=self.limits,
        )

    @cached_property
    def simplices_by_link(self) -> Dict[FrozenSet[int], List[Simplex]]:
        """Every simplex of X grouped by its link, maximal ones under the empty link."""
        grouped: Dict[FrozenSet[int], List[Simplex]] = {}
        for s in all_simplices(self.x, self.limits.max_simplices):
            grouped.setdefault(link_of_set(self.x, s), []).append(s)
        return grouped


class DomainClass:
    """
    A ∼-class of non-maximal simplices: all simplices sharing one link.

    Attributes:
        index: Position in domain_classes order
        representative: Smallest member (by size, then lexicographically)
        link_set: The common link
        members: Every simplex with this link
        saturation: Union of the members' vertex sets
    """

    __slots__ = ("index", "representative", "link_set", "members", "saturation")

    def __init__(self, index: int, link_set: FrozenSet[int], members: Sequence[Simplex]):
        self.index = index
        self.link_set = link_set
        self.members: Tuple[Simplex, ...] = tuple(
            sorted(members, key=lambda s: (len(s), s))
        )
        self.representative = self.members[0]
        self.saturation: FrozenSet[int] = frozenset().union(*self.members)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DomainClass):
            return NotImplemented
        return self.link_set == other.link_set

    def __hash__(self) -> int:
        return hash(self.link_set)

    def __repr__(self) -> str:
        return f"[{self.representative!r}]"


def domain_classes(p: XWPair) -> List[DomainClass]:
    """One class per distinct non-empty link, ordered by the sorted link."""
    cached = p.__dict__.get("_classes")
    if cached is None:
        links = sorted(
            (lk for lk in p.simplices_by_link if lk), key=lambda lk: tuple(sorted(lk))
        )
        cached = [
            DomainClass(i, lk, p.simplices_by_link[lk]) for i, lk in enumerate(links)
        ]
        p.__dict__["_classes"] = cached
        logger.debug("%d domain classes", len(cached))
    return list(cached)


def class_of(p: XWPair, s: Iterable[int]) -> DomainClass:
    """The domain class of a non-maximal simplex."""
    s = Simplex(s)
    if not is_simplex(p.x, s):
        raise ValueError(f"{s!r} is not a simplex of X")
    lk = link_of_set(p.x, s)
    if not lk:
        raise ValueError(f"{s!r} is a maximal simplex")
    for c in domain_classes(p):
        if c.link_set == lk:
            return c
    raise LemmaViolation(f"no domain class carries the link of {s!r}")


def class_with_link(p: XWPair, link_set: Iterable[int]) -> Optional[DomainClass]:
    link_set = frozenset(link_set)
    return next((c for c in domain_classes(p) if c.link_set == link_set), None)


def cone_class(p: XWPair, v: int) -> DomainClass:
    """The class whose link is the base L_v of a blowup; the Δ_v of the cone at v."""
    if p.blowup is None:
        raise ValueError("cone classes need X to be a blowup graph")
    c = class_with_link(p, p.blowup.base_of(v))
    if c is None:
        raise LemmaViolation(f"no simplex of X has link L_{v}")
    return c


def saturation(p: XWPair, s: Iterable[int]) -> FrozenSet[int]:
    return class_of(p, s).saturation


def complexity(p: XWPair) -> int:
    """
    Length of the longest chain of strictly increasing links.

    Maximal simplices take part through their empty link.
    """
    links = sorted(p.simplices_by_link, key=len)
    longest: Dict[FrozenSet[int], int] = {}
    for lk in links:
        longest[lk] = 1 + max(
            (longest[smaller] for smaller in longest if smaller < lk), default=0
        )
    return max(longest.values(), default=0)


def augmented_graph(p: XWPair) -> Graph:
    """X⁺W: X plus all edges between W-adjacent maximal simplices."""
    cached = p.__dict__.get("_augmented")
    if cached is None:
        edges = set(p.x.edges)
        for i, j in p.w_edges:
            for s in p.maxsimps[i]:
                for t in p.maxsimps[j]:
                    if s != t:
                        edges.add((min(s, t), max(s, t)))
        cached = Graph(p.x.vertices, sorted(edges), p.x.labels)
        p.__dict__["_augmented"] = cached
    return cached


def y_graph(p: XWPair, c: DomainClass) -> Graph:
    """Y_Δ: the augmented graph with Sat(Δ) removed."""
    y = p._y_cache.get(c.link_set)
    if y is None:
        aug = augmented_graph(p)
        y = induced(aug, aug.vertex_set - c.saturation)
        p._y_cache[c.link_set] = y
    return y


def augmented_link(p: XWPair, c: DomainClass) -> Graph:
    """C(Δ): the subgraph of Y_Δ spanned by Lk(Δ)."""
    graph = p._c_cache.get(c.link_set)
    if graph is None:
        graph = induced(y_graph(p, c), c.link_set)
        p._c_cache[c.link_set] = graph
    return graph


class Relation(str, Enum):
    EQUAL = "Equal"
    NESTED_IN = "Nested(in)"
    CONTAINS = "Nested(contains)"
    ORTHOGONAL = "Orthogonal"
    TRANSVERSE = "Transverse"


def relation(p: XWPair, c1: DomainClass, c2: DomainClass) -> Relation:
    """
    Relation of c1 to c2.

    NESTED_IN means Lk(c1) ⊊ Lk(c2) and CONTAINS the reverse. Orthogonality
    is tested in both directions and the two answers must agree.
    """
    a, b = c1.link_set, c2.link_set
    if a == b:
        return Relation.EQUAL
    if a < b:
        return Relation.NESTED_IN
    if b < a:
        return Relation.CONTAINS
    forward = b <= link_of_set(p.x, a)
    backward = a <= link_of_set(p.x, b)
    if forward != backward:
        raise LemmaViolation(f"orthogonality of {c1!r} and {c2!r} is not symmetric")
    return Relation.ORTHOGONAL if forward else Relation.TRANSVERSE


def closest_point_projection(
    y: Graph, target: FrozenSet[int], sources: Iterable[int]
) -> FrozenSet[int]:
    """
    Points of target within distance d(x, target) + 1 of some source x.

    Sources that cannot reach the target contribute nothing.
    """
    found = set()
    for x in sorted(sources):
        dist = bfs_distances(y, [x])
        reached = [dist[t] for t in target if t in dist]
        if not reached:
            continue
        bound = min(reached) + 1
        found.update(t for t in target if dist.get(t, bound + 1) <= bound)
    return frozenset(found)


def project_pi(p: XWPair, c: DomainClass, w: int) -> FrozenSet[int]:
    """π_Δ(w): closest-point projection of w ∩ Y_Δ into C(Δ)."""
    if not 0 <= w < len(p.maxsimps):
        raise ValueError(f"W-vertex {w} is out of range")
    sources = frozenset(p.maxsimps[w]) - c.saturation
    if not sources:
        raise LemmaViolation(
            f"maximal simplex {p.maxsimps[w]!r} lies inside Sat of {c!r}"
        )
    result = closest_point_projection(y_graph(p, c), c.link_set, sources)
    if not result:
        logger.warning("C%r is unreachable from %r in Y", c, p.maxsimps[w])
    return result


def set_diameter(g: Graph, vs: Iterable[int]) -> float:
    """Largest g-distance between two points of vs."""
    ids = sorted(vs)
    if len(ids) < 2:
        return 0.0
    return float(distances_among(g, ids).max())


class RhoSet(NamedTuple):
    points: FrozenSet[int]
    diameter: float
    empty_source: bool


def rho_set(p: XWPair, source: DomainClass, target: DomainClass) -> RhoSet:
    """
    ρ from `source` to `target`: the projection of Sat(source) ∩ Y_target.

    Defined when the classes are transverse or source is properly nested in
    target. An empty Sat(source) ∩ Y_target yields an empty, flagged result.
    """
    rel = relation(p, source, target)
    if rel not in (Relation.TRANSVERSE, Relation.NESTED_IN):
        raise ValueError(f"ρ from {source!r} to {target!r} is undefined: they are {rel.value}")
    sources = source.saturation - target.saturation
    if not sources:
        return RhoSet(frozenset(), 0.0, True)
    points = closest_point_projection(y_graph(p, target), target.link_set, sources)
    return RhoSet(points, set_diameter(augmented_link(p, target), points), False)


def rho_map(p: XWPair, big: DomainClass, small: DomainClass, v: int) -> FrozenSet[int]:
    """
    ρ from C(big) down to C(small): the projection of v when v ∈ Y_small.

    Points of Sat(small) map to the empty set.
    """
    if relation(p, small, big) is not Relation.NESTED_IN:
        raise ValueError(f"{small!r} is not properly nested in {big!r}")
    if v not in big.link_set:
        raise ValueError(f"vertex {v} is not in C{big!r}")
    if v in small.saturation:
        return frozenset()
    return closest_point_projection(y_graph(p, small), small.link_set, [v])


class SetDistance(NamedTuple):
    distance: float
    first_diameter: float
    second_diameter: float


def domain_distance(p: XWPair, c: DomainClass, w1: int, w2: int) -> SetDistance:
    """d_Δ(w1, w2): least C(Δ)-distance between the two projections."""
    first, second = project_pi(p, c, w1), project_pi(p, c, w2)
    graph = augmented_link(p, c)
    if not first or not second:
        return SetDistance(INFINITY, set_diameter(graph, first), set_diameter(graph, second))
    dist = bfs_distances(graph, first)
    gap = min((dist[t] for t in second if t in dist), default=INFINITY)
    return SetDistance(float(gap), set_diameter(graph, first), set_diameter(graph, second))


def check_w_meets_y(p: XWPair) -> CheckResult:
    """Every maximal simplex meets every Y_Δ, as project_pi requires."""
    for c in domain_classes(p):
        for i, w in enumerate(p.maxsimps):
            if frozenset(w) <= c.saturation:
                return CheckResult(
                    name="w_meets_y",
                    verdict=Verdict.FAIL,
                    witness=f"class={c.representative!r} w={i}",
                )
    return CheckResult(name="w_meets_y", verdict=Verdict.PASS)


def projection_spread(p: XWPair, classes: Optional[Iterable[DomainClass]] = None) -> float:
    """Largest C(Δ)-diameter of π(w) ∪ π(w') over W-edges ww' and the given classes."""
    worst = 0.0
    for c in classes if classes is not None else domain_classes(p):
        graph = augmented_link(p, c)
        for i, j in sorted(p.w_edges):
            spread = set_diameter(graph, project_pi(p, c, i) | project_pi(p, c, j))
            worst = max(worst, spread)
    return worst


def check_projection_lipschitz(p: XWPair, bound: Optional[float] = None) -> CheckResult:
    """
    Measure how far projections of W-adjacent vertices spread.

    With no bound the measured spread is reported as a PASS constant; with a
    bound, a larger spread fails.
    """
    spread = projection_spread(p)
    constants = {"spread": spread}
    if bound is not None and spread > bound:
        return CheckResult(
            name="projection_lipschitz",
            verdict=Verdict.FAIL,
            witness=f"spread={spread:g} bound={bound:g}",
            constants=constants,
        )
    return CheckResult(name="projection_lipschitz", verdict=Verdict.PASS, constants=constants)


def _class_diameter(graph: Graph) -> float:
    if len(components(graph)) > 1:
        return INFINITY
    return diameter(graph)


def _measure(
    p: XWPair, c: DomainClass, relative: bool, limits: Limits, jobs: int, metric: bool
) -> DomainMeasurement:
    graph = augmented_link(p, c)
    cone = p.blowup is not None and p.blowup.cone_vertex_for_link(c.link_set) is not None
    if metric:
        delta = four_point_delta(graph, jobs)
        dist = distortion(y_graph(p, c), c.link_set, graph, limits.distortion_cap)
    else:
        delta, dist = DeltaReport(), DistortionReport(mult=1.0)
    return DomainMeasurement(
        index=c.index,
        representative=list(c.representative),
        link_size=len(c.link_set),
        diameter=_class_diameter(graph),
        delta=delta,
        distortion=dist,
        cone_type=cone,
        exempt=relative and cone,
    )


def _axiom4(
    p: XWPair,
    classes: List[DomainClass],
    measured: List[DomainMeasurement],
    delta: float,
) -> Tuple[Verdict, Optional[str], bool]:
    big = [c for c, m in zip(classes, measured) if m.diameter >= delta]
    if not big:
        return Verdict.VACUOUS, None, False
    nonmax_links = [lk for lk in p.simplices_by_link if lk]
    proper = False
    for dc in classes:
        for sc in classes:
            target = dc.link_set & sc.link_set
            gammas = [g for g in big if g.link_set <= target]
            if not gammas:
                continue
            need = frozenset().union(*(g.link_set for g in gammas))
            candidates = [
                pi
                for lk in nonmax_links
                if need <= lk <= dc.link_set
                for pi in p.simplices_by_link[lk]
            ]
            for sigma in sc.members:
                if need <= sc.link_set <= dc.link_set:
                    continue
                members = frozenset(sigma)
                if not any(members <= frozenset(pi) for pi in candidates):
                    return (
                        Verdict.FAIL,
                        f"delta={dc.representative!r} sigma={sigma!r}",
                        proper,
                    )
                proper = True
    return Verdict.PASS, None, proper


def _axiom4_least_delta(
    p: XWPair,
    classes: List[DomainClass],
    measured: List[DomainMeasurement],
    floor: float,
) -> Tuple[float, Tuple[Verdict, Optional[str], bool]]:
    """
    Least guard delta >= floor at which axiom 4 holds.

    The big classes only change as delta passes a class diameter, so the
    candidates are floor and half past each finite diameter above it. When
    every candidate fails the last outcome is returned.
    """
    candidates = [floor] + sorted(
        {m.diameter + 0.5 for m in measured if np.isfinite(m.diameter) and m.diameter >= floor}
    )
    for delta in candidates:
        outcome = _axiom4(p, classes, measured, delta)
        if outcome[0] is not Verdict.FAIL:
            return delta, outcome
    return delta, outcome


def _axiom5(p: XWPair, classes: List[DomainClass]) -> Optional[str]:
    supports: Dict[Tuple[int, int], List[Tuple[FrozenSet[int], FrozenSet[int]]]] = {}
    for i, j in sorted(p.w_edges):
        first, second = frozenset(p.maxsimps[i]), frozenset(p.maxsimps[j])
        for a in first:
            for b in second:
                if a != b and not p.x.has_edge(a, b):
                    supports.setdefault((a, b), []).append((first, second))
                    supports.setdefault((b, a), []).append((second, first))
    for c in classes:
        for a, b in augmented_link(p, c).edges:
            if p.x.has_edge(a, b):
                continue
            pairs = supports.get((a, b), [])
            for delta in c.members:
                members = frozenset(delta)
                if not any(members <= s and members <= t for s, t in pairs):
                    return f"class={c.representative!r} member={delta!r} edge={a},{b}"
    return None


def check_axioms(
    p: XWPair,
    delta_claim: Optional[float] = None,
    relative: bool = False,
    axioms: Iterable[int] = ALL_AXIOMS,
    limits: Optional[Limits] = None,
) -> AxiomReport:
    """
    Check the five combinatorial HHS axioms exhaustively.

    Args:
        p: The (X, W) pair
        delta_claim: Constant to judge axioms 2-4 against; when None the
            measured maximum is reported for axioms 2 and 3, and axiom 4 is
            judged at the least guard at or above it that satisfies it
        relative: Exempt cone-type classes from hyperbolicity (needs a blowup X)
        axioms: Subset of 1..5 to evaluate; metric scans are skipped when
            neither 2, 3 nor 4 is requested
        limits: Size guards; defaults to the pair's limits

    Returns:
        AxiomReport with one verdict per requested axiom
    """
    limits = limits or p.limits
    wanted = sorted(set(axioms))
    if any(a not in ALL_AXIOMS for a in wanted):
        raise ValueError(f"axioms must be drawn from {ALL_AXIOMS}, got {wanted}")
    if relative and p.blowup is None:
        raise ValueError("relative mode needs X to be a blowup graph")
    classes = domain_classes(p)
    if len(classes) > limits.max_classes:
        raise SizeGuardError(
            f"{len(classes)} domain classes exceed the limit of {limits.max_classes}"
        )

    n = complexity(p)
    metric = bool({2, 3, 4} & set(wanted))
    measured = [_measure(p, c, relative, limits, limits.jobs, metric) for c in classes]
    verdicts: List[AxiomVerdict] = []

    hyperbolic = [m for m in measured if not m.exempt]
    worst_delta = max((m.delta.delta for m in hyperbolic), default=0.0)
    worst_mult = max((m.distortion.mult for m in measured), default=1.0)
    finite_mult = max(
        (m.distortion.mult for m in measured if m.distortion.finite), default=1.0
    )
    effective = delta_claim if delta_claim is not None else max(worst_delta, finite_mult)

    if 1 in wanted:
        verdicts.append(AxiomVerdict(axiom=1, verdict=Verdict.PASS, constant=n))
    if 2 in wanted:
        if delta_claim is not None and worst_delta > delta_claim:
            m = max(hyperbolic, key=lambda m: m.delta.delta)
            verdicts.append(
                AxiomVerdict(
                    axiom=2,
                    verdict=Verdict.FAIL,
                    witness=f"class={Simplex(m.representative)!r} delta={m.delta.delta:g}",
                )
            )
        else:
            verdicts.append(AxiomVerdict(axiom=2, verdict=Verdict.PASS, constant=worst_delta))
    if 3 in wanted:
        if np.isinf(worst_mult) or (delta_claim is not None and worst_mult > delta_claim):
            m = max(measured, key=lambda m: m.distortion.mult)
            pair = m.distortion.witness
            verdicts.append(
                AxiomVerdict(
                    axiom=3,
                    verdict=Verdict.FAIL,
                    witness=(
                        f"class={Simplex(m.representative)!r} "
                        f"pair={pair[0]},{pair[1]} K={m.distortion.mult:g}"
                    ),
                )
            )
        else:
            verdicts.append(AxiomVerdict(axiom=3, verdict=Verdict.PASS, constant=worst_mult))

    axiom4_verdict, axiom4_witness, proper = Verdict.PASS, None, False
    if 4 in wanted:
        if delta_claim is None:
            effective, outcome = _axiom4_least_delta(p, classes, measured, effective)
        else:
            outcome = _axiom4(p, classes, measured, effective)
        axiom4_verdict, axiom4_witness, proper = outcome
        verdicts.append(
            AxiomVerdict(
                axiom=4, verdict=axiom4_verdict, constant=effective, witness=axiom4_witness
            )
        )
    axiom5_witness = None
    if 5 in wanted:
        axiom5_witness = _axiom5(p, classes)
        verdicts.append(
            AxiomVerdict(
                axiom=5,
                verdict=Verdict.FAIL if axiom5_witness else Verdict.PASS,
                witness=axiom5_witness,
            )
        )

    logger.info(
        "axioms checked on %d classes: complexity %d, delta %g", len(classes), n, effective
    )
    return AxiomReport(
        complexity_n=n,
        delta=effective,
        relative=relative,
        domains=measured,
        axiom4_ok=axiom4_verdict is not Verdict.FAIL,
        axiom4_vacuous=axiom4_verdict is Verdict.VACUOUS,
        axiom4_counterexample=axiom4_witness,
        axiom4_proper_extension=proper,
        axiom5_ok=axiom5_witness is None,
        axiom5_counterexample=axiom5_witness,
        verdicts=verdicts,
    )
