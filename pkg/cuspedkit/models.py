"""
Pydantic models for measurements, check verdicts and run reports.

Every checker in the package returns one of these models rather than a bare
boolean, so the witness that justifies a verdict travels with it. The CLI
renders them as stable, line-oriented text.
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ReportBase(BaseModel):
    """Base class for report models with shared configuration."""

    model_config = ConfigDict(
        frozen=True,
        validate_default=False,
        arbitrary_types_allowed=True,
    )


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    NOT_APPLICABLE = "N/A"
    INCONCLUSIVE = "INCONCLUSIVE"
    VACUOUS = "VACUOUS"


def format_constant(value: float) -> str:
    """Render integers without decimals, half-integers with one, infinity as inf."""
    if math.isinf(value):
        return "inf"
    if float(value).is_integer():
        return str(int(value))
    return f"{value:g}"


class ComponentDelta(ReportBase):
    vertices: List[int]
    delta: float


class DeltaReport(ReportBase):
    """
    Four-point hyperbolicity measurement.

    Attributes:
        delta: Largest half-integer four-point value over all components
        witness: Quadruple of vertex ids realising delta, None for the empty graph
        per_component: Delta of each connected component, ordered by least id
    """

    delta: float = 0.0
    witness: Optional[Tuple[int, int, int, int]] = None
    per_component: List[ComponentDelta] = Field(default_factory=list)


class DistortionReport(ReportBase):
    """
    Smallest K with d_sub <= K*d_amb + K, searched over half-integers.

    `lipschitz_ok` records whether d_amb <= d_sub held on every pair, which is
    guaranteed when the subgraph's edges are ambient edges.
    """

    mult: float
    witness: Optional[Tuple[int, int]] = None
    lipschitz_ok: bool = True

    @property
    def finite(self) -> bool:
        return not math.isinf(self.mult)


class EmbeddingCheck(ReportBase):
    """Result of a two-sided coarse embedding check."""

    ok: bool
    counterexample: Optional[Tuple[int, int]] = None
    detail: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


class CheckResult(ReportBase):
    """Verdict of a named lemma check, with the witness that decided it."""

    name: str
    verdict: Verdict
    witness: Optional[str] = None
    detail: Optional[str] = None
    constants: Dict[str, float] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.FAIL

    def __bool__(self) -> bool:
        return self.verdict is Verdict.PASS

    def line(self) -> str:
        parts = ["CHECK", self.name, self.verdict.value]
        if self.witness:
            parts.append(self.witness)
        elif self.detail:
            parts.append(self.detail)
        return " ".join(parts)


class DomainMeasurement(ReportBase):
    """Per-class measurements gathered by the axiom checker."""

    index: int
    representative: List[int]
    link_size: int
    diameter: float
    delta: DeltaReport
    distortion: DistortionReport
    cone_type: bool = False
    exempt: bool = False


class AxiomVerdict(ReportBase):
    axiom: int
    verdict: Verdict
    constant: Optional[float] = None
    witness: Optional[str] = None

    def line(self) -> str:
        parts = ["AXIOM", str(self.axiom), self.verdict.value]
        if self.witness:
            parts.append(self.witness)
        elif self.constant is not None:
            parts.append(format_constant(self.constant))
        return " ".join(parts)


class AxiomReport(ReportBase):
    """
    Outcome of checking the five combinatorial HHS axioms on an (X, W) pair.

    Attributes:
        complexity_n: Longest chain of strictly increasing links
        delta: The hyperbolicity/embedding constant the verdicts were judged against
        relative: Whether cone-type classes were exempt from hyperbolicity
        domains: One measurement per domain class, in class order
        axiom4_ok: False iff some pair of classes lacked a suitable simplex Π
        axiom4_vacuous: True when no class met the diameter guard
        axiom5_ok: False iff some augmented-link edge lacked W-adjacent witnesses
        verdicts: One verdict per axiom, 1 through 5
    """

    complexity_n: int
    delta: float
    relative: bool = False
    domains: List[DomainMeasurement] = Field(default_factory=list)
    axiom4_ok: bool = True
    axiom4_vacuous: bool = False
    axiom4_counterexample: Optional[str] = None
    axiom4_proper_extension: bool = False
    axiom5_ok: bool = True
    axiom5_counterexample: Optional[str] = None
    verdicts: List[AxiomVerdict] = Field(default_factory=list)

    @property
    def per_domain_delta(self) -> Dict[int, DeltaReport]:
        return {d.index: d.delta for d in self.domains}

    @property
    def per_domain_distortion(self) -> Dict[int, DistortionReport]:
        return {d.index: d.distortion for d in self.domains}

    def verdict(self, axiom: int) -> Verdict:
        for v in self.verdicts:
            if v.axiom == axiom:
                return v.verdict
        raise KeyError(axiom)

    @property
    def ok(self) -> bool:
        return all(v.verdict is not Verdict.FAIL for v in self.verdicts)


class QuasiIsometryReport(ReportBase):
    """
    Measured constants of the identity-on-labels map between two link graphs.

    `multiplicative` is the least half-integer K >= 1 making both directions
    K-bi-Lipschitz up to additive error 2; `additive` is the least additive
    error for multiplicative constant 2; `surjectivity` is the largest distance
    from a target vertex to the image.
    """

    representative: List[int]
    multiplicative: float
    additive: float
    surjectivity: float
    ok: bool
    witness: Optional[Tuple[int, int]] = None


class RunReport(BaseModel):
    """Lines emitted by one CLI invocation."""

    command: List[str]
    checks: List[CheckResult] = Field(default_factory=list)
    axioms: List[AxiomVerdict] = Field(default_factory=list)
    constants: List[Tuple[str, float]] = Field(default_factory=list)
    extra: List[str] = Field(default_factory=list)

    def add_constant(self, name: str, value: float) -> None:
        self.constants.append((name, value))

    def lines(self) -> List[str]:
        out = ["RUN " + " ".join(self.command)]
        out.extend(self.extra)
        out.extend(f"CONST {name} {format_constant(v)}" for name, v in self.constants)
        out.extend(a.line() for a in self.axioms)
        out.extend(c.line() for c in self.checks)
        return out

    def exit_status(self) -> int:
        failed = any(c.verdict is Verdict.FAIL for c in self.checks) or any(
            a.verdict is Verdict.FAIL for a in self.axioms
        )
        return 1 if failed else 0
