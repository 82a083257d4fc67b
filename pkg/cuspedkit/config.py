"""Run limits and their environment overrides."""

import os
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

BUDGET_ENV = "CUSPEDKIT_BUDGET"


class Limits(BaseModel):
    """
    Size guards shared by the builders and the exhaustive checkers.

    Attributes:
        vertex_budget: Maximum number of Ŵ vertices a cusped build may create
        max_simplices: Maximum number of simplices an exhaustive scan enumerates
        max_classes: Maximum number of domain classes the axiom checker visits
        distortion_cap: Largest multiplicative constant the distortion search tries
        jobs: Worker processes for the parallel scans
    """

    model_config = ConfigDict(frozen=True)

    vertex_budget: int = Field(200_000, gt=0)
    max_simplices: int = Field(50_000, gt=0)
    max_classes: int = Field(5_000, gt=0)
    distortion_cap: float = Field(64.0, ge=1.0)
    jobs: int = Field(1, ge=1)

    @classmethod
    def from_env(cls, **overrides: Any) -> "Limits":
        """
        Build limits from defaults, the environment, then explicit overrides.

        Overrides whose value is None are ignored so CLI flags can be passed
        through unconditionally.
        """
        values = {}
        raw = os.environ.get(BUDGET_ENV)
        if raw is not None and raw.strip():
            try:
                values["vertex_budget"] = int(raw)
            except ValueError:
                raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_LIMITS = Limits()
