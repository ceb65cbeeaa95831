"""Core pydantic result models shared across the project."""
from __future__ import annotations

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

Verdict = Literal["dominates", "dominated", "inconclusive"]


class ThresholdReport(BaseModel):
    """Root (or infinite cutoff) of a dominance threshold equation."""

    model_config = ConfigDict(frozen=True)

    equation_id: str
    value: float
    unit: Literal["c2", "c", "p"] = "c2"
    bracket: Optional[tuple[float, float]] = None
    residual: float = 0.0
    inputs: dict[str, float] = Field(default_factory=dict)
    context: dict[str, float] = Field(default_factory=dict)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)

    def describe(self) -> str:
        if self.infinite:
            p0 = self.context.get("p0")
            return f"infinite (p >= p0 = {p0:.3f})" if p0 is not None else "infinite"
        return f"{self.value:.9f}"


class BoundReport(BaseModel):
    """A Baranchik multiplier cap with the dual moment it was derived from."""

    model_config = ConfigDict(frozen=True)

    equation_id: str
    value: float
    se: float = 0.0
    moment: Optional[float] = None
    moment_se: float = 0.0
    ess: Optional[float] = None
    n: int = 0
    exact: bool = False
    inputs: dict[str, Any] = Field(default_factory=dict)


class RiskEstimate(BaseModel):
    """Monte Carlo frequentist risk at one parameter point."""

    model_config = ConfigDict(frozen=True)

    mean: float
    se: float
    n: int = Field(ge=2)
    seed: int
    mu: tuple[float, ...]
    estimator_id: str
    loss_id: str

    @field_validator("mu", mode="before")
    @classmethod
    def _as_tuple(cls, value: Any) -> tuple[float, ...]:
        if isinstance(value, (int, float)):
            return (float(value),)
        return tuple(float(item) for item in value)

    def within(self, target: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.se


class DominancePoint(BaseModel):
    """Paired risk difference ``R(est1) - R(est2)`` at one grid point."""

    model_config = ConfigDict(frozen=True)

    mu: tuple[float, ...]
    risk1: float
    risk2: float
    diff: float
    se: float
    verdict: Verdict


class DominanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimator1: str
    estimator2: str
    loss_id: str
    n: int
    seed: int
    points: tuple[DominancePoint, ...]
    verdict: Verdict
    note: Optional[str] = None


class CheckResult(BaseModel):
    """Outcome of one acceptance check."""

    model_config = ConfigDict(frozen=True)

    suite: str
    name: str
    passed: bool
    value: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: Optional[str] = None


__all__ = [
    "BoundReport",
    "CheckResult",
    "DominancePoint",
    "DominanceReport",
    "RiskEstimate",
    "ThresholdReport",
    "Verdict",
]
