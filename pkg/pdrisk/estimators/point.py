"""Point estimators of a location vector.

Every rule maps rows of an ``(n, p)`` array of observations to rows of
estimates. Rules are frozen pydantic models so they can be written to and
read from experiment configs.
"""
from __future__ import annotations

import math
from typing import Annotated, Any, Callable, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from .. import utils
from ..metrics.losses import LossSpec
from .restricted import RestrictedBayesTable, restricted_bayes_point, restricted_mle

ShrinkageFn = Callable[[np.ndarray], np.ndarray]

SHRINKAGE_GRID = np.geomspace(1e-4, 1e4, 64)
SHRINKAGE_TOL = 1e-12


def _one(t: np.ndarray) -> np.ndarray:
    return np.ones_like(t, dtype=float)


def _t_over_one_plus_t(t: np.ndarray) -> np.ndarray:
    return t / (1.0 + t)


_SHRINKAGE_FUNCTIONS: dict[str, ShrinkageFn] = {
    "one": _one,
    "t_over_1pt": _t_over_one_plus_t,
}


def validate_shrinkage_function(fn: ShrinkageFn) -> None:
    """Check ``0 <= r <= 1``, ``r`` nondecreasing and ``r(t)/t`` nonincreasing on a log grid."""

    values = np.asarray(fn(SHRINKAGE_GRID), dtype=float)
    if values.shape != SHRINKAGE_GRID.shape or not np.all(np.isfinite(values)):
        raise ValueError("shrinkage function must return finite values elementwise")
    if np.any(values < -SHRINKAGE_TOL) or np.any(values > 1.0 + SHRINKAGE_TOL):
        raise ValueError("shrinkage function must take values in [0, 1]")
    if np.any(np.diff(values) < -SHRINKAGE_TOL):
        raise ValueError("shrinkage function must be nondecreasing")
    ratio = values / SHRINKAGE_GRID
    if np.any(np.diff(ratio) > SHRINKAGE_TOL * np.maximum(ratio[:-1], 1.0)):
        raise ValueError("r(t)/t must be nonincreasing")


def register_shrinkage_function(name: str, fn: ShrinkageFn) -> None:
    validate_shrinkage_function(fn)
    _SHRINKAGE_FUNCTIONS[name] = fn


def shrinkage_function(name: str) -> ShrinkageFn:
    try:
        return _SHRINKAGE_FUNCTIONS[name]
    except KeyError as exc:
        known = ", ".join(sorted(_SHRINKAGE_FUNCTIONS))
        raise ValueError(f"unknown shrinkage function {name!r} (known: {known})") from exc


def _squared_norms(x: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", x, x)


def _baranchik(x: np.ndarray, a: float, r: ShrinkageFn) -> np.ndarray:
    norms = _squared_norms(x)
    factor = np.zeros_like(norms)
    nonzero = norms > 0
    factor[nonzero] = 1.0 - a * r(norms[nonzero]) / norms[nonzero]
    return factor[:, None] * x


class _RuleBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    def estimate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict[str, Any]:
        # python mode keeps infinite interval ends as floats
        return self.model_dump()

    @property
    def label(self) -> str:
        fields = ", ".join(f"{key}={value}" for key, value in self.model_dump().items() if key != "kind")
        return f"{self.kind}({fields})" if fields else self.kind  # type: ignore[attr-defined]


class Identity(_RuleBase):
    kind: Literal["identity"] = "identity"

    def estimate(self, x: np.ndarray) -> np.ndarray:
        return np.array(x, dtype=float, copy=True)


class LinearShrink(_RuleBase):
    """``a x + offset``."""

    kind: Literal["linear"] = "linear"
    a: float = Field(gt=0, le=1)
    offset: float | tuple[float, ...] = 0.0

    def estimate(self, x: np.ndarray) -> np.ndarray:
        if isinstance(self.offset, tuple):
            offset = utils.as_vector(self.offset, x.shape[1])
        else:
            offset = np.full(x.shape[1], float(self.offset))
        return self.a * x + offset[None, :]


class Baranchik(_RuleBase):
    """``(1 - a r(||x||^2) / ||x||^2) x`` with ``r`` taken from the shrinkage registry."""

    kind: Literal["baranchik"] = "baranchik"
    a: float = Field(gt=0)
    r: str = "one"

    @field_validator("r")
    @classmethod
    def _known_shrinkage(cls, value: str) -> str:
        validate_shrinkage_function(shrinkage_function(value))
        return value

    def estimate(self, x: np.ndarray) -> np.ndarray:
        return _baranchik(x, self.a, shrinkage_function(self.r))


def _stein_constant(dim: int, sigma2: float) -> float:
    if dim < 3:
        raise ValueError("James-Stein shrinkage needs dimension at least 3")
    return (dim - 2) * sigma2


class JamesStein(_RuleBase):
    kind: Literal["james_stein"] = "james_stein"
    sigma2: float = Field(gt=0)

    def estimate(self, x: np.ndarray) -> np.ndarray:
        return _baranchik(x, _stein_constant(x.shape[1], self.sigma2), _one)


class PositivePartJS(_RuleBase):
    kind: Literal["positive_part_js"] = "positive_part_js"
    sigma2: float = Field(gt=0)

    def estimate(self, x: np.ndarray) -> np.ndarray:
        a = _stein_constant(x.shape[1], self.sigma2)
        norms = _squared_norms(x)
        factor = np.zeros_like(norms)
        nonzero = norms > 0
        factor[nonzero] = np.maximum(1.0 - a / norms[nonzero], 0.0)
        return factor[:, None] * x


class _IntervalRule(_RuleBase):
    lo: float = -math.inf
    hi: float = math.inf

    @model_validator(mode="after")
    def _ordered(self) -> "_IntervalRule":
        if not self.lo < self.hi:
            raise ValueError("interval must satisfy lo < hi")
        return self

    def _check_dim(self, x: np.ndarray) -> None:
        if x.shape[1] != 1:
            raise ValueError(f"{self.kind} is defined in one dimension only")  # type: ignore[attr-defined]


class RestrictedMle(_IntervalRule):
    """Projection of ``x`` onto ``[lo, hi]``."""

    kind: Literal["restricted_mle"] = "restricted_mle"

    def estimate(self, x: np.ndarray) -> np.ndarray:
        self._check_dim(x)
        return restricted_mle(x, self.lo, self.hi)


class RestrictedBayesUniform(_IntervalRule):
    """Bayes rule for a uniform prior on ``[lo, hi]`` and a normal likelihood.

    With ``tabulate`` the rule is solved once on a grid and interpolated.
    """

    kind: Literal["restricted_bayes"] = "restricted_bayes"
    loss: LossSpec
    sigma2_x: float = Field(gt=0)
    tabulate: bool = True

    _table: RestrictedBayesTable | None = PrivateAttr(default=None)

    def estimate(self, x: np.ndarray) -> np.ndarray:
        self._check_dim(x)
        if not self.tabulate:
            return np.asarray(restricted_bayes_point(x, self.lo, self.hi, self.loss, self.sigma2_x))
        if self._table is None:
            self._table = RestrictedBayesTable(self.lo, self.hi, self.loss, self.sigma2_x)
        return self._table(x)


PointEstimator = Annotated[
    Union[Identity, LinearShrink, Baranchik, JamesStein, PositivePartJS, RestrictedMle, RestrictedBayesUniform],
    Field(discriminator="kind"),
]


def point_estimate(rule: PointEstimator, x: Any, dim: int | None = None) -> np.ndarray:
    """Apply ``rule`` to one point (returns a vector) or to rows of points."""

    points = utils.as_points(x, dim)
    out = rule.estimate(points)
    if np.ndim(x) <= 1 and points.shape[0] == 1:
        return out[0]
    return out


__all__ = [
    "Baranchik",
    "Identity",
    "JamesStein",
    "LinearShrink",
    "PointEstimator",
    "PositivePartJS",
    "RestrictedBayesUniform",
    "RestrictedMle",
    "point_estimate",
    "register_shrinkage_function",
    "shrinkage_function",
    "validate_shrinkage_function",
]
