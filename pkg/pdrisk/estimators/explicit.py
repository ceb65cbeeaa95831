"""One-dimensional MRE predictive densities with explicit formulas.

These cover location models outside the scale-mixture family: the
exponential location model, where the estimate is a two-sided exponential
in ``u = y - min_i x_i``, and the uniform model on ``(mu, mu + 1)``, where
it is a trapezoid.
"""
from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ImpossibleDataError(ValueError):
    """Raised when observed data cannot arise under the assumed model."""


def _scalar(value: np.ndarray) -> np.ndarray | float:
    return float(value) if np.ndim(value) == 0 else value


class ExpLocationMre(BaseModel):
    """MRE density for ``X_i ~ Exp(mu, beta1)``, ``Y ~ Exp(mu, beta2)`` with ``n`` observations."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["exp_location"] = "exp_location"
    n: int = Field(ge=1)
    beta1: float = Field(gt=0)
    beta2: float = Field(gt=0)

    @property
    def left_scale(self) -> float:
        return self.n * self.beta1

    def pdf(self, u: Any) -> np.ndarray | float:
        """Density in ``u = y - min_i x_i``."""

        u = np.asarray(u, dtype=float)
        norm = 1.0 / (self.left_scale + self.beta2)
        with np.errstate(over="ignore"):
            left = np.exp(np.minimum(u, 0.0) / self.left_scale)
            right = np.exp(-np.maximum(u, 0.0) / self.beta2)
        return _scalar(norm * np.where(u < 0, left, right))

    def cdf(self, u: Any) -> np.ndarray | float:
        u = np.asarray(u, dtype=float)
        total = self.left_scale + self.beta2
        below = self.left_scale / total * np.exp(np.minimum(u, 0.0) / self.left_scale)
        above = 1.0 - self.beta2 / total * np.exp(-np.maximum(u, 0.0) / self.beta2)
        return _scalar(np.where(u < 0, below, above))

    def evaluate(self, y: Any, x: Any) -> np.ndarray | float:
        """Predictive density at ``y`` given the sample ``x``."""

        sample = np.asarray(x, dtype=float).reshape(-1)
        if sample.shape[0] != self.n:
            raise ValueError(f"expected {self.n} observations, got {sample.shape[0]}")
        return self.pdf(np.asarray(y, dtype=float) - sample.min())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``u`` from the density."""

        total = self.left_scale + self.beta2
        left = rng.random(size) < self.left_scale / total
        out = rng.exponential(self.beta2, size)
        out[left] = -rng.exponential(self.left_scale, int(left.sum()))
        return out


class UniformMre(BaseModel):
    """Trapezoidal MRE density for ``X_i, Y ~ Uniform(mu, mu + 1)``.

    The posterior of ``mu`` under a flat prior is uniform on
    ``(x_max - 1, x_min)``; its width ``1 - (x_max - x_min)`` normalizes the
    kernel.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform"] = "uniform"
    x_min: float
    x_max: float

    @model_validator(mode="after")
    def _possible(self) -> "UniformMre":
        spread = self.x_max - self.x_min
        if spread < 0:
            raise ValueError("x_min must not exceed x_max")
        if spread >= 1:
            raise ValueError("sample range must be below 1")
        return self

    @property
    def plateau(self) -> float:
        """Height of the unnormalized kernel on ``(x_min, x_max]``."""

        return self.x_min - self.x_max + 1.0

    @property
    def support(self) -> tuple[float, float]:
        return self.x_max - 1.0, self.x_min + 1.0

    def kernel(self, y: Any) -> np.ndarray | float:
        y = np.asarray(y, dtype=float)
        rising = y + 1.0 - self.x_max
        falling = self.x_min + 1.0 - y
        value = np.clip(np.minimum(np.minimum(rising, falling), self.plateau), 0.0, None)
        return _scalar(value)

    def pdf(self, y: Any) -> np.ndarray | float:
        return _scalar(np.asarray(self.kernel(y)) / self.plateau)

    def cdf(self, y: Any) -> np.ndarray | float:
        y = np.asarray(y, dtype=float)
        lo, hi = self.support
        h = self.plateau
        # rising ramp on (lo, x_min], flat on (x_min, x_max], falling on (x_max, hi]
        first = np.clip(y, lo, self.x_min) - lo
        mass = first * first / 2.0
        mass = mass + h * (np.clip(y, self.x_min, self.x_max) - self.x_min)
        tail = np.clip(y, self.x_max, hi) - self.x_max
        mass = mass + h * tail - tail * tail / 2.0
        return _scalar(mass / h)

    def evaluate(self, y: Any, x: Any = None) -> np.ndarray | float:
        return self.pdf(y)


def exp_location_mre(n: int, beta1: float, beta2: float) -> ExpLocationMre:
    return ExpLocationMre(n=n, beta1=beta1, beta2=beta2)


def _check_range(x_min: float, x_max: float) -> None:
    spread = x_max - x_min
    if spread >= 1:
        raise ImpossibleDataError(f"sample range {spread:g} is impossible for Uniform(mu, mu + 1) observations")


def uniform_mre(x_min: float, x_max: float) -> UniformMre:
    _check_range(x_min, x_max)
    return UniformMre(x_min=x_min, x_max=x_max)


def uniform_mre_from_sample(x: Any) -> UniformMre:
    sample = np.asarray(x, dtype=float).reshape(-1)
    return uniform_mre(float(sample.min()), float(sample.max()))


def uniform_mre_kernel(x_min: float, x_max: float, y: Any) -> np.ndarray | float:
    """Unnormalized trapezoid with plateau ``x_min - x_max + 1``."""

    return uniform_mre(x_min, x_max).kernel(y)
