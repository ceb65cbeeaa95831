"""Self-normalized importance sampling of the dual mixing laws.

Two bivariate laws are supported, both sampled from a product proposal and
reweighted:

``l2``
    ``tau(z1, z2) ∝ z2^{-1} (z1 + z2)^{-p/2} dG(z1) dJ(z2)`` with ``J`` the law
    of ``V1 + W1 + W2``, and ``Z = z1 z2 / (z1 + z2)``.
``l1``
    ``tau(z1, z2) ∝ z2^{p/2-1} (z1 + 4 z2)^{-p/2} dG(z1) dH(z2)`` and
    ``Z = 4 z1 z2 / (z1 + 4 z2)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..densities.mixing import MixingLaw, add_laws, simplify
from . import streams

logger = logging.getLogger(__name__)

DualVariant = Literal["l2", "l1"]

MIN_ESS_FRACTION = 0.01


class UnreliableEstimateError(RuntimeError):
    """Raised in strict mode when the effective sample size is too small."""

    def __init__(self, message: str, *, ess: float, n: int) -> None:
        super().__init__(message)
        self.ess = ess
        self.n = n


@dataclass(frozen=True)
class WeightedEstimate:
    value: float
    se: float


@dataclass(frozen=True)
class DualSample:
    """Weighted draws ``(z1, z2)`` of a dual law with their normalized weights."""

    variant: DualVariant
    dim: int
    z1: np.ndarray
    z2: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @property
    def z(self) -> np.ndarray:
        if self.variant == "l2":
            return self.z1 * self.z2 / (self.z1 + self.z2)
        return 4.0 * self.z1 * self.z2 / (self.z1 + 4.0 * self.z2)

    @property
    def ess(self) -> float:
        return float(1.0 / np.sum(self.weights**2))

    @property
    def reliable(self) -> bool:
        return self.ess >= MIN_ESS_FRACTION * self.n

    def expect(self, values: np.ndarray) -> WeightedEstimate:
        """Self-normalized estimate of ``E_tau[values]`` with a delta-method SE."""

        values = np.asarray(values, dtype=float)
        mean = float(np.dot(self.weights, values))
        spread = self.weights * (values - mean)
        return WeightedEstimate(value=mean, se=float(np.sqrt(np.dot(spread, spread))))

    def moment(self, k: float) -> WeightedEstimate:
        """``E_tau[Z^k]``."""

        return self.expect(self.z**k)

    def ratio(self, numerator: np.ndarray, denominator: np.ndarray) -> WeightedEstimate:
        """``E_tau[numerator] / E_tau[denominator]`` with a delta-method SE."""

        top = float(np.dot(self.weights, numerator))
        bottom = float(np.dot(self.weights, denominator))
        value = top / bottom
        spread = self.weights * (np.asarray(numerator) - value * np.asarray(denominator))
        return WeightedEstimate(value=value, se=float(np.sqrt(np.dot(spread, spread))) / abs(bottom))

    def inverse_mean(self) -> WeightedEstimate:
        """``E_tau(Z^{-1})``; for ``l2`` this is ``E(Z1^{-1}) + E(Z2^{-1})``."""

        if self.variant == "l2":
            return self.expect(1.0 / self.z1 + 1.0 / self.z2)
        return self.moment(-1.0)


def _proposal(g: MixingLaw, h: MixingLaw, variant: DualVariant) -> tuple[MixingLaw, MixingLaw]:
    if variant == "l2":
        return simplify(g), add_laws(g, h, h)
    return simplify(g), simplify(h)


def _log_weight(z1: np.ndarray, z2: np.ndarray, p: int, variant: DualVariant) -> np.ndarray:
    if variant == "l2":
        return -np.log(z2) - (p / 2.0) * np.log(z1 + z2)
    return (p / 2.0 - 1.0) * np.log(z2) - (p / 2.0) * np.log(z1 + 4.0 * z2)


def importance_sample_dual(
    g: MixingLaw,
    h: MixingLaw,
    p: int,
    variant: DualVariant,
    n: int,
    seed: int,
    *,
    threads: int = 1,
    strict: bool = False,
) -> DualSample:
    """Draw ``n`` weighted pairs from the dual law of ``variant``."""

    if p < 1:
        raise ValueError("p must be positive")
    if variant not in ("l2", "l1"):
        raise ValueError(f"unknown dual variant {variant!r}")
    first, second = _proposal(g, h, variant)

    def draw(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        return first.sample(rng, size), second.sample(rng, size)

    parts = streams.map_chunks(draw, n, seed, stream=streams.STREAM_IMPORTANCE, threads=threads)
    z1 = np.concatenate([part[0] for part in parts])
    z2 = np.concatenate([part[1] for part in parts])
    log_weight = _log_weight(z1, z2, p, variant)
    if not np.all(np.isfinite(log_weight)):
        raise ArithmeticError("importance weights are not finite")
    weights = np.exp(log_weight - log_weight.max())
    weights /= math.fsum(weights)
    sample = DualSample(variant=variant, dim=p, z1=z1, z2=z2, weights=weights)
    if not sample.reliable:
        message = f"effective sample size {sample.ess:.0f} is below {MIN_ESS_FRACTION:.0%} of n={n}"
        if strict:
            raise UnreliableEstimateError(message, ess=sample.ess, n=n)
        logger.warning("Unreliable importance sample variant=%s ess=%.0f n=%s", variant, sample.ess, n)
    else:
        logger.debug("Importance sample variant=%s ess=%.0f n=%s", variant, sample.ess, n)
    return sample


__all__ = [
    "DualSample",
    "UnreliableEstimateError",
    "WeightedEstimate",
    "importance_sample_dual",
]
