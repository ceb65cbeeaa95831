"""Scaled noncentral chi-square laws through their Poisson-Gamma mixture.

For ``Z = ||aX - mu||^2 / sigma_Y^2`` with ``X ~ N_p(mu, sigma_X^2 I)`` we have
``Z | L ~ Gamma(p/2 + L, 2 a^2 r)`` and ``L ~ Poisson(lambda / 2)`` where
``lambda = (a - 1)^2 ||mu||^2 / (a^2 sigma_X^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LaplaceValues:
    """``E[e^{-sZ}]`` and ``E[Z e^{-sZ}]`` with the quantities they were built from."""

    value: float
    weighted: float
    theta: float
    h: float

    def lemma_combination(self, p: int, s: float) -> float:
        """``E[e^{-sZ}(p - 2sZ)]``."""

        return p * self.value - 2.0 * s * self.weighted


def _noncentrality(a: float, r: float, normmu2: float) -> float:
    return (a - 1.0) ** 2 * normmu2 / (a * a * r)


def _validate(p: int, a: float, r: float, normmu2: float, s: float) -> None:
    if p < 1:
        raise ValueError("p must be positive")
    if not 0 < a <= 1:
        raise ValueError("shrink factor a must lie in (0, 1]")
    if r <= 0:
        raise ValueError("variance ratio r must be positive")
    if normmu2 < 0:
        raise ValueError("||mu||^2 must be nonnegative")
    if s < 0:
        raise ValueError("s must be nonnegative")


def noncentral_scaled_chisq_laplace(p: int, a: float, r: float, normmu2: float, s: float) -> LaplaceValues:
    """Closed-form Laplace transform of ``Z`` and of ``Z`` weighted by it.

    ``normmu2`` is ``||mu||^2 / sigma_Y^2``.
    """

    _validate(p, a, r, normmu2, s)
    lam = _noncentrality(a, r, normmu2)
    scale = 2.0 * a * a * r
    theta = 1.0 / (1.0 + scale * s)
    h = lam * (1.0 - theta)
    value = theta ** (p / 2.0) * math.exp(-h / 2.0)
    weighted = value * scale * theta * (p + lam * theta) / 2.0
    return LaplaceValues(value=value, weighted=weighted, theta=theta, h=h)


def sample_noncentral_scaled_chisq(
    p: int, a: float, r: float, normmu2: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``Z`` through the Poisson-Gamma mixture."""

    _validate(p, a, r, normmu2, 0.0)
    lam = _noncentrality(a, r, normmu2)
    counts = rng.poisson(lam / 2.0, size=n)
    return rng.gamma(p / 2.0 + counts, 2.0 * a * a * r)
