"""Integrated L1 and L2 distances between location-shifted radial densities."""
from __future__ import annotations

import math
from typing import Any

import numpy as np

from ..densities.radial import RadialDensity
from ..densities.smn import DimensionMismatchError, SmnDensity, convolve, eval_radial, marginal_cdf


def _squared_distance(mu1: Any, mu2: Any) -> np.ndarray:
    diff = np.asarray(mu1, dtype=float) - np.asarray(mu2, dtype=float)
    if diff.ndim == 0:
        return diff * diff
    return np.sum(diff * diff, axis=-1)


def normal_product_integral(mu1: Any, var1: float, mu2: Any, var2: float, dim: int) -> np.ndarray | float:
    """``int phi((y - mu1)/s1) phi((y - mu2)/s2) dy`` over ``R^p``."""

    if var1 <= 0 or var2 <= 0:
        raise ValueError("variances must be positive")
    total = var1 + var2
    squared = _squared_distance(mu1, mu2)
    value = (var1 * var2 / total) ** (dim / 2.0) * (2.0 * math.pi) ** (-dim / 2.0) * np.exp(-squared / (2.0 * total))
    return float(value) if np.ndim(value) == 0 else value


def l2_normal_distance(mu1: Any, var1: float, mu2: Any, var2: float, dim: int) -> np.ndarray | float:
    """Integrated squared difference between ``N(mu1, var1 I)`` and ``N(mu2, var2 I)``."""

    if var1 <= 0 or var2 <= 0:
        raise ValueError("variances must be positive")
    total = var1 + var2
    squared = _squared_distance(mu1, mu2)
    cross = (2.0 * math.pi * total) ** (-dim / 2.0) * np.exp(-squared / (2.0 * total))
    value = (4.0 * math.pi * var1) ** (-dim / 2.0) + (4.0 * math.pi * var2) ** (-dim / 2.0) - 2.0 * cross
    value = np.maximum(value, 0.0)
    return float(value) if np.ndim(value) == 0 else value


def l2_general_distance(f: SmnDensity, q: SmnDensity, s: Any) -> np.ndarray | float:
    """L2 distance between ``f(. - mu2)`` and ``q(. - mu1)`` with ``s = mu2 - mu1``.

    Uses ``q * q(0) + f * f(0) - 2 q * f(s)``; spherical symmetry makes each
    density equal to its reflection. ``s`` may hold one separation or rows of
    separations.
    """

    if f.dim != q.dim:
        raise DimensionMismatchError(f"cannot compare densities of dimension {f.dim} and {q.dim}")
    self_q = float(eval_radial(convolve(q, q), np.asarray(0.0)))
    self_f = float(eval_radial(convolve(f, f), np.asarray(0.0)))
    squared = _squared_distance(s, 0.0)
    cross = eval_radial(convolve(q, f), squared)
    value = np.maximum(self_q + self_f - 2.0 * cross, 0.0)
    return float(value) if np.ndim(value) == 0 else value


def l1_distance(q: RadialDensity | SmnDensity, delta: Any) -> np.ndarray | float:
    """``int |q(y - mu1) - q(y - mu2)| dy = 4 F(delta / 2) - 2`` with ``delta = ||mu1 - mu2||``."""

    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0):
        raise ValueError("delta must be nonnegative")
    if isinstance(q, SmnDensity):
        cdf = np.asarray(marginal_cdf(q, delta / 2.0))
    else:
        if q.cdf is None:
            raise ValueError(f"{q.label} has no marginal cdf")
        cdf = np.asarray(q.cdf(delta / 2.0))
    value = np.clip(4.0 * cdf - 2.0, 0.0, 2.0)
    return float(value) if np.ndim(value) == 0 else value
