"""Spherically symmetric scale mixtures of normals."""
from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, special

from .. import utils
from .mixing import (
    DivergentMomentError,
    InverseGammaLaw,
    MixingLaw,
    PointMass,
    add_laws,
    simplify,
    student_mixing,
)

logger = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    """Raised when densities of different dimension are combined."""


class SmnDensity(BaseModel):
    """``p(t) = int (2 pi v)^{-p/2} exp(-||t||^2 / 2v) dG(v)`` on ``R^p``."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=1)
    mixing: MixingLaw

    @property
    def is_normal(self) -> bool:
        return isinstance(simplify(self.mixing), PointMass)

    @property
    def variance(self) -> float:
        """Per-coordinate variance ``E(V)`` (may be infinite)."""

        return self.mixing.mean()

    def scaled(self, factor: float) -> "SmnDensity":
        """Density of ``factor * T``; the mixing law scales by ``factor**2``."""

        return SmnDensity(dim=self.dim, mixing=self.mixing.scaled(factor * factor))

    def to_spec(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def normal(dim: int, variance: float = 1.0) -> SmnDensity:
    return SmnDensity(dim=dim, mixing=PointMass(value=variance))


def student_t(dim: int, nu: float, sigma: float = 1.0) -> SmnDensity:
    """Multivariate Student ``T(nu, sigma)``; ``nu = 1`` is the Cauchy law."""

    return SmnDensity(dim=dim, mixing=student_mixing(nu, sigma))


def student_t_pdf(dim: int, nu: float, sigma: float, t: Any) -> np.ndarray:
    """Closed-form multivariate Student density, used as a cross-check."""

    points = utils.as_points(t, dim)
    u = np.einsum("ij,ij->i", points, points) / (sigma * sigma)
    log_norm = (
        special.gammaln((nu + dim) / 2.0)
        - special.gammaln(nu / 2.0)
        - 0.5 * dim * math.log(nu * math.pi)
        - dim * math.log(sigma)
    )
    return np.exp(log_norm - 0.5 * (nu + dim) * np.log1p(u / nu))


def _squared_norms(d: SmnDensity, t: Any) -> np.ndarray:
    points = utils.as_points(t, d.dim)
    return np.einsum("ij,ij->i", points, points)


def eval_radial(d: SmnDensity, u: Any) -> np.ndarray:
    """Evaluate the density as a function of ``u = ||t||^2``."""

    u = np.asarray(u, dtype=float)
    law = simplify(d.mixing)
    p = d.dim
    if np.any(u == 0):
        law.check_inverse_moment(p / 2.0)
    return (2.0 * math.pi) ** (-p / 2.0) * law.kernel_moment(-p / 2.0, u / 2.0)


def eval_density(d: SmnDensity, t: Any) -> np.ndarray | float:
    """Density at one point (returns a float) or at rows of an ``(n, p)`` array."""

    squared = _squared_norms(d, t)
    values = eval_radial(d, squared)
    if np.ndim(t) <= 1 and squared.shape[0] == 1:
        return float(values[0])
    return values


def sample(d: SmnDensity, mu: Any, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` points from ``d`` shifted to ``mu``."""

    if n < 1:
        raise ValueError("n must be at least 1")
    center = utils.as_vector(mu, d.dim)
    scales = np.sqrt(d.mixing.sample(rng, n))
    return center[None, :] + scales[:, None] * rng.standard_normal((n, d.dim))


def convolve(a: SmnDensity, b: SmnDensity) -> SmnDensity:
    """Mixture closure: the convolution mixes on the sum of the two scales."""

    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot convolve densities of dimension {a.dim} and {b.dim}")
    return SmnDensity(dim=a.dim, mixing=add_laws(a.mixing, b.mixing))


def marginal_cdf(d: SmnDensity | MixingLaw, t: Any) -> np.ndarray | float:
    """One-dimensional marginal cdf ``F(t) = E[Phi(t / sqrt(V))]``."""

    law = simplify(d.mixing if isinstance(d, SmnDensity) else d)
    t_arr = np.asarray(t, dtype=float)
    if isinstance(law, PointMass):
        out = special.ndtr(t_arr / math.sqrt(law.value))
    elif isinstance(law, InverseGammaLaw):
        out = law.marginal_cdf(t_arr)
    else:
        nodes, weights = law.rule()
        flat = t_arr.reshape(-1)
        out = special.ndtr(np.multiply.outer(flat, 1.0 / np.sqrt(nodes))) @ weights
        out = out.reshape(t_arr.shape)
    return float(out) if np.ndim(out) == 0 else out


def marginal_pdf(d: SmnDensity | MixingLaw, t: Any) -> np.ndarray | float:
    """One-dimensional marginal density ``F'(t)``."""

    law = simplify(d.mixing if isinstance(d, SmnDensity) else d)
    t_arr = np.asarray(t, dtype=float)
    out = (2.0 * math.pi) ** -0.5 * law.kernel_moment(-0.5, t_arr * t_arr / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in ``R^dim``."""

    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def total_mass(d: SmnDensity) -> float:
    """Integrate the density over ``R^p`` in polar coordinates."""

    p = d.dim

    def integrand(r: float) -> float:
        return r ** (p - 1) * float(eval_radial(d, np.asarray([r * r]))[0])

    head, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=200)
    tail, _ = integrate.quad(integrand, 1.0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
    return sphere_area(p) * (head + tail)


__all__ = [
    "DimensionMismatchError",
    "DivergentMomentError",
    "SmnDensity",
    "convolve",
    "eval_density",
    "eval_radial",
    "marginal_cdf",
    "marginal_pdf",
    "normal",
    "sample",
    "sphere_area",
    "student_t",
    "student_t_pdf",
    "total_mass",
]
