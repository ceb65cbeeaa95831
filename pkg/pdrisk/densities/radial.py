"""Radial densities given by explicit functions of ``||t - mu||^2``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .smn import SmnDensity, eval_radial, marginal_cdf, marginal_pdf, sphere_area

RadialFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RadialDensity:
    """Spherically symmetric density ``g(||t||^2)`` on ``R^dim``.

    ``cdf`` and ``pdf`` describe the one-dimensional marginal when known.
    """

    dim: int
    radial: RadialFn
    cdf: Optional[RadialFn] = None
    pdf: Optional[RadialFn] = None
    label: str = "radial"

    def __call__(self, u: np.ndarray | float) -> np.ndarray:
        return self.radial(np.asarray(u, dtype=float))

    def eval_points(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float).reshape(-1, self.dim)
        return self.radial(np.einsum("ij,ij->i", t, t))

    @classmethod
    def from_smn(cls, d: SmnDensity, label: str = "smn") -> "RadialDensity":
        return cls(
            dim=d.dim,
            radial=lambda u: eval_radial(d, u),
            cdf=lambda t: np.asarray(marginal_cdf(d, t)),
            pdf=lambda t: np.asarray(marginal_pdf(d, t)),
            label=label,
        )


def kotz_normalizer(dim: int, z: float) -> float:
    """Constant ``K`` making ``K u^{-1/2} (2 pi z)^{-p/2} e^{-u/2z}`` integrate to one."""

    if dim < 2:
        raise ValueError("the Kotz density needs dim >= 2")
    mass = (
        sphere_area(dim)
        * (2.0 * math.pi * z) ** (-dim / 2.0)
        * 0.5
        * (2.0 * z) ** ((dim - 1) / 2.0)
        * math.gamma((dim - 1) / 2.0)
    )
    return 1.0 / mass


def kotz_density(dim: int, z: float) -> RadialDensity:
    """Kotz-type density ``K ||s||^{-1} (2 pi z)^{-p/2} exp(-||s||^2 / 2z)``.

    This is the point-estimation model dual to integrated L1 loss for normal
    plug-in densities when the mixing is degenerate at ``z``.
    """

    if z <= 0:
        raise ValueError("z must be positive")
    constant = kotz_normalizer(dim, z)
    base = (2.0 * math.pi * z) ** (-dim / 2.0)

    def radial(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return constant * base * np.exp(-u / (2.0 * z)) / np.sqrt(u)

    return RadialDensity(dim=dim, radial=radial, label=f"kotz(z={z:g})")


def kotz_inverse_second_moment(dim: int, z: float) -> float:
    """``E||X||^{-2}`` under :func:`kotz_density`, equal to ``1 / ((p - 3) z)``."""

    if dim <= 3:
        raise ValueError("E||X||^-2 is finite for the Kotz density only when dim > 3")
    return 1.0 / ((dim - 3) * z)


def kotz_radial_moment(dim: int, z: float, power: float) -> float:
    """``E||X||^power`` under :func:`kotz_density` by the gamma integral."""

    exponent = (dim - 1 + power) / 2.0
    if exponent <= 0:
        raise ValueError("moment diverges at the origin")
    return (2.0 * z) ** (power / 2.0) * math.exp(
        special.gammaln(exponent) - special.gammaln((dim - 1) / 2.0)
    )
