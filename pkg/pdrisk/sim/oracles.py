"""Direct grid integration of ``int |q(y) - qhat(y)|^alpha dy`` for ``p <= 2``.

Used to cross-check the closed-form distances and, in the engine, as the
per-replicate L1 loss of scaled estimates.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Callable, Union

import numpy as np
from scipy import integrate

from ..densities.radial import RadialDensity
from ..densities.smn import SmnDensity, eval_radial

logger = logging.getLogger(__name__)

PointDensity = Callable[[np.ndarray], np.ndarray]

GRID_STEP = 0.01
GRID_RADIUS = 12.0
BOUNDARY_TOL = 1e-14


class BoundaryDecayError(ValueError):
    """Raised when a density is not negligible on the edge of the integration grid."""

    def __init__(self, message: str, *, boundary_value: float, radius: float) -> None:
        super().__init__(message)
        self.boundary_value = boundary_value
        self.radius = radius


def shifted(d: Union[SmnDensity, RadialDensity], mu: Any = 0.0, scale: float = 1.0) -> PointDensity:
    """``y -> scale^{-p} d((y - mu) / scale)`` evaluated on rows of an ``(n, p)`` array."""

    p = d.dim
    centre = np.broadcast_to(np.asarray(mu, dtype=float), (p,))
    if isinstance(d, SmnDensity):
        radial: Callable[[np.ndarray], np.ndarray] = lambda u: eval_radial(d, u)
    else:
        radial = d.radial

    def fn(y: np.ndarray) -> np.ndarray:
        t = (y - centre[None, :]) / scale
        return np.asarray(radial(np.einsum("ij,ij->i", t, t))) * scale ** (-p)

    return fn


def _axis(centre: float, step: float, radius: float) -> np.ndarray:
    half = math.ceil(radius / step)
    half += half % 2
    return centre + step * np.arange(-half, half + 1)


def _boundary(values: np.ndarray, dim: int) -> float:
    if dim == 1:
        return float(max(abs(values[0]), abs(values[-1])))
    edges = np.concatenate([values[0, :], values[-1, :], values[:, 0], values[:, -1]])
    return float(np.max(np.abs(edges)))


def quadrature_loss_oracle(
    qtrue: PointDensity,
    qest: PointDensity,
    alpha: float,
    dim: int,
    *,
    centre: Any = 0.0,
    scale: float = 1.0,
    step: float = GRID_STEP,
    radius: float | None = None,
    boundary_tol: float = BOUNDARY_TOL,
) -> float:
    """Simpson rule over a square grid of half-width ``radius`` (default 12 scale units) around ``centre``.

    The grid has a node at ``centre``; put it on a kink of ``|q - qhat|`` when
    one is known.
    """

    if dim not in (1, 2):
        raise ValueError("grid integration is only implemented for p <= 2")
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    if not (step > 0 and scale > 0):
        raise ValueError("step and scale must be positive")
    width = GRID_RADIUS * scale if radius is None else radius
    point = np.broadcast_to(np.asarray(centre, dtype=float), (dim,))
    axes = [_axis(float(point[k]), step, width) for k in range(dim)]
    if dim == 1:
        grid = axes[0][:, None]
        shape: tuple[int, ...] = (axes[0].size,)
    else:
        mesh = np.meshgrid(axes[0], axes[1], indexing="ij")
        grid = np.column_stack([mesh[0].ravel(), mesh[1].ravel()])
        shape = (axes[0].size, axes[1].size)
    true_values = np.asarray(qtrue(grid), dtype=float).reshape(shape)
    est_values = np.asarray(qest(grid), dtype=float).reshape(shape)
    edge = max(_boundary(true_values, dim), _boundary(est_values, dim))
    if edge > boundary_tol:
        raise BoundaryDecayError(
            f"density is {edge:.3g} on the grid boundary at radius {width:g}", boundary_value=edge, radius=width
        )
    integrand = np.abs(true_values - est_values) ** alpha
    value = integrand
    for _ in range(dim):
        value = integrate.simpson(value, dx=step, axis=-1)
    logger.debug("Grid loss alpha=%s dim=%s points=%s value=%s", alpha, dim, grid.shape[0], value)
    return float(value)


__all__ = ["BoundaryDecayError", "quadrature_loss_oracle", "shifted"]
