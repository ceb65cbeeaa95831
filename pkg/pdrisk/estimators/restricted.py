"""Bayes point estimators under a uniform prior on an interval (one dimension).

The posterior is the normal likelihood truncated to the interval. The
expected posterior loss is integrated with composite Gauss-Legendre rules
and minimized by golden-section search, run in lockstep over a batch of
observations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..metrics.losses import L1Dual, LossSpec, ReflectedNormal, ReflectedSmn, point_loss

logger = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
LEGENDRE_NODES = 16
START_PANELS = 8
MAX_PANELS = 256
# posterior weight below exp(-LOG_WEIGHT_FLOOR) relative to the mode is dropped
LOG_WEIGHT_FLOOR = 50.0
SEARCH_TOL = 1e-8
# golden-section noise near a flat minimum is about SEARCH_TOL
REFINE_TOL = 1e-7
TABLE_STEP = 0.005
TABLE_MARGIN = 8.0
BATCH = 512

SUPPORTED_LOSSES = (ReflectedNormal, L1Dual, ReflectedSmn)


class PosteriorError(ArithmeticError):
    """Raised when the truncated posterior has no mass to integrate."""


def _check_interval(lo: float, hi: float) -> None:
    if math.isnan(lo) or math.isnan(hi) or not lo < hi:
        raise ValueError(f"restriction interval must satisfy lo < hi, got [{lo}, {hi}]")


def _check_loss(loss: LossSpec) -> None:
    if not isinstance(loss, SUPPORTED_LOSSES):
        raise ValueError(f"restricted Bayes rules need a point loss, got {loss.kind}")
    if isinstance(loss, ReflectedSmn) and loss.dim != 1:
        raise ValueError("restricted Bayes rules are one-dimensional")


def _windows(x: np.ndarray, lo: float, hi: float, var_x: float) -> tuple[np.ndarray, np.ndarray]:
    """Part of the interval where the log posterior is within the floor of its mode."""

    mode = np.clip(x, lo, hi)
    gap = np.abs(mode - x)
    floor = 2.0 * var_x * LOG_WEIGHT_FLOOR
    radius = np.sqrt(gap * gap + floor)
    # radius - gap without cancellation
    inner = floor / (radius + gap)
    left = np.where(x > mode, mode - inner, x - radius)
    right = np.where(x < mode, mode + inner, x + radius)
    return np.maximum(left, lo), np.minimum(right, hi)


def _posterior_rule(
    x: np.ndarray, left: np.ndarray, right: np.ndarray, var_x: float, panels: int
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(batch, N)`` and normalized posterior weights on each window."""

    base_nodes, base_weights = np.polynomial.legendre.leggauss(LEGENDRE_NODES)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2.0
    mid = (edges[1:] + edges[:-1]) / 2.0
    unit_nodes = (mid[:, None] + half[:, None] * base_nodes[None, :]).reshape(-1)
    unit_weights = (half[:, None] * base_weights[None, :]).reshape(-1)
    width = (right - left)[:, None]
    nodes = left[:, None] + width * unit_nodes[None, :]
    mode = np.clip(x, left, right)[:, None]
    log_weight = -(nodes - mode) * (nodes + mode - 2.0 * x[:, None]) / (2.0 * var_x)
    weights = width * unit_weights[None, :] * np.exp(log_weight)
    mass = weights.sum(axis=1, keepdims=True)
    if np.any(~np.isfinite(mass)) or np.any(mass <= 0):
        raise PosteriorError("truncated posterior is not integrable on the restriction interval")
    return nodes, weights / mass


def _expected_loss(loss: LossSpec, d: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    values = np.asarray(point_loss(loss, d[:, None, None], nodes[..., None]))
    return np.sum(values * weights, axis=1)


def _golden_section(
    loss: LossSpec, nodes: np.ndarray, weights: np.ndarray, left: np.ndarray, right: np.ndarray
) -> np.ndarray:
    a = left.copy()
    b = right.copy()
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = _expected_loss(loss, c, nodes, weights)
    fd = _expected_loss(loss, d, nodes, weights)
    while np.max(b - a) > SEARCH_TOL:
        keep_left = fc < fd
        a, b = np.where(keep_left, a, c), np.where(keep_left, d, b)
        new_c = np.where(keep_left, b - GOLDEN * (b - a), d)
        new_d = np.where(keep_left, c, a + GOLDEN * (b - a))
        probe = np.where(keep_left, new_c, new_d)
        f_probe = _expected_loss(loss, probe, nodes, weights)
        fc, fd = np.where(keep_left, f_probe, fd), np.where(keep_left, fc, f_probe)
        c, d = new_c, new_d
    return (a + b) / 2.0


def restricted_bayes_point(
    x: Any, lo: float, hi: float, loss: LossSpec, var_x: float
) -> np.ndarray | float:
    """Bayes estimate of a restricted normal mean under a uniform prior on ``[lo, hi]``."""

    _check_interval(lo, hi)
    _check_loss(loss)
    if var_x <= 0:
        raise ValueError("var_x must be positive")
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.reshape(-1)
    if math.isinf(lo) and math.isinf(hi):
        # the posterior is symmetric about x
        out = flat.copy()
    else:
        out = np.empty_like(flat)
        for start in range(0, flat.shape[0], BATCH):
            out[start : start + BATCH] = _solve_batch(flat[start : start + BATCH], lo, hi, loss, var_x)
    out = np.clip(out, lo, hi)
    return float(out[0]) if x_arr.ndim == 0 else out.reshape(x_arr.shape)


def _solve_batch(x: np.ndarray, lo: float, hi: float, loss: LossSpec, var_x: float) -> np.ndarray:
    left, right = _windows(x, lo, hi, var_x)
    panels = START_PANELS
    nodes, weights = _posterior_rule(x, left, right, var_x, panels)
    previous = _golden_section(loss, nodes, weights, left, right)
    while panels < MAX_PANELS:
        panels *= 2
        nodes, weights = _posterior_rule(x, left, right, var_x, panels)
        current = _golden_section(loss, nodes, weights, left, right)
        change = float(np.max(np.abs(current - previous)))
        previous = current
        if change <= REFINE_TOL:
            return current
    logger.warning("Restricted Bayes quadrature did not settle panels=%s change=%s", panels, change)
    return previous


@dataclass(eq=False)
class RestrictedBayesTable:
    """Tabulated restricted Bayes rule, interpolated linearly between grid points.

    Observations outside the table are solved exactly.
    """

    lo: float
    hi: float
    loss: LossSpec
    var_x: float
    grid: np.ndarray = field(init=False, repr=False)
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        _check_interval(self.lo, self.hi)
        sigma = math.sqrt(self.var_x)
        if math.isinf(self.lo) and math.isinf(self.hi):
            self.grid = np.zeros(0)
            self.values = np.zeros(0)
            return
        low = self.lo if math.isfinite(self.lo) else self.hi - 12.0 * sigma
        high = self.hi if math.isfinite(self.hi) else self.lo + 12.0 * sigma
        start = low - TABLE_MARGIN * sigma
        stop = high + TABLE_MARGIN * sigma
        count = int(math.ceil((stop - start) / (TABLE_STEP * sigma))) + 1
        self.grid = np.linspace(start, stop, count)
        logger.info("Tabulating restricted Bayes rule points=%s lo=%s hi=%s", count, self.lo, self.hi)
        self.values = np.asarray(restricted_bayes_point(self.grid, self.lo, self.hi, self.loss, self.var_x))

    def __call__(self, x: Any) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        if self.grid.size == 0:
            return x_arr.copy()
        flat = x_arr.reshape(-1)
        out = np.interp(flat, self.grid, self.values)
        outside = (flat < self.grid[0]) | (flat > self.grid[-1])
        if np.any(outside):
            out[outside] = restricted_bayes_point(flat[outside], self.lo, self.hi, self.loss, self.var_x)
        return out.reshape(x_arr.shape)


def restricted_mle(x: Any, lo: float, hi: float) -> np.ndarray:
    """Projection of ``x`` onto ``[lo, hi]``."""

    _check_interval(lo, hi)
    return np.clip(np.asarray(x, dtype=float), lo, hi)
