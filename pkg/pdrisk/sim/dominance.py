"""Paired risk comparisons over a grid of locations."""
from __future__ import annotations

import logging
import math
from typing import Any, Collection, Sequence

import numpy as np

from ..metrics.losses import LossSpec
from ..types import DominancePoint, DominanceReport, Verdict
from .engine import Estimate, SimModel, estimator_id, mc_risk_difference

logger = logging.getLogger(__name__)

STANDARD_NORMS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)
DIAGONAL_NORM = 2.0
SIGMAS = 3.0


def standard_mu_grid(p: int, norms: Sequence[float] = STANDARD_NORMS, diagonal: float = DIAGONAL_NORM) -> list[np.ndarray]:
    """Points ``||mu|| e1`` for each norm plus one point of norm ``diagonal`` along ``(1, ..., 1)``."""

    if p < 1:
        raise ValueError("p must be positive")
    grid = []
    for norm in norms:
        point = np.zeros(p)
        point[0] = norm
        grid.append(point)
    if p > 1:
        grid.append(np.full(p, diagonal / math.sqrt(p)))
    return grid


def point_verdict(diff: float, se: float, sigmas: float = SIGMAS) -> Verdict:
    if diff + sigmas * se < 0:
        return "dominates"
    if diff - sigmas * se > 0:
        return "dominated"
    return "inconclusive"


def overall_verdict(points: Sequence[DominancePoint], equal_at: Collection[int] = ()) -> Verdict:
    """``dominates`` needs every point to clear zero, except inconclusive points where equality is expected."""

    verdicts = [point.verdict for point in points]
    if "dominated" in verdicts:
        return "dominated"
    strict = [idx for idx, verdict in enumerate(verdicts) if verdict == "dominates"]
    if not strict:
        return "inconclusive"
    if all(verdict == "dominates" or idx in equal_at for idx, verdict in enumerate(verdicts)):
        return "dominates"
    return "inconclusive"


def dominance_scan(
    est1: Estimate,
    est2: Estimate,
    loss: LossSpec,
    model: SimModel,
    mu_grid: Sequence[Any] | None = None,
    *,
    n: int,
    seed: int,
    threads: int = 1,
    equal_at: Collection[int] = (),
    note: str | None = None,
) -> DominanceReport:
    """Estimate ``R(est1) - R(est2)`` at each grid point on common draws.

    ``equal_at`` lists grid indices where the two risks are known to agree.
    """

    grid = standard_mu_grid(model.dim) if mu_grid is None else list(mu_grid)
    points = []
    for idx, mu in enumerate(grid):
        paired = mc_risk_difference(model, est1, est2, loss, mu, n, seed + idx, threads=threads)
        verdict = point_verdict(paired.diff, paired.se)
        logger.info(
            "Dominance point idx=%s norm=%.3g diff=%.4g se=%.2g verdict=%s",
            idx, float(np.linalg.norm(paired.risk1.mu)), paired.diff, paired.se, verdict,
        )
        points.append(
            DominancePoint(
                mu=paired.risk1.mu,
                risk1=paired.risk1.mean,
                risk2=paired.risk2.mean,
                diff=paired.diff,
                se=paired.se,
                verdict=verdict,
            )
        )
    verdict = overall_verdict(points, equal_at)
    return DominanceReport(
        estimator1=estimator_id(est1),
        estimator2=estimator_id(est2),
        loss_id=loss.kind,
        n=n,
        seed=seed,
        points=tuple(points),
        verdict=verdict,
        note=note,
    )


__all__ = ["DIAGONAL_NORM", "STANDARD_NORMS", "dominance_scan", "overall_verdict", "point_verdict", "standard_mu_grid"]
