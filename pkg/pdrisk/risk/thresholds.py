"""Dominance cutoffs for variance expansion of normal plug-in densities.

Each cutoff is the unique root in ``(1, inf)`` of a risk-difference equation,
or infinite once ``p`` passes the matching ``p0``. Infinite cases are decided
analytically before any root search.
"""
from __future__ import annotations

import logging
import math
from typing import Callable

from scipy import optimize

from ..types import ThresholdReport

logger = logging.getLogger(__name__)

BRACKET_START = (1.0 + 1e-9, 2.0)
MAX_DOUBLINGS = 200
XTOL = 1e-14
RTOL = 1e-15


class RootBracketError(RuntimeError):
    """Raised when doubling the upper end never produced a sign change."""

    def __init__(self, message: str, *, equation_id: str, bracket: tuple[float, float]) -> None:
        super().__init__(message)
        self.equation_id = equation_id
        self.bracket = bracket


def expanding_bisect(
    fn: Callable[[float], float], equation_id: str, lo: float = BRACKET_START[0], hi: float = BRACKET_START[1]
) -> tuple[float, tuple[float, float]]:
    """Root of ``fn`` on ``(lo, inf)`` where ``fn(lo) > 0`` and ``fn`` turns negative once."""

    f_lo = fn(lo)
    if not f_lo > 0:
        raise RootBracketError(
            f"{equation_id}: expected a positive value at the lower end, got {f_lo!r}",
            equation_id=equation_id,
            bracket=(lo, hi),
        )
    for _ in range(MAX_DOUBLINGS):
        if fn(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise RootBracketError(
            f"{equation_id}: no sign change below {hi:g}", equation_id=equation_id, bracket=(lo, hi)
        )
    root = optimize.bisect(fn, lo, hi, xtol=XTOL * max(1.0, lo), rtol=RTOL, maxiter=500)
    return float(root), (float(lo), float(hi))


def p0_threshold(r: float) -> float:
    """Smallest real ``p`` from which every ``c2 > 1`` improves on ``N(X, var_y I)``."""

    if not r > 0:
        raise ValueError("variance ratio r must be positive")
    return math.log(4.0) / math.log1p(r / 2.0)


def p0a_threshold(a: float, r: float) -> float:
    """``p0`` for the shrunken plug-in ``N(a X, var_y I)``."""

    if not 0 < a <= 1:
        raise ValueError("shrink factor a must lie in (0, 1]")
    return p0_threshold(a * a * r)


def _root_equation(p: int, r: float) -> Callable[[float], float]:
    h = p / 2.0

    def fn(c2: float) -> float:
        return 0.5**h + 2.0 * (r + c2 + 1.0) ** (-h) - 2.0 * (r + 2.0) ** (-h) - (2.0 * c2) ** (-h)

    return fn


def _cutoff(p: int, r_eff: float, equation_id: str, inputs: dict[str, float]) -> ThresholdReport:
    if p < 1:
        raise ValueError("p must be positive")
    if not r_eff > 0:
        raise ValueError("variance ratio r must be positive")
    p0 = p0_threshold(r_eff)
    context = {"p0": p0}
    if p >= p0:
        logger.debug("Threshold %s is infinite p=%s p0=%s", equation_id, p, p0)
        return ThresholdReport(equation_id=equation_id, value=math.inf, inputs=inputs, context=context)
    fn = _root_equation(p, r_eff)
    value, bracket = expanding_bisect(fn, equation_id)
    residual = fn(value)
    logger.debug("Threshold %s value=%s residual=%s bracket=%s", equation_id, value, residual, bracket)
    return ThresholdReport(
        equation_id=equation_id, value=value, bracket=bracket, residual=residual, inputs=inputs, context=context
    )


def threshold_k(p: int, r: float) -> ThresholdReport:
    """Largest ``c2`` for which ``N(X, c2 var_y I)`` still dominates ``N(X, var_y I)``."""

    return _cutoff(p, r, "root", {"p": float(p), "r": float(r)})


def threshold_ka(p: int, r: float, a: float) -> ThresholdReport:
    """Cutoff for ``N(a X, c2 var_y I)`` against ``N(a X, var_y I)``; ``k_a(p, r) = k(p, a^2 r)``."""

    if not 0 < a <= 1:
        raise ValueError("shrink factor a must lie in (0, 1]")
    equation_id = "root" if a == 1.0 else "roota"
    return _cutoff(p, a * a * r, equation_id, {"p": float(p), "r": float(r), "a": float(a)})


def k0_threshold(p: int, r: float) -> ThresholdReport:
    """Largest ``c2`` for which ``N(X, c2 var_y I)`` improves on the unbiased ``c2 = 1 - r``."""

    if p < 1:
        raise ValueError("p must be positive")
    if not 0 < r < 1:
        raise ValueError("the unbiased estimator exists only for 0 < r < 1")
    h = p / 2.0
    unbiased = 1.0 - r
    p0 = -math.log(4.0) / math.log1p(-r)
    inputs = {"p": float(p), "r": float(r)}
    context = {"p0": p0, "unbiased_c2": unbiased}
    if p >= p0:
        return ThresholdReport(equation_id="unbiased", value=math.inf, inputs=inputs, context=context)

    def scaled_risk(c2: float) -> float:
        return (2.0 * c2) ** (-h) - 2.0 * (r + c2 + 1.0) ** (-h)

    reference = scaled_risk(unbiased)

    def fn(c2: float) -> float:
        return reference - scaled_risk(c2)

    # the risk is smallest at 1 + r, inside the improvement range
    value, bracket = expanding_bisect(fn, "unbiased", lo=1.0 + r, hi=2.0 * (1.0 + r))
    return ThresholdReport(
        equation_id="unbiased", value=value, bracket=bracket, residual=fn(value), inputs=inputs, context=context
    )


__all__ = [
    "RootBracketError",
    "expanding_bisect",
    "k0_threshold",
    "p0_threshold",
    "p0a_threshold",
    "threshold_k",
    "threshold_ka",
]
