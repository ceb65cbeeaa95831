"""Scale expansion of plug-in densities for scale mixtures of normals.

``X - mu ~ SN_p(G)`` and ``Y - mu ~ SN_p(H)``; with ``V1 ~ G`` and ``W1, W2 ~ H``
independent, the risk of ``c^{-p} q((y - x) / c)`` under L2 is constant and
depends on ``N = E (W1 + W2)^{-p/2}`` and ``M_c = E (V1 + W1 + c^2 W2)^{-p/2}``.
"""
from __future__ import annotations

import logging
import math

from ..densities.mixing import DivergentMomentError, MixingLaw, add_laws, inverse_half_moment, weighted_inverse_moment
from ..types import ThresholdReport
from .thresholds import expanding_bisect

logger = logging.getLogger(__name__)

P_PROBE_MAX = 64
# extra dimensions checked after the first success
MONOTONE_CHECK = 4


class ProbeRangeError(RuntimeError):
    """Raised when no dimension in the probed range satisfies ``N >= 2 M_1``."""

    def __init__(self, message: str, *, lower_bound: int) -> None:
        super().__init__(message)
        self.lower_bound = lower_bound


def _check_scale(c: float) -> None:
    if not c > 0:
        raise ValueError("scale c must be positive")


def smn_n(h: MixingLaw, p: int) -> float:
    """``N = E (W1 + W2)^{-p/2}``."""

    return inverse_half_moment(add_laws(h, h), p)


def smn_m(g: MixingLaw, h: MixingLaw, p: int, c: float) -> float:
    """``M_c = E (V1 + W1 + c^2 W2)^{-p/2}``."""

    _check_scale(c)
    return inverse_half_moment(add_laws(g, h, h.scaled(c * c)), p)


def smn_risk_qc(g: MixingLaw, h: MixingLaw, p: int, c: float) -> float:
    """L2 risk of the scale-expanded plug-in ``c^{-p} q((y - x) / c)``."""

    n_value = smn_n(h, p)
    m_value = smn_m(g, h, p, c)
    return (2.0 * math.pi) ** (-p / 2.0) * ((1.0 + c ** (-p)) * n_value - 2.0 * m_value)


def smn_cstar(g: MixingLaw, h: MixingLaw, p: int) -> ThresholdReport:
    """Risk-minimizing scale ``c* > 1``."""

    n_value = smn_n(h, p)
    base = add_laws(g, h)
    order = p / 2.0 + 1.0

    def fn(c: float) -> float:
        # positive below c*, so the sign is flipped against the defining equation
        return (n_value - 2.0 * c ** (p + 2) * weighted_inverse_moment(base, h, c * c, order)) / n_value

    value, bracket = expanding_bisect(fn, "cstar")
    residual = fn(value)
    logger.debug("Optimal scale c=%s residual=%s", value, residual)
    return ThresholdReport(
        equation_id="cstar",
        value=value,
        unit="c",
        bracket=bracket,
        residual=residual,
        inputs={"p": float(p)},
        context={"N": n_value},
    )


def smn_c1(g: MixingLaw, h: MixingLaw, p: int) -> ThresholdReport:
    """Largest scale for which the expansion still dominates the plug-in ``c = 1``."""

    n_value = smn_n(h, p)
    m_one = smn_m(g, h, p, 1.0)
    context = {"N": n_value, "M1": m_one}
    if n_value >= 2.0 * m_one:
        return ThresholdReport(equation_id="c1", value=math.inf, unit="c", inputs={"p": float(p)}, context=context)

    def fn(c: float) -> float:
        return (n_value * (1.0 - c ** (-p)) - 2.0 * (m_one - smn_m(g, h, p, c))) / n_value

    value, bracket = expanding_bisect(fn, "c1")
    return ThresholdReport(
        equation_id="c1",
        value=value,
        unit="c",
        bracket=bracket,
        residual=fn(value),
        inputs={"p": float(p)},
        context=context,
    )


def _universal(g: MixingLaw, h: MixingLaw, p: int) -> bool:
    return smn_n(h, p) >= 2.0 * smn_m(g, h, p, 1.0)


def smn_universal_p0(g: MixingLaw, h: MixingLaw, p_max: int = P_PROBE_MAX) -> int:
    """Smallest integer ``p`` from which every ``c > 1`` dominates the plug-in."""

    for p in range(1, p_max + 1):
        try:
            holds = _universal(g, h, p)
        except DivergentMomentError as exc:
            raise ProbeRangeError(
                f"inverse moments diverge at p={p} before N >= 2 M_1 held", lower_bound=p
            ) from exc
        if not holds:
            continue
        for larger in range(p + 1, min(p + MONOTONE_CHECK, p_max) + 1):
            try:
                if not _universal(g, h, larger):
                    logger.warning("Universal expansion condition not monotone p=%s larger=%s", p, larger)
            except DivergentMomentError:
                break
        return p
    raise ProbeRangeError(f"N >= 2 M_1 fails for every p <= {p_max}", lower_bound=p_max + 1)


def bounded_support_cstar_lower(r1: float, r2: float) -> float:
    """Lower bound on ``c*^2`` for iid mixing laws supported on ``[r1, r2]``."""

    _check_support(r1, r2)
    return 1.0 + r1 / r2


def bounded_support_p0(r1: float, r2: float) -> float:
    """Dimension from which every ``c > 1`` dominates, for iid mixing laws on ``[r1, r2]``."""

    _check_support(r1, r2)
    beta = r1 / (r1 + r2)
    return math.log(4.0) / math.log1p(beta)


def _check_support(r1: float, r2: float) -> None:
    if not 0 < r1 <= r2:
        raise ValueError("support bounds must satisfy 0 < r1 <= r2")


__all__ = [
    "ProbeRangeError",
    "bounded_support_cstar_lower",
    "bounded_support_p0",
    "smn_c1",
    "smn_cstar",
    "smn_m",
    "smn_n",
    "smn_risk_qc",
    "smn_universal_p0",
]
