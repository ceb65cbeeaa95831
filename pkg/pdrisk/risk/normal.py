"""Closed-form L2 risks for the normal model ``X ~ N_p(mu, var_x I)``, ``Y ~ N_p(mu, var_y I)``.

Estimators have the form ``N_p(a X, c2 var_y I)``. With ``Z = ||aX - mu||^2 / var_y``
the risk is

    (4 pi var_y)^{-p/2} + (2 pi var_y)^{-p/2} [(2 c2)^{-p/2} - 2 (c2 + 1)^{-p/2} E e^{-Z / (2 (c2 + 1))}]

and ``Z`` is a scaled noncentral chi-square, so every expectation is explicit.
"""
from __future__ import annotations

import math
from typing import Any, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .. import utils
from ..densities.noncentral import noncentral_scaled_chisq_laplace
from ..metrics.losses import l2_dual_constants


class NormalModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=1)
    var_x: float = Field(gt=0)
    var_y: float = Field(gt=0)

    @property
    def r(self) -> float:
        return self.var_x / self.var_y

    def with_dim(self, p: int) -> "NormalModel":
        return NormalModel(p=p, var_x=self.var_x, var_y=self.var_y)


class DualConstants(NamedTuple):
    """L2 loss of ``N(d, c2 var_y I)`` equals ``dual_offset + dual_scale * reflected_normal(gamma)``."""

    dual_offset: float
    dual_scale: float
    gamma: float


def _half(p: int) -> float:
    return p / 2.0


def _check_c2(c2: float) -> None:
    if not c2 > 0:
        raise ValueError("c2 must be positive")


def _check_shrink(a: float) -> None:
    if not 0 < a <= 1:
        raise ValueError("shrink factor a must lie in (0, 1]")


def risk_qc_normal(m: NormalModel, c2: float) -> float:
    """Constant risk of ``N(X, c2 var_y I)``."""

    _check_c2(c2)
    h = _half(m.p)
    return (2.0 * math.pi * m.var_y) ** (-h) * (
        0.5**h + (2.0 * c2) ** (-h) - 2.0 * (m.r + c2 + 1.0) ** (-h)
    )


def risk_mre_normal(m: NormalModel) -> float:
    """Constant (minimax) risk of ``N(X, (var_x + var_y) I)``."""

    h = _half(m.p)
    return (4.0 * math.pi * m.var_y) ** (-h) - (4.0 * math.pi * (m.var_x + m.var_y)) ** (-h)


def _laplace(m: NormalModel, a: float, normmu2: float, s: float):
    return noncentral_scaled_chisq_laplace(m.p, a, m.r, normmu2 / m.var_y, s)


def risk_qc_ax_normal(m: NormalModel, a: float, c2: float, normmu2: float) -> float:
    """Risk of ``N(a X, c2 var_y I)`` at a parameter with ``||mu||^2 = normmu2``."""

    _check_shrink(a)
    _check_c2(c2)
    h = _half(m.p)
    transform = _laplace(m, a, normmu2, 1.0 / (2.0 * (c2 + 1.0))).value
    return (4.0 * math.pi * m.var_y) ** (-h) + (2.0 * math.pi * m.var_y) ** (-h) * (
        (2.0 * c2) ** (-h) - 2.0 * (c2 + 1.0) ** (-h) * transform
    )


def risk_qc_derivative_normal(m: NormalModel, a: float, c2: float, normmu2: float) -> float:
    """Derivative in ``c2`` of :func:`risk_qc_ax_normal`."""

    _check_shrink(a)
    _check_c2(c2)
    h = _half(m.p)
    spread = a * a * m.r + c2 + 1.0
    noncentral = (a - 1.0) ** 2 * normmu2 / (a * a * m.var_x + (c2 + 1.0) * m.var_y)
    bracket = (m.p - noncentral) * math.exp(-noncentral / 2.0) - m.p * (spread / (2.0 * c2)) ** (h + 1.0)
    return (2.0 * math.pi * m.var_y) ** (-h) * spread ** (-(h + 1.0)) * bracket


def mre_plugin_risk_ratio(m: NormalModel) -> float:
    """Risk of the plug-in ``N(X, var_y I)`` over the MRE risk."""

    h = _half(m.p)
    return 2.0 * (-math.expm1(-h * math.log1p(m.r / 2.0))) / (-math.expm1(-h * math.log1p(m.r)))


def unbiased_c2(m: NormalModel) -> Optional[float]:
    """``c2 = 1 - r`` makes ``N(X, c2 var_y I)`` unbiased for the density of ``Y``; ``None`` when ``r >= 1``."""

    if m.r >= 1.0:
        return None
    return 1.0 - m.r


def unbiased_density_mean(m: NormalModel, c2: float, mu: Any, y: Any) -> np.ndarray | float:
    """``E_X N(X, c2 var_y I)(y)``, the ``N(mu, (var_x + c2 var_y) I)`` density at ``y``."""

    _check_c2(c2)
    var = m.var_x + c2 * m.var_y
    points = utils.as_points(y, m.p)
    centre = utils.as_vector(mu, m.p)
    squared = np.sum((points - centre) ** 2, axis=1)
    values = (2.0 * math.pi * var) ** (-_half(m.p)) * np.exp(-squared / (2.0 * var))
    return float(values[0]) if np.ndim(y) <= 1 and values.shape[0] == 1 else values


def stein_transfer_variance(var_x: float, var_y: float) -> float:
    """Variance of the auxiliary normal model where squared-error dominance transfers to L2."""

    if var_x <= 0 or var_y <= 0:
        raise ValueError("variances must be positive")
    return (2.0 * var_y + var_x) * var_x / (2.0 * (var_y + var_x))


def baranchik_cap(m: NormalModel) -> float:
    """Largest Baranchik multiplier ``2 (p - 2) sigma_Z^2`` improving on the MRE density."""

    if m.p < 3:
        raise ValueError("Baranchik improvements need p >= 3")
    return 2.0 * (m.p - 2) * stein_transfer_variance(m.var_x, m.var_y)


def dual_constants(m: NormalModel, c2: float) -> DualConstants:
    return DualConstants(*l2_dual_constants(c2, m.var_y, m.p))


def bayes_risk_normal_prior(m: NormalModel, m_var: float) -> float:
    """Bayes risk of the Bayes density under the prior ``N(0, m_var I)``.

    Increases to :func:`risk_mre_normal` as ``m_var`` grows.
    """

    if not m_var > 0:
        raise ValueError("prior variance must be positive")
    h = _half(m.p)
    if math.isinf(m_var):
        return risk_mre_normal(m)
    predictive_var = m_var * m.var_x / (m_var + m.var_x) + m.var_y
    return (4.0 * math.pi * m.var_y) ** (-h) - (4.0 * math.pi * predictive_var) ** (-h)


def optimal_c2_at_origin(m: NormalModel, a: float = 1.0) -> float:
    """Risk-minimizing ``c2`` for ``N(a X, c2 var_y I)`` at ``mu = 0`` (every ``mu`` when ``a = 1``)."""

    _check_shrink(a)
    return 1.0 + a * a * m.r


def risk_gap_integrand(z: Any, p: int, c2: float) -> np.ndarray | float:
    """``g(z)`` with ``(4 pi var_y)^{p/2} (R(c2=1) - R(c2)) = E g(Z)``; one sign change from - to +."""

    _check_c2(c2)
    z = np.asarray(z, dtype=float)
    h = p / 2.0
    value = (
        1.0
        - c2 ** (-h)
        + 2.0 * ((2.0 / (c2 + 1.0)) ** h * np.exp(-z / (2.0 * (c2 + 1.0))) - np.exp(-z / 4.0))
    )
    return float(value) if value.ndim == 0 else value


def risk_gap_normal(m: NormalModel, a: float, c2: float, normmu2: float) -> float:
    """``R(N(aX, var_y I)) - R(N(aX, c2 var_y I))`` at ``||mu||^2 = normmu2``."""

    _check_shrink(a)
    _check_c2(c2)
    h = _half(m.p)
    at_one = _laplace(m, a, normmu2, 0.25).value
    at_c = _laplace(m, a, normmu2, 1.0 / (2.0 * (c2 + 1.0))).value
    expected_gap = 1.0 - c2 ** (-h) + 2.0 * ((2.0 / (c2 + 1.0)) ** h * at_c - at_one)
    return (4.0 * math.pi * m.var_y) ** (-h) * expected_gap


def universal_dominance_ax(m: NormalModel, a: float = 1.0) -> tuple[bool, float]:
    """Whether every expansion ``c2 > 1`` improves on ``N(aX, var_y I)``.

    Returns the verdict and ``sup_mu E e^{-T/4} = (1 + a^2 r / 2)^{-p/2}``, attained at ``mu = 0``.
    """

    _check_shrink(a)
    value = (1.0 + a * a * m.r / 2.0) ** (-_half(m.p))
    return value <= 0.5, value


__all__ = [
    "DualConstants",
    "NormalModel",
    "baranchik_cap",
    "bayes_risk_normal_prior",
    "dual_constants",
    "mre_plugin_risk_ratio",
    "optimal_c2_at_origin",
    "risk_gap_integrand",
    "risk_gap_normal",
    "risk_mre_normal",
    "risk_qc_ax_normal",
    "risk_qc_derivative_normal",
    "risk_qc_normal",
    "stein_transfer_variance",
    "unbiased_c2",
    "unbiased_density_mean",
    "universal_dominance_ax",
]
