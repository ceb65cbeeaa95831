"""Caps on the Baranchik multiplier ``a`` for plug-in densities that beat the MRE or X plug-in.

L2 caps come from ``2 (p - 2) / E(Z^{-1})`` and L1 caps from
``2 (p - 3) E(Z^{-1/2}) / E(Z^{-3/2})`` under the dual mixing laws sampled in
:mod:`pdrisk.sim.importance`. Point-mass laws make ``Z`` degenerate and are
handled exactly.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Callable, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import integrate

from ..densities.mixing import DivergentMomentError, MixingLaw, PointMass, simplify
from ..densities.radial import RadialDensity
from ..densities.smn import SmnDensity, eval_radial, marginal_pdf
from ..sim.importance import importance_sample_dual
from ..types import BoundReport
from .normal import NormalModel

logger = logging.getLogger(__name__)

IMPORTANCE_N = 10**6

RadialLike = Union[RadialDensity, SmnDensity, Callable[[np.ndarray], np.ndarray]]
MarginalLike = Union[SmnDensity, MixingLaw, Callable[[np.ndarray], np.ndarray]]


class L1NormalBounds(BaseModel):
    """Both L1 caps for the normal model; ``theorem / corollary = p / (p - 2)``."""

    model_config = ConfigDict(frozen=True)

    corollary: float
    theorem: float
    z0: float

    @property
    def ratio(self) -> float:
        return self.theorem / self.corollary


def _degenerate(law: MixingLaw) -> PointMass | None:
    law = simplify(law)
    return law if isinstance(law, PointMass) else None


def gamma_dual_inverse_mean(alpha_g: float, alpha_h: float, p: int, scale: float = 1.0) -> float:
    """``E(Z^{-1})`` of the L2 dual law for ``G = Gamma(alpha_g, scale)`` and ``H = Gamma(alpha_h, scale)``."""

    a = alpha_g
    b = alpha_g + 2.0 * alpha_h - 1.0
    if not (a > 1 and b > 1 and a + b - 1.0 > p / 2.0):
        raise DivergentMomentError(
            f"E(Z^-1) diverges for alpha_g={alpha_g:g}, alpha_h={alpha_h:g}, p={p}", order=-1.0
        )
    return (a + b - 1.0) * (a + b - 2.0) / ((a + b - 1.0 - p / 2.0) * (a - 1.0) * (b - 1.0)) / scale


def l2_dual_mixture_bound(
    g: MixingLaw, h: MixingLaw, p: int, *, n: int = IMPORTANCE_N, seed: int = 0, threads: int = 1
) -> BoundReport:
    """Cap ``2 (p - 2) / E(Z^{-1})`` for Baranchik plug-ins improving on the MRE density."""

    if p < 3:
        raise ValueError("Baranchik improvements need p >= 3")
    inputs: dict[str, Any] = {"p": p, "G": simplify(g).to_spec(), "H": simplify(h).to_spec()}
    g_point, h_point = _degenerate(g), _degenerate(h)
    if g_point is not None and h_point is not None:
        z1 = g_point.value
        z2 = g_point.value + 2.0 * h_point.value
        inverse = 1.0 / z1 + 1.0 / z2
        return BoundReport(
            equation_id="l2_dual", value=2.0 * (p - 2) / inverse, moment=inverse, exact=True, inputs=inputs
        )
    sample = importance_sample_dual(g, h, p, "l2", n, seed, threads=threads)
    estimate = sample.inverse_mean()
    cap = 2.0 * (p - 2) / estimate.value
    logger.info(
        "L2 dual cap p=%s cap=%.6g inverse_mean=%.6g se=%.2g ess=%.0f",
        p, cap, estimate.value, estimate.se, sample.ess,
    )
    return BoundReport(
        equation_id="l2_dual",
        value=cap,
        se=cap * estimate.se / estimate.value,
        moment=estimate.value,
        moment_se=estimate.se,
        ess=sample.ess,
        n=n,
        inputs={**inputs, "seed": seed},
    )


def bounded_mixing_dual_bounds(a_x: float, a_y: float, p: int) -> tuple[float, float]:
    """Upper bound on ``E(Z^{-1})`` and the matching lower bound on the L2 cap.

    ``a_x`` and ``a_y`` bound the mixing laws of ``X`` and ``Y`` from below;
    ``a_y = 0`` means nothing is known about ``Y``.
    """

    if not a_x > 0 or a_y < 0:
        raise ValueError("need a_x > 0 and a_y >= 0")
    if p < 3:
        raise ValueError("Baranchik improvements need p >= 3")
    upper = 1.0 / a_x + 1.0 / (a_x + 2.0 * a_y)
    return upper, 2.0 * (p - 2) / upper


def l1_baranchik_bound(
    g: MixingLaw, h: MixingLaw, p: int, *, n: int = IMPORTANCE_N, seed: int = 0, threads: int = 1
) -> BoundReport:
    """Cap ``2 (p - 3) E(Z^{-1/2}) / E(Z^{-3/2})`` for Baranchik plug-ins under L1."""

    if p < 4:
        raise ValueError("L1 Baranchik improvements need p >= 4")
    inputs: dict[str, Any] = {"p": p, "G": simplify(g).to_spec(), "H": simplify(h).to_spec()}
    g_point, h_point = _degenerate(g), _degenerate(h)
    if g_point is not None and h_point is not None:
        z0 = 4.0 * g_point.value * h_point.value / (g_point.value + 4.0 * h_point.value)
        return BoundReport(equation_id="l1_dual", value=2.0 * (p - 3) * z0, moment=z0, exact=True, inputs=inputs)
    sample = importance_sample_dual(g, h, p, "l1", n, seed, threads=threads)
    z = sample.z
    ratio = sample.ratio(z**-0.5, z**-1.5)
    cap = 2.0 * (p - 3) * ratio.value
    logger.info("L1 dual cap p=%s cap=%.6g se=%.2g ess=%.0f", p, cap, 2.0 * (p - 3) * ratio.se, sample.ess)
    return BoundReport(
        equation_id="l1_dual",
        value=cap,
        se=2.0 * (p - 3) * ratio.se,
        moment=ratio.value,
        moment_se=ratio.se,
        ess=sample.ess,
        n=n,
        inputs={**inputs, "seed": seed},
    )


def l1_bound_normal(m: NormalModel) -> L1NormalBounds:
    """Closed-form L1 caps for the normal model.

    With ``var_x`` replaced by a lower bound ``a_X`` the corollary value is a
    cap valid for every ``var_x >= a_X``.
    """

    if m.p < 4:
        raise ValueError("L1 Baranchik improvements need p >= 4")
    p = m.p
    z0 = 4.0 * m.var_x * m.var_y / (m.var_x + 4.0 * m.var_y)
    corollary = (p - 2) * (p - 3) / p * 2.0 * z0
    return L1NormalBounds(corollary=corollary, theorem=2.0 * (p - 3) * z0, z0=z0)


def _radial_fn(px: RadialLike) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(px, SmnDensity):
        return lambda u: eval_radial(px, u)
    return px


def _marginal_fn(qy: MarginalLike) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(qy, BaseModel):
        return lambda t: np.asarray(marginal_pdf(qy, t))  # type: ignore[arg-type]
    return qy  # type: ignore[return-value]


def _moment(integrand: Callable[[float], float], power: float) -> float:
    """``int_0^inf u^power integrand(u) du`` with the singularity at zero weighted out."""

    head, _ = integrate.quad(
        integrand, 0.0, 1.0, weight="alg", wvar=(power, 0.0), epsabs=0.0, epsrel=1e-12, limit=200
    )
    tail, _ = integrate.quad(
        lambda u: u**power * integrand(u), 1.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=400
    )
    return head + tail


def l1_general_bound(px: RadialLike, qy: MarginalLike, p: int) -> float:
    """L1 cap for a Baranchik plug-in from the radial density of ``X`` and the marginal density of ``Y``.

    ``2 (p - 2) / p * int u^{(p-3)/2} p_X(u) F'(sqrt(u)/2) du / int u^{(p-5)/2} p_X(u) F'(sqrt(u)/2) du``
    """

    if p < 4:
        raise ValueError("L1 Baranchik improvements need p >= 4")
    radial = _radial_fn(px)
    marginal = _marginal_fn(qy)

    def integrand(u: float) -> float:
        return float(np.asarray(radial(np.asarray(u))) * np.asarray(marginal(np.asarray(math.sqrt(u) / 2.0))))

    top = _moment(integrand, (p - 3) / 2.0)
    bottom = _moment(integrand, (p - 5) / 2.0)
    if not (math.isfinite(top) and math.isfinite(bottom)) or bottom <= 0:
        raise DivergentMomentError(f"L1 cap integrals are not finite (top={top!r}, bottom={bottom!r})")
    return 2.0 * (p - 2) / p * top / bottom


__all__ = [
    "IMPORTANCE_N",
    "L1NormalBounds",
    "bounded_mixing_dual_bounds",
    "gamma_dual_inverse_mean",
    "l1_baranchik_bound",
    "l1_bound_normal",
    "l1_general_bound",
    "l2_dual_mixture_bound",
]
