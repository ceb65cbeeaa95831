"""Density-estimation losses and the point-estimation losses dual to them."""
from __future__ import annotations

import math
from typing import Annotated, Any, ClassVar, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from ..densities.mixing import MixingLaw, simplify
from ..densities.smn import marginal_cdf
from .distances import l2_normal_distance


class _LossBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    #: density losses compare two densities; the others compare two points
    is_density_loss: ClassVar[bool] = False

    def to_spec(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


class L2Integrated(_LossBase):
    kind: Literal["l2"] = "l2"
    is_density_loss: ClassVar[bool] = True


class L1Integrated(_LossBase):
    kind: Literal["l1"] = "l1"
    is_density_loss: ClassVar[bool] = True


class ReflectedNormal(_LossBase):
    """``1 - exp(-||d - mu||^2 / 2 gamma)``."""

    kind: Literal["reflected_normal"] = "reflected_normal"
    gamma: float = Field(gt=0)


class ReflectedSmn(_LossBase):
    """``K - int (2 pi t)^{-p/2} exp(-||d - mu||^2 / 2t) dJ(t)`` with ``K`` zeroing the loss at ``d = mu``."""

    kind: Literal["reflected_smn"] = "reflected_smn"
    mixing: MixingLaw
    dim: int = Field(ge=1)

    @property
    def normalization(self) -> float:
        law = simplify(self.mixing)
        law.check_inverse_moment(self.dim / 2.0)
        return float((2.0 * math.pi) ** (-self.dim / 2.0) * law.kernel_moment(-self.dim / 2.0, 0.0))


class L1Dual(_LossBase):
    """``2 F(||d - mu|| / 2) - 1`` with ``F`` the marginal cdf of the mixing law's density."""

    kind: Literal["l1_dual"] = "l1_dual"
    mixing: MixingLaw


LossSpec = Annotated[
    Union[L2Integrated, L1Integrated, ReflectedNormal, ReflectedSmn, L1Dual],
    Field(discriminator="kind"),
]

_LOSS_ADAPTER = TypeAdapter(LossSpec)


def loss_from_spec(spec: dict | LossSpec) -> LossSpec:
    if isinstance(spec, _LossBase):
        return spec  # type: ignore[return-value]
    return _LOSS_ADAPTER.validate_python(spec)


def _squared_separation(d: Any, mu: Any) -> np.ndarray:
    diff = np.asarray(d, dtype=float) - np.asarray(mu, dtype=float)
    if diff.ndim == 0:
        return diff * diff
    return np.sum(diff * diff, axis=-1)


def _scalar(value: np.ndarray) -> np.ndarray | float:
    return float(value) if np.ndim(value) == 0 else value


def reflected_normal_loss(gamma: float, d: Any, mu: Any) -> np.ndarray | float:
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return _scalar(-np.expm1(-_squared_separation(d, mu) / (2.0 * gamma)))


def reflected_smn_loss(mixing: MixingLaw, dim: int, d: Any, mu: Any) -> np.ndarray | float:
    law = simplify(mixing)
    law.check_inverse_moment(dim / 2.0)
    squared = _squared_separation(d, mu)
    constant = (2.0 * math.pi) ** (-dim / 2.0)
    peak = constant * float(law.kernel_moment(-dim / 2.0, 0.0))
    value = peak - constant * law.kernel_moment(-dim / 2.0, squared / 2.0)
    return _scalar(np.maximum(value, 0.0))


def l1_dual_loss(mixing: MixingLaw, d: Any, mu: Any) -> np.ndarray | float:
    distance = np.sqrt(_squared_separation(d, mu))
    value = 2.0 * np.asarray(marginal_cdf(mixing, distance / 2.0)) - 1.0
    return _scalar(np.clip(value, 0.0, 1.0))


def l2_plugin_loss_normal(muhat: Any, mu: Any, c2: float, var_y: float, dim: int) -> np.ndarray | float:
    """Integrated L2 loss of ``N(muhat, c2 var_y I)`` against ``N(mu, var_y I)``."""

    if c2 <= 0:
        raise ValueError("c2 must be positive")
    return l2_normal_distance(mu, var_y, muhat, c2 * var_y, dim)


def l2_dual_constants(c2: float, var_y: float, dim: int) -> tuple[float, float, float]:
    """``(a, b, gamma)`` with L2 loss of ``N(muhat, c2 var_y I)`` equal to ``a + b * reflected(gamma)``."""

    if c2 <= 0 or var_y <= 0:
        raise ValueError("c2 and var_y must be positive")
    p = dim
    scale = var_y ** (-p / 2.0)
    cross = (2.0 * math.pi * (c2 + 1.0)) ** (-p / 2.0)
    a = scale * ((4.0 * math.pi) ** (-p / 2.0) + (4.0 * math.pi * c2) ** (-p / 2.0) - 2.0 * cross)
    b = 2.0 * scale * cross
    return a, b, (c2 + 1.0) * var_y


def point_loss(loss: LossSpec, d: Any, mu: Any) -> np.ndarray | float:
    """Evaluate a point-estimation loss at rows of ``d`` against ``mu``."""

    if isinstance(loss, ReflectedNormal):
        return reflected_normal_loss(loss.gamma, d, mu)
    if isinstance(loss, ReflectedSmn):
        return reflected_smn_loss(loss.mixing, loss.dim, d, mu)
    if isinstance(loss, L1Dual):
        return l1_dual_loss(loss.mixing, d, mu)
    raise ValueError(f"{loss.kind} compares densities, not point estimates")


__all__ = [
    "L1Dual",
    "L1Integrated",
    "L2Integrated",
    "LossSpec",
    "ReflectedNormal",
    "ReflectedSmn",
    "l1_dual_loss",
    "l2_dual_constants",
    "l2_plugin_loss_normal",
    "loss_from_spec",
    "point_loss",
    "reflected_normal_loss",
    "reflected_smn_loss",
]
