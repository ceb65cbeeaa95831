"""Distances between densities and the losses built on them."""
from .distances import l1_distance, l2_general_distance, l2_normal_distance, normal_product_integral
from .losses import (
    L1Dual,
    L1Integrated,
    L2Integrated,
    LossSpec,
    ReflectedNormal,
    ReflectedSmn,
    l1_dual_loss,
    l2_dual_constants,
    l2_plugin_loss_normal,
    loss_from_spec,
    point_loss,
    reflected_normal_loss,
    reflected_smn_loss,
)

__all__ = [
    "L1Dual",
    "L1Integrated",
    "L2Integrated",
    "LossSpec",
    "ReflectedNormal",
    "ReflectedSmn",
    "l1_distance",
    "l1_dual_loss",
    "l2_dual_constants",
    "l2_general_distance",
    "l2_normal_distance",
    "l2_plugin_loss_normal",
    "loss_from_spec",
    "normal_product_integral",
    "point_loss",
    "reflected_normal_loss",
    "reflected_smn_loss",
]
