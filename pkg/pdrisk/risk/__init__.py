"""Closed-form risks, dominance thresholds and Baranchik bounds."""
from .bounds import (
    L1NormalBounds,
    bounded_mixing_dual_bounds,
    gamma_dual_inverse_mean,
    l1_baranchik_bound,
    l1_bound_normal,
    l1_general_bound,
    l2_dual_mixture_bound,
)
from .normal import (
    DualConstants,
    NormalModel,
    baranchik_cap,
    bayes_risk_normal_prior,
    dual_constants,
    mre_plugin_risk_ratio,
    optimal_c2_at_origin,
    risk_gap_integrand,
    risk_gap_normal,
    risk_mre_normal,
    risk_qc_ax_normal,
    risk_qc_derivative_normal,
    risk_qc_normal,
    stein_transfer_variance,
    unbiased_c2,
    unbiased_density_mean,
    universal_dominance_ax,
)
from .smn import (
    ProbeRangeError,
    bounded_support_cstar_lower,
    bounded_support_p0,
    smn_c1,
    smn_cstar,
    smn_m,
    smn_n,
    smn_risk_qc,
    smn_universal_p0,
)
from .thresholds import RootBracketError, k0_threshold, p0_threshold, p0a_threshold, threshold_k, threshold_ka

__all__ = [
    "DualConstants",
    "L1NormalBounds",
    "NormalModel",
    "ProbeRangeError",
    "RootBracketError",
    "baranchik_cap",
    "bayes_risk_normal_prior",
    "bounded_mixing_dual_bounds",
    "bounded_support_cstar_lower",
    "bounded_support_p0",
    "dual_constants",
    "gamma_dual_inverse_mean",
    "k0_threshold",
    "l1_baranchik_bound",
    "l1_bound_normal",
    "l1_general_bound",
    "l2_dual_mixture_bound",
    "mre_plugin_risk_ratio",
    "optimal_c2_at_origin",
    "p0_threshold",
    "p0a_threshold",
    "risk_gap_integrand",
    "risk_gap_normal",
    "risk_mre_normal",
    "risk_qc_ax_normal",
    "risk_qc_derivative_normal",
    "risk_qc_normal",
    "smn_c1",
    "smn_cstar",
    "smn_m",
    "smn_n",
    "smn_risk_qc",
    "smn_universal_p0",
    "stein_transfer_variance",
    "threshold_k",
    "threshold_ka",
    "unbiased_c2",
    "unbiased_density_mean",
    "universal_dominance_ax",
]
