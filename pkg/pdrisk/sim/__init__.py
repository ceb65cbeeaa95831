"""Monte Carlo risk estimation, importance sampling and grid oracles."""
from .dominance import dominance_scan, overall_verdict, point_verdict, standard_mu_grid
from .engine import (
    PairedRisk,
    SimModel,
    UnbiasednessReport,
    UnsupportedCombinationError,
    mc_bayes_risk,
    mc_risk,
    mc_risk_derivative_at_one,
    mc_risk_difference,
    normal_sim_model,
    unbiasedness_check,
    universal_dominance_holds,
)
from .importance import DualSample, UnreliableEstimateError, WeightedEstimate, importance_sample_dual
from .oracles import BoundaryDecayError, quadrature_loss_oracle, shifted
from .streams import CHUNK_SIZE, chunk_rng, map_chunks, mean_and_se, resolve_seed

__all__ = [
    "BoundaryDecayError",
    "CHUNK_SIZE",
    "DualSample",
    "PairedRisk",
    "SimModel",
    "UnbiasednessReport",
    "UnreliableEstimateError",
    "UnsupportedCombinationError",
    "WeightedEstimate",
    "chunk_rng",
    "dominance_scan",
    "importance_sample_dual",
    "map_chunks",
    "mc_bayes_risk",
    "mc_risk",
    "mc_risk_derivative_at_one",
    "mc_risk_difference",
    "mean_and_se",
    "normal_sim_model",
    "overall_verdict",
    "point_verdict",
    "quadrature_loss_oracle",
    "resolve_seed",
    "shifted",
    "standard_mu_grid",
    "unbiasedness_check",
    "universal_dominance_holds",
]
