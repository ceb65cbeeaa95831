"""Column schemas for report outputs."""
from __future__ import annotations

RISK_COLUMNS = [
    "scenario",
    "estimator",
    "loss",
    "mu_norm",
    "mu",
    "closed_form",
    "mc_risk",
    "se",
    "n",
    "seed",
]

DOMINANCE_COLUMNS = [
    "scenario",
    "estimator1",
    "estimator2",
    "loss",
    "mu_norm",
    "mu",
    "risk1",
    "risk2",
    "diff",
    "se",
    "verdict",
]

THRESHOLD_COLUMNS = [
    "equation_id",
    "p",
    "r",
    "a",
    "value",
    "display",
    "residual",
    "p0",
    "bracket",
]

BOUND_COLUMNS = [
    "equation_id",
    "value",
    "se",
    "moment",
    "moment_se",
    "ess",
    "n",
    "exact",
]

DISTANCE_COLUMNS = [
    "loss",
    "family",
    "p",
    "delta",
    "value",
    "oracle",
]

CHECK_COLUMNS = [
    "suite",
    "name",
    "passed",
    "value",
    "expected",
    "tolerance",
    "detail",
]
