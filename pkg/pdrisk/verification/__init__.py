"""Acceptance suites for closed forms, oracles and Monte Carlo dominance."""
from .suites import SUITES, SuiteOptions, run_suite

__all__ = ["SUITES", "SuiteOptions", "run_suite"]
