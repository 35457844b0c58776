"""Certify (x0, Delta) pairs: every x >= x0 has a prime in (x(1 - 1/Delta), x]."""
from __future__ import annotations

from .certifier import (
    Certificate,
    ConstraintBreakdown,
    DomainError,
    PrecisionExhausted,
    SearchParams,
    certify,
    delta_cap,
    derive_X0,
    evaluate_margin,
)
from .constants import AnalyticConstants, ConstantsError, default_constants, load_overrides
from .optimizer import NoFeasiblePoint, SearchConfig, SearchResult, fit_regression, optimize, refine
from .smoothing import WeightSpec
from .zeros import ZeroList, ZeroSummary, ingest, load_fixture, summarize

__version__ = "0.1.0"

__all__ = [
    "AnalyticConstants",
    "Certificate",
    "ConstantsError",
    "ConstraintBreakdown",
    "DomainError",
    "NoFeasiblePoint",
    "PrecisionExhausted",
    "SearchConfig",
    "SearchParams",
    "SearchResult",
    "WeightSpec",
    "ZeroList",
    "ZeroSummary",
    "certify",
    "default_constants",
    "delta_cap",
    "derive_X0",
    "evaluate_margin",
    "fit_regression",
    "ingest",
    "load_fixture",
    "load_overrides",
    "optimize",
    "refine",
    "summarize",
]
