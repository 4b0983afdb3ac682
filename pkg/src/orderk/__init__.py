"""Poisson, geometric and negative binomial distributions of order k."""

from .params import BackendMismatchError, NotApplicableError, Params, parse_rational
from .pmf import (
    ScaledPmfTable,
    enumerate_compositions,
    mean,
    pgf_eval,
    pmf_oracle,
    pmf_table,
)

__version__ = "0.1.0"

__all__ = [
    "BackendMismatchError",
    "NotApplicableError",
    "Params",
    "ScaledPmfTable",
    "enumerate_compositions",
    "mean",
    "parse_rational",
    "pgf_eval",
    "pmf_oracle",
    "pmf_table",
]
