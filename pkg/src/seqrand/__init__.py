"""Exact-arithmetic toolkit for sequence prediction and algorithmic randomness."""

from .core import EMPTY, BudgetExceeded, Dyadic, PrefixFreeSet, complement_last, is_prefix_free, sigma
from .predictors import (
    StagedPredictor,
    bernoulli,
    dirac,
    exact_predictor,
    mixture,
    normalize,
    subadditivize,
    table_predictor,
    uniform,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "Dyadic",
    "EMPTY",
    "PrefixFreeSet",
    "StagedPredictor",
    "bernoulli",
    "complement_last",
    "dirac",
    "exact_predictor",
    "is_prefix_free",
    "mixture",
    "normalize",
    "sigma",
    "subadditivize",
    "table_predictor",
    "uniform",
]
