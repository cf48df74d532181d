"""Ring distance and prior-based models for pairs of primary alternating word orders."""

from .data import canonical_dataset, parse_dominant_frequencies, parse_pair_counts, reference_frequencies
from .inference import (
    PairCountTable,
    aic_c,
    bic,
    evaluate_all,
    grid_search,
    log_likelihood,
    plugin_fit,
)
from .models import (
    ConditionalModel,
    DominantFrequencies,
    model0,
    model1,
    model1_trunc_exp,
    model2,
    model2_reduced,
    model3,
    model4,
)
from .ring import ORDERS, Order, displacement, kendall_tau_b, ring_distance

__version__ = "0.1.0"

__all__ = [
    "ORDERS",
    "ConditionalModel",
    "DominantFrequencies",
    "Order",
    "PairCountTable",
    "aic_c",
    "bic",
    "canonical_dataset",
    "displacement",
    "evaluate_all",
    "grid_search",
    "kendall_tau_b",
    "log_likelihood",
    "model0",
    "model1",
    "model1_trunc_exp",
    "model2",
    "model2_reduced",
    "model3",
    "model4",
    "parse_dominant_frequencies",
    "parse_pair_counts",
    "plugin_fit",
    "reference_frequencies",
    "ring_distance",
]
