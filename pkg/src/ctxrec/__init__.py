"""Context-aware implicit-feedback experimentation toolkit.

Pipeline: interaction records -> engineered feature variants -> purchase
probability learners -> preference-fed recommenders -> leave-one-out
ranking evaluation with tie-aware metrics and paired sign tests.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .dataset import (DatasetSummary, InteractionRecord, ItemCatalog,
                      filter_evaluation_cohort, load_catalog,
                      load_interactions, summarize, write_interactions)
from .features import FeatureMatrix, Variant, build_variant
from .learners import LearnerConfig, LearnerKind, fit, predict
from .synth import SynthConfig, synthesize

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "InteractionRecord", "ItemCatalog", "DatasetSummary",
    "load_interactions", "load_catalog", "write_interactions",
    "filter_evaluation_cohort", "summarize",
    "SynthConfig", "synthesize",
    "Variant", "FeatureMatrix", "build_variant",
    "LearnerKind", "LearnerConfig", "fit", "predict",
]
