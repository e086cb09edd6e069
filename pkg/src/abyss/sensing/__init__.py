"""Material-sensing pipeline: traces, features, classifiers, and statistics."""

from .classifiers import (
    ClassifierModel,
    ClassifierSpec,
    ForestSpec,
    KnnSpec,
    fit,
    kfold_cv,
    predict,
)
from .confusion import (
    DEFAULT_DIAGONALS,
    ConfusionModel,
    confusion_from_diagonals,
    default_confusion_model,
    identity_confusion_model,
    sample_confusion,
    uniform_offdiagonal_matrix,
)
from .features import FEATURE_NAMES, FeatureVector, extract_features
from .stats import KruskalResult, kruskal_wallis
from .traces import (
    CONDITIONS,
    GENERATOR_PRESETS,
    Condition,
    ConfigurationError,
    GeneratorSpec,
    LightTrace,
    Luminosity,
    Medium,
    TraceModel,
    chance_generator,
    generate_trace,
    reference_generator,
    trace_from_csv,
    trace_to_csv,
)

__all__ = [
    "CONDITIONS",
    "DEFAULT_DIAGONALS",
    "FEATURE_NAMES",
    "GENERATOR_PRESETS",
    "ClassifierModel",
    "ClassifierSpec",
    "Condition",
    "ConfigurationError",
    "ConfusionModel",
    "FeatureVector",
    "ForestSpec",
    "GeneratorSpec",
    "KnnSpec",
    "KruskalResult",
    "LightTrace",
    "Luminosity",
    "Medium",
    "TraceModel",
    "chance_generator",
    "confusion_from_diagonals",
    "default_confusion_model",
    "extract_features",
    "fit",
    "generate_trace",
    "identity_confusion_model",
    "kfold_cv",
    "kruskal_wallis",
    "predict",
    "reference_generator",
    "sample_confusion",
    "trace_from_csv",
    "trace_to_csv",
    "uniform_offdiagonal_matrix",
]
