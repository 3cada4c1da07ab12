"""autobva: automated black-box boundary value detection.

Finds, deduplicates, ranks and summarizes pairs of nearby program inputs
whose outputs differ sharply, using an exact output-over-input distance
quotient as the boundariness score.
"""

from .detection import (
    Archive,
    BoundaryCandidate,
    DetectionConfig,
    DetectionResult,
    MutationOperator,
    bcs_search,
    detect,
    lns_search,
    mutate,
)
from .distances import (
    JACCARD1,
    JACCARD2,
    LEVENSHTEIN,
    STRLEN,
    OutputDistance,
    input_distance,
    jaccard_ngram,
    levenshtein,
    parse_distance,
    pdq,
    strlendist,
)
from .sampling import SamplerConfig, TypeDomain, compatible_types, sample_input, sample_value
from .summarization import ClusterReport, kmeans, select_model, silhouette, summarize, validity_of
from .suts import BUILTIN_SUTS, SutDescriptor, execute, get_sut, make_external_sut
from .values import ExecutionOutcome, render_value

__version__ = "0.1.0"

__all__ = [
    "Archive", "BoundaryCandidate", "DetectionConfig", "DetectionResult",
    "MutationOperator", "bcs_search", "detect", "lns_search", "mutate",
    "JACCARD1", "JACCARD2", "LEVENSHTEIN", "STRLEN", "OutputDistance",
    "input_distance", "jaccard_ngram", "levenshtein", "parse_distance", "pdq",
    "strlendist", "SamplerConfig", "TypeDomain", "compatible_types",
    "sample_input", "sample_value", "ClusterReport", "kmeans", "select_model",
    "silhouette", "summarize", "validity_of", "BUILTIN_SUTS", "SutDescriptor",
    "execute", "get_sut", "make_external_sut", "ExecutionOutcome", "render_value",
]
